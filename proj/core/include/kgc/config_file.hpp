#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgc {

// Flat `key = value` configuration with `[section]` headers and `#` comments.
// Keys are exposed as "section.key" (or bare "key" before any section).  The
// raw text is kept verbatim so manifests can echo and hash exactly what was
// read.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    // Typed getters.  The non-optional forms throw ConfigError when the key
    // is missing or malformed; the *_or forms substitute a default when the
    // key is absent (but still reject malformed values).
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;  // comma-separated

    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    long long get_int_or(const std::string& key, long long fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    const std::string& text() const { return text_; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::optional<std::string> find(const std::string& key) const;

    std::string text_;
    std::map<std::string, std::string> kv_;
};

} // namespace kgc
