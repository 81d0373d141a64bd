#include "kgc/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kgc/errors.hpp"

namespace kgc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile cfg;
    cfg.text_ = text;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("unterminated section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("empty section name at line " + std::to_string(lineno));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        const std::string full = section.empty() ? key : section + "." + key;
        if (!cfg.kv_.emplace(full, value).second)
            throw ConfigError("duplicate key '" + full + "' at line " + std::to_string(lineno));
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

std::optional<std::string> ConfigFile::find(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
}

std::string ConfigFile::get_string(const std::string& key) const {
    const auto v = find(key);
    if (!v) throw ConfigError("missing config key '" + key + "'");
    return *v;
}

double ConfigFile::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "' is not a number: '" + v + "'");
    return out;
}

long long ConfigFile::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "' is not an integer: '" + v + "'");
    return out;
}

bool ConfigFile::get_bool(const std::string& key) const {
    const std::string v = get_string(key);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError("config key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> ConfigFile::get_doubles(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        auto comma = v.find(',', pos);
        if (comma == std::string::npos) comma = v.size();
        const std::string item = trim(v.substr(pos, comma - pos));
        if (item.empty())
            throw ConfigError("config key '" + key + "' has an empty list element");
        double x = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), x);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
            throw ConfigError("config key '" + key + "' has a non-numeric element: '" + item +
                              "'");
        out.push_back(x);
        pos = comma + 1;
    }
    return out;
}

std::string ConfigFile::get_string_or(const std::string& key, const std::string& fallback) const {
    const auto v = find(key);
    return v ? *v : fallback;
}

double ConfigFile::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long ConfigFile::get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

} // namespace kgc
