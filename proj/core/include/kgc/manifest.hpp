#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kgc {

// Plain-text run record, one `key = value` line per entry, insertion order
// preserved.  Repeated set() calls on the same key update in place, so the
// record a run writes at the end reflects its final knowledge.
//
// Wall-clock entries (started/finished timestamps, elapsed seconds) are
// declared volatile: `stable_text()` omits them, and that is the form two
// runs of the same config are expected to match bitwise regardless of thread
// count or machine load.
class Manifest {
public:
    void set(const std::string& key, std::string value);
    void set(const std::string& key, const char* value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    void set(const std::string& key, std::size_t value);
    void set(const std::string& key, int value);
    void set_verdict(const std::string& check, bool pass);

    const std::string* find(const std::string& key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string text() const;
    std::string stable_text() const;

    // Atomic write: the content lands under a temporary name in the target
    // directory and is renamed over `path`, so readers never see a partial
    // manifest.
    void write(const std::string& path) const;

    static Manifest parse(const std::string& text);
    static Manifest load(const std::string& path);

    static bool volatile_key(const std::string& key);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Current UTC wall time, ISO-8601 (e.g. 2025-03-14T09:26:53Z).
std::string utc_timestamp();

} // namespace kgc
