#include "kgc/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgc/errors.hpp"
#include "kgc/serialize.hpp"

namespace kgc {

void Manifest::set(const std::string& key, std::string value) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const auto& e) { return e.first == key; });
    if (it != entries_.end()) {
        it->second = std::move(value);
    } else {
        entries_.emplace_back(key, std::move(value));
    }
}

void Manifest::set(const std::string& key, const char* value) {
    set(key, std::string(value));
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set(const std::string& key, long long value) {
    set(key, std::to_string(value));
}

void Manifest::set(const std::string& key, std::size_t value) {
    set(key, std::to_string(value));
}

void Manifest::set(const std::string& key, int value) { set(key, std::to_string(value)); }

void Manifest::set_verdict(const std::string& check, bool pass) {
    set("check." + check, pass ? std::string("PASS") : std::string("FAIL"));
}

const std::string* Manifest::find(const std::string& key) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const auto& e) { return e.first == key; });
    return it == entries_.end() ? nullptr : &it->second;
}

bool Manifest::volatile_key(const std::string& key) {
    return key == "run.started_at" || key == "run.finished_at" || key == "run.wall_seconds";
}

std::string Manifest::text() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::string Manifest::stable_text() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        if (volatile_key(k)) continue;
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

void Manifest::write(const std::string& path) const {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << text();
        os.flush();
        if (!os) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

Manifest Manifest::parse(const std::string& text) {
    Manifest m;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto sep = line.find(" = ");
        if (sep == std::string::npos)
            throw Error("manifest line " + std::to_string(lineno) +
                        " is not `key = value`: " + line);
        m.entries_.emplace_back(line.substr(0, sep), line.substr(sep + 3));
    }
    return m;
}

Manifest Manifest::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open manifest " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace kgc
