#pragma once

#include <string>

namespace kgc {

// SHA-1 digest of a byte string, lowercase hex.
std::string sha1_hex(const std::string& data);

// Content hash in git blob style: sha1("blob <size>\0<content>"), so hashes
// recorded in manifests can be cross-checked with `git hash-object`.
std::string blob_hash(const std::string& content);

} // namespace kgc
