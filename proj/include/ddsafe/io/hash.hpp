#pragma once

#include <string>
#include <string_view>

namespace ddsafe::io {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents; throws ConfigError if it cannot be read.
std::string sha256_file(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace ddsafe::io
