#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "fogsim/raster.hpp"

namespace fogsim {

/// Lower-case hex SHA-256 of a byte buffer.
std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

/// Digest of a grid's shape and raw IEEE-754 value bytes.
std::string grid_digest(const ScalarGrid& grid);

/// Stable 64-bit hash of a string (leading 8 bytes of its SHA-256, big-endian).
std::uint64_t stable_hash64(std::string_view text);

}  // namespace fogsim
