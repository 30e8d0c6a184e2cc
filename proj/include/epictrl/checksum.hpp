#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace epictrl {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/// Checksum of a file's contents. Throws IoError.
std::uint64_t file_checksum(const std::filesystem::path& path);

/// Lowercase, zero-padded 16-digit hex.
std::string to_hex(std::uint64_t value);

} // namespace epictrl
