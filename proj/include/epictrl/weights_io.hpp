#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "epictrl/network.hpp"

namespace epictrl {

// Archive layout, all integers little-endian:
//   "EPICTRL-W" | u32 version | sizes | records... | u64 FNV-1a of everything before it
// sizes:  u32 input_width, seq_len, hidden, recurrent_layers, dense count,
//         dense widths..., outputs
// record: u32 name length | name | u32 rank | u64 dims... | f64 values (row-major)
inline constexpr std::string_view kWeightsMagic = "EPICTRL-W";
inline constexpr std::uint32_t kWeightsVersion = 1;

std::vector<std::uint8_t> encode_weights(const NetworkParams& params);

/// Throws FormatError on bad magic, version, checksum, truncation or shapes.
NetworkParams decode_weights(std::span<const std::uint8_t> bytes);

/// Throws IoError when the file cannot be written.
void save_weights(const NetworkParams& params, const std::filesystem::path& path);

/// Throws IoError when unreadable, FormatError when malformed.
NetworkParams load_weights(const std::filesystem::path& path);

} // namespace epictrl
