#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrunet/net.hpp"

namespace mrunet {

// Binary checkpoint layout, all integers little-endian:
//   "MRUN" | u32 version (=1) | u32 tensor count
//   per tensor: u16 name length | UTF-8 name | u8 rank | u32 dims[rank] | f32 values (row-major)

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const Model<float>& model);

/// Parses the tensors of a checkpoint and validates them against `spec`.
/// Throws FormatError for malformed bytes and CompatibilityError when names or
/// shapes differ from the layout of `spec`.
Model<float> decode_checkpoint(const std::vector<std::uint8_t>& bytes, const ArchitectureSpec& spec);

/// Throws IoError when the file cannot be written.
void save_weights(const Model<float>& model, const std::filesystem::path& path);

Model<float> load_weights(const std::filesystem::path& path, const ArchitectureSpec& spec);

} // namespace mrunet
