#pragma once

#include <filesystem>
#include <string>

#include "eegrc/uercm.hpp"

namespace eegrc::uercm {

// Layout: "UERCM\0", u32 version, u32 length + JSON config, u32 tensor
// count, then per tensor: u32 name length, name, u32 ndims, u32 dims...,
// little-endian f64 data in row-major order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::string task;  // "sentence" or "token"
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws StructuralError on any shape or framing mismatch.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace eegrc::uercm
