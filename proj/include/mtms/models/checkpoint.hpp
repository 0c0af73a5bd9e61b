#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtms/models/params.hpp"

namespace mtms::models {

// Binary checkpoint, little-endian:
//   "MTMSCKPT" | u32 version (1) | config record | u64 seed |
//   u32 metadata length | metadata JSON bytes | u32 array count |
//   per array in for_each_param order: u32 rows | u32 cols | rows*cols f64
// The config record is u32 arch, input_dim, num_stages, layers_per_stage,
// filters, kernel, num_phases, num_steps, multi_task, task, lstm_hidden,
// framewise_hidden, then f64 dropout.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  std::uint64_t seed = 0;
  // Run configuration that produced the weights.
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace mtms::models
