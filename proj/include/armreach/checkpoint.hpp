// Copyright 2026 The armreach Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Agent checkpoint file, little-endian:
//
//   "RDQN" | u32 version | u32 C,H,W | u32 actions | u32 layer count
//   per layer: u32 kind (1 conv, 2 linear) | u32 stride | u32 rank | u64 dims[rank]
//   u64 step | str rng state | str agent config | str metadata
//   per layer: f32 weights | f32 biases
//   u64 FNV-1a of the parameter bytes
//
// `str` is a u64 byte length followed by the bytes. A `<file>.txt` sidecar
// repeats the metadata in readable form.

#ifndef ARMREACH_CHECKPOINT_HPP
#define ARMREACH_CHECKPOINT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "armreach/agent.hpp"
#include "armreach/binary_io.hpp"

namespace armreach {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMetadata {
  std::uint64_t step = 0;
  std::string rng_state;
  std::map<std::string, std::string> fields;
};

struct Checkpoint {
  QNetwork network;
  AgentConfig config;
  CheckpointMetadata metadata;
};

/// Writes atomically via a temporary file in the same directory.
void save_checkpoint(const std::filesystem::path& path, const QNetwork& network, const AgentConfig& config,
                     const CheckpointMetadata& metadata);

/// Throws FormatError on a truncated, corrupt or wrong-version file.
Checkpoint load_checkpoint(const std::filesystem::path& path);
/// Additionally rejects a file whose architecture differs from `expected`.
Checkpoint load_checkpoint(const std::filesystem::path& path, const NetworkArchitecture& expected);

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);

}  // namespace armreach

#endif  // ARMREACH_CHECKPOINT_HPP
