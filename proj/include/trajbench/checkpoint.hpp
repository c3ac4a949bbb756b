// Copyright 2026 The trajbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJBENCH__CHECKPOINT_HPP_
#define TRAJBENCH__CHECKPOINT_HPP_

#include "trajbench/recurrent_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace trajbench
{

constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (all integers and floats little-endian):
//   "TRBCKPT\0" | u32 version | u64 payload bytes | payload | u32 crc32(payload)
// The payload holds the model configuration, both normalizers and every
// parameter tensor as (name, rows, cols, column-major f64 values).
std::string serialize_checkpoint(const RecurrentModel & model);
// Throws IoError on malformed bytes.
RecurrentModel deserialize_checkpoint(const std::string & bytes);

/// Throws IoError when the file cannot be written.
void save_checkpoint(const RecurrentModel & model, const std::filesystem::path & path);

/// Throws IoError when the file cannot be read and on a version mismatch,
/// checksum failure, truncation or layout mismatch.
RecurrentModel load_checkpoint(const std::filesystem::path & path);

}  // namespace trajbench

#endif  // TRAJBENCH__CHECKPOINT_HPP_
