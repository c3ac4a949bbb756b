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

#ifndef TRAJBENCH__SCENE_IO_HPP_
#define TRAJBENCH__SCENE_IO_HPP_

#include "trajbench/scene.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace trajbench
{

constexpr int kSceneFormatVersion = 1;

// Scene files are JSON lines. The first line is a header
//   {"format":"trb-scenes","version":1,"count":N}
// followed by one scene object per line. Agent states are arrays
//   [x, y, heading, vx, vy, speed, width, length, valid]
// in metres, radians and m/s; valid is 0 or 1. Deltas are
//   [dx, dy, dheading, dspeed, dvalid].
// Doubles are written in shortest round-trip form; NaN is written as null.

std::string scene_to_json(const Scene & scene);
/// Throws DataError on malformed records.
Scene scene_from_json(const std::string & line);

void write_scenes(std::span<const Scene> scenes, std::ostream & out);
/// Throws IoError when the file cannot be written.
void write_scenes(std::span<const Scene> scenes, const std::filesystem::path & path);

/// Throws DataError with the 1-based line number on malformed records or a
/// header with another format or version.
std::vector<Scene> read_scenes(std::istream & in);
/// Throws IoError when the file cannot be opened.
std::vector<Scene> read_scenes(const std::filesystem::path & path);

}  // namespace trajbench

#endif  // TRAJBENCH__SCENE_IO_HPP_
