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

#ifndef TRAJBENCH__SYNTHGEN_HPP_
#define TRAJBENCH__SYNTHGEN_HPP_

#include "trajbench/scene.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace trajbench
{

struct LayoutMix
{
  double straight{1.0};
  double arc{1.5};
  double intersection{1.5};

  bool operator==(const LayoutMix &) const = default;
};

struct BehaviorMix
{
  double constant_velocity{0.2};
  double accelerating{0.15};
  double turning{0.4};
  double lane_change{0.15};
  double crossing_pedestrian{0.1};

  bool operator==(const BehaviorMix &) const = default;
};

/// Synthetic dataset parameters. Noise is added to observed states only.
struct GenConfig
{
  std::size_t scenes{2000};
  LayoutMix layouts;
  BehaviorMix behaviors;
  std::size_t min_agents{3};
  std::size_t max_agents{8};
  // Targets per scene: the first min(max_targets, agents) agents.
  std::size_t max_targets{3};
  double sigma_pos{0.1};      // m
  double sigma_heading{0.02}; // rad
  double sigma_vel{0.1};      // m/s
  // Distance between sampled lane-center and road-edge points (m).
  double road_spacing{6.0};
  std::uint64_t seed{1};
  WindowConfig window;
  // Scene ids are `prefix` followed by a zero-padded index.
  std::string id_prefix{"scene-"};

  // Throws ConfigError on negative or all-zero weights, empty ranges or
  // negative noise.
  void validate() const;

  bool operator==(const GenConfig &) const = default;
};

/// Scene `index` of the dataset described by `config`; depends only on
/// (config, index).
Scene generate_scene(const GenConfig & config, std::size_t index);

/// `config.scenes` scenes in index order, built on `jobs` threads.
std::vector<Scene> generate_dataset(const GenConfig & config, std::size_t jobs = 1);

/// Lane-center polylines are sampled from these paths; exposed for tests.
struct PathSegment
{
  Vec2 start{0.0, 0.0};
  double heading{0.0};
  double length{0.0};
  // Signed curvature (1/m), positive to the left; zero for straight segments.
  double curvature{0.0};

  Vec2 position(double s) const;
  double heading_at(double s) const;
  Vec2 end() const { return position(length); }
  double end_heading() const { return heading_at(length); }
};

/// Chain of line and arc segments parametrized by arc length. Positions
/// outside [0, length()] extend the first or last heading in a straight line.
class Path
{
public:
  Path() = default;
  explicit Path(std::vector<PathSegment> segments);

  double length() const { return length_; }
  const std::vector<PathSegment> & segments() const { return segments_; }

  Vec2 position(double s) const;
  double heading(double s) const;

  // Same geometry traversed in the opposite direction.
  Path reversed() const;
  // Path shifted by `offset` to the left of the direction of travel.
  Path offset(double offset) const;
  // Points at most `spacing` apart along the path; arcs also at most 15 degrees.
  std::vector<Vec2> sample(double spacing) const;

private:
  std::vector<PathSegment> segments_;
  double length_{0.0};
};

}  // namespace trajbench

#endif  // TRAJBENCH__SYNTHGEN_HPP_
