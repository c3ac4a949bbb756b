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

#ifndef TRAJBENCH__SCENE_HPP_
#define TRAJBENCH__SCENE_HPP_

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajbench
{

using Vec2 = Eigen::Vector2d;
using AgentId = std::int64_t;

constexpr double kPi = std::numbers::pi;

/// Wraps an angle in radians into (-pi, pi].
double wrap_angle(double angle);

enum class AgentType : std::uint8_t { kUnset, kVehicle, kPedestrian, kCyclist, kOther };

constexpr std::size_t kAgentTypeCount = 5;

std::array<double, kAgentTypeCount> one_hot(AgentType type);
std::string_view to_string(AgentType type);
AgentType agent_type_from_string(std::string_view name);

/**
 * @brief Observed or ground-truth state of one agent at one time step.
 *
 * Heading is in radians, counterclockwise from +x, in (-pi, pi]. Invalid
 * states are zero-filled; `valid` carries the missing-data information.
 */
struct AgentState
{
  Vec2 position{0.0, 0.0};
  double heading{0.0};
  Vec2 velocity{0.0, 0.0};
  double speed{0.0};
  double width{0.0};
  double length{0.0};
  bool valid{false};

  static AgentState invalid() { return AgentState{}; }
};

bool operator==(const AgentState & a, const AgentState & b);

/// Change of a state with respect to the previous time step.
struct KinematicDelta
{
  Vec2 position{0.0, 0.0};
  double heading{0.0};
  double speed{0.0};
  double validity{0.0};
};

bool operator==(const KinematicDelta & a, const KinematicDelta & b);

struct AgentTrack
{
  AgentId id{0};
  AgentType type{AgentType::kUnset};
  // Observed window followed by the future window, sampled at the scene dt.
  std::vector<AgentState> states;
  std::size_t current_index{0};
  // Noise-free positions for the observed window; empty when unknown.
  std::vector<Vec2> observed_truth;
  // One entry per observed step once derive_kinematics has run.
  std::vector<KinematicDelta> deltas;

  const AgentState & current() const { return states.at(current_index); }
  std::size_t observed_count() const { return current_index + 1; }
  std::size_t future_count() const { return states.size() - observed_count(); }
  std::span<const AgentState> observed() const
  {
    return std::span<const AgentState>(states).first(observed_count());
  }
  std::span<const AgentState> future() const
  {
    return std::span<const AgentState>(states).subspan(observed_count());
  }
  bool has_kinematics() const { return deltas.size() == observed_count(); }
};

bool operator==(const AgentTrack & a, const AgentTrack & b);

enum class PolylineType : std::uint8_t { kLaneCenter, kRoadEdge, kCrosswalk };

constexpr std::size_t kPolylineTypeCount = 3;

std::string_view to_string(PolylineType type);
PolylineType polyline_type_from_string(std::string_view name);

struct Polyline
{
  PolylineType type{PolylineType::kLaneCenter};
  std::vector<Vec2> points;
};

bool operator==(const Polyline & a, const Polyline & b);

struct RoadGraph
{
  std::vector<Polyline> polylines;

  bool empty() const { return polylines.empty(); }
};

bool operator==(const RoadGraph & a, const RoadGraph & b);

/// Dataset-level window configuration.
struct WindowConfig
{
  std::size_t history{11};
  std::size_t future{80};
  double dt{0.1};
};

/// One prediction instance.
struct Scene
{
  std::string id;
  RoadGraph road;
  std::vector<AgentTrack> tracks;
  std::vector<AgentId> targets;
  double dt{0.1};

  const AgentTrack * find(AgentId id) const;
  AgentTrack * find(AgentId id);
  // Throws DataError for unknown ids.
  const AgentTrack & track(AgentId id) const;
  AgentTrack & track(AgentId id);
};

bool operator==(const Scene & a, const Scene & b);

/// Prediction horizons in seconds.
struct HorizonSet
{
  std::vector<double> times;

  // {k * dt | k = 1..steps}; the default is {0.1, ..., 8.0}.
  static HorizonSet uniform(std::size_t steps = 80, double dt = 0.1);
  std::size_t size() const { return times.size(); }
};

struct Violation
{
  std::string where;
  std::string what;
};

/// Empty iff every data-model invariant holds. Without a window the track
/// lengths are only checked for mutual consistency and dt must be 0.1 s.
std::vector<Violation> validate_scene(
  const Scene & scene, const std::optional<WindowConfig> & window = std::nullopt);

AgentTrack derive_kinematics(AgentTrack track);
Scene derive_kinematics(Scene scene);

}  // namespace trajbench

#endif  // TRAJBENCH__SCENE_HPP_
