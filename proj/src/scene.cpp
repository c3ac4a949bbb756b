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

#include "trajbench/scene.hpp"

#include "trajbench/errors.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace trajbench
{

double wrap_angle(double angle)
{
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) {
    wrapped += 2.0 * kPi;
  }
  return wrapped;
}

std::array<double, kAgentTypeCount> one_hot(AgentType type)
{
  std::array<double, kAgentTypeCount> code{};
  code[static_cast<std::size_t>(type)] = 1.0;
  return code;
}

std::string_view to_string(AgentType type)
{
  switch (type) {
    case AgentType::kUnset:
      return "unset";
    case AgentType::kVehicle:
      return "vehicle";
    case AgentType::kPedestrian:
      return "pedestrian";
    case AgentType::kCyclist:
      return "cyclist";
    case AgentType::kOther:
      return "other";
  }
  return "unset";
}

AgentType agent_type_from_string(std::string_view name)
{
  for (auto type : {AgentType::kUnset, AgentType::kVehicle, AgentType::kPedestrian,
                    AgentType::kCyclist, AgentType::kOther}) {
    if (to_string(type) == name) {
      return type;
    }
  }
  throw DataError("unknown agent type '" + std::string(name) + "'");
}

std::string_view to_string(PolylineType type)
{
  switch (type) {
    case PolylineType::kLaneCenter:
      return "lane_center";
    case PolylineType::kRoadEdge:
      return "road_edge";
    case PolylineType::kCrosswalk:
      return "crosswalk";
  }
  return "lane_center";
}

PolylineType polyline_type_from_string(std::string_view name)
{
  for (auto type : {PolylineType::kLaneCenter, PolylineType::kRoadEdge, PolylineType::kCrosswalk}) {
    if (to_string(type) == name) {
      return type;
    }
  }
  throw DataError("unknown polyline type '" + std::string(name) + "'");
}

bool operator==(const AgentState & a, const AgentState & b)
{
  return a.position == b.position && a.heading == b.heading && a.velocity == b.velocity &&
         a.speed == b.speed && a.width == b.width && a.length == b.length && a.valid == b.valid;
}

bool operator==(const KinematicDelta & a, const KinematicDelta & b)
{
  return a.position == b.position && a.heading == b.heading && a.speed == b.speed &&
         a.validity == b.validity;
}

bool operator==(const AgentTrack & a, const AgentTrack & b)
{
  return a.id == b.id && a.type == b.type && a.states == b.states &&
         a.current_index == b.current_index && a.observed_truth == b.observed_truth &&
         a.deltas == b.deltas;
}

bool operator==(const Polyline & a, const Polyline & b)
{
  return a.type == b.type && a.points == b.points;
}

bool operator==(const RoadGraph & a, const RoadGraph & b) { return a.polylines == b.polylines; }

bool operator==(const Scene & a, const Scene & b)
{
  return a.id == b.id && a.road == b.road && a.tracks == b.tracks && a.targets == b.targets &&
         a.dt == b.dt;
}

const AgentTrack * Scene::find(AgentId agent) const
{
  for (const auto & t : tracks) {
    if (t.id == agent) {
      return &t;
    }
  }
  return nullptr;
}

AgentTrack * Scene::find(AgentId agent)
{
  for (auto & t : tracks) {
    if (t.id == agent) {
      return &t;
    }
  }
  return nullptr;
}

const AgentTrack & Scene::track(AgentId agent) const
{
  const auto * t = find(agent);
  if (t == nullptr) {
    throw DataError("scene '" + id + "': unknown agent id " + std::to_string(agent));
  }
  return *t;
}

AgentTrack & Scene::track(AgentId agent)
{
  auto * t = find(agent);
  if (t == nullptr) {
    throw DataError("scene '" + id + "': unknown agent id " + std::to_string(agent));
  }
  return *t;
}

HorizonSet HorizonSet::uniform(std::size_t steps, double dt)
{
  HorizonSet set;
  set.times.reserve(steps);
  for (std::size_t k = 1; k <= steps; ++k) {
    set.times.push_back(static_cast<double>(k) * dt);
  }
  return set;
}

namespace
{

bool finite(const Vec2 & v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

void check_state(
  const AgentTrack & track, std::size_t index, std::vector<Violation> & out)
{
  const auto & s = track.states[index];
  const auto where = "track " + std::to_string(track.id) + " state " + std::to_string(index);
  if (!s.valid) {
    if (!(s == AgentState::invalid())) {
      out.push_back({where, "invalid state is not zero-filled"});
    }
    return;
  }
  if (!finite(s.position) || !finite(s.velocity) || !std::isfinite(s.heading) ||
      !std::isfinite(s.speed) || !std::isfinite(s.width) || !std::isfinite(s.length)) {
    out.push_back({where, "non-finite field"});
    return;
  }
  if (!(s.width > 0.0) || !(s.length > 0.0)) {
    out.push_back({where, "width and length must be positive"});
  }
  if (!(s.heading > -kPi && s.heading <= kPi)) {
    out.push_back({where, "heading outside (-pi, pi]"});
  }
  if (std::abs(s.speed - s.velocity.norm()) > 1e-9) {
    out.push_back({where, "speed differs from velocity norm"});
  }
}

}  // namespace

std::vector<Violation> validate_scene(
  const Scene & scene, const std::optional<WindowConfig> & window)
{
  std::vector<Violation> out;
  const double dt = window ? window->dt : 0.1;
  if (std::abs(scene.dt - dt) > 1e-12) {
    out.push_back({"scene " + scene.id, "dt must be " + std::to_string(dt) + " s"});
  }
  if (scene.targets.empty()) {
    out.push_back({"scene " + scene.id, "no targets"});
  }

  std::set<AgentId> ids;
  for (const auto & track : scene.tracks) {
    if (!ids.insert(track.id).second) {
      out.push_back({"track " + std::to_string(track.id), "duplicate agent id"});
    }
  }

  const AgentTrack * reference = scene.tracks.empty() ? nullptr : &scene.tracks.front();
  for (const auto & track : scene.tracks) {
    const auto where = "track " + std::to_string(track.id);
    if (track.current_index >= track.states.size()) {
      out.push_back({where, "current_index out of range"});
      continue;
    }
    if (window) {
      if (track.observed_count() != window->history || track.future_count() != window->future) {
        out.push_back({where, "window lengths differ from dataset configuration"});
      }
    } else if (
      track.states.size() != reference->states.size() ||
      track.current_index != reference->current_index) {
      out.push_back({where, "window lengths differ between tracks"});
    }
    if (!track.observed_truth.empty() && track.observed_truth.size() != track.observed_count()) {
      out.push_back({where, "observed_truth length differs from observed window"});
    }
    for (std::size_t i = 0; i < track.states.size(); ++i) {
      check_state(track, i, out);
    }
  }

  for (const auto target : scene.targets) {
    const auto * track = scene.find(target);
    if (track == nullptr) {
      out.push_back({"target " + std::to_string(target), "target id has no track"});
    } else if (track->current_index < track->states.size() && !track->current().valid) {
      out.push_back({"target " + std::to_string(target), "current state is invalid"});
    }
  }

  for (std::size_t p = 0; p < scene.road.polylines.size(); ++p) {
    const auto & line = scene.road.polylines[p];
    const auto where = "polyline " + std::to_string(p);
    if (line.points.size() < 2) {
      out.push_back({where, "fewer than 2 points"});
    }
    for (const auto & pt : line.points) {
      if (!finite(pt)) {
        out.push_back({where, "non-finite point"});
        break;
      }
    }
  }
  return out;
}

AgentTrack derive_kinematics(AgentTrack track)
{
  for (auto & s : track.states) {
    if (s.valid && std::isnan(s.speed)) {
      s.speed = s.velocity.norm();
    }
  }
  const std::size_t n = track.observed_count();
  track.deltas.assign(n, KinematicDelta{});
  for (std::size_t t = 1; t < n; ++t) {
    const auto & prev = track.states[t - 1];
    const auto & cur = track.states[t];
    auto & d = track.deltas[t];
    d.validity = (cur.valid ? 1.0 : 0.0) - (prev.valid ? 1.0 : 0.0);
    if (cur.valid && prev.valid) {
      d.position = cur.position - prev.position;
      d.heading = wrap_angle(cur.heading - prev.heading);
      d.speed = cur.speed - prev.speed;
    }
  }
  return track;
}

Scene derive_kinematics(Scene scene)
{
  for (auto & track : scene.tracks) {
    track = derive_kinematics(std::move(track));
  }
  return scene;
}

}  // namespace trajbench
