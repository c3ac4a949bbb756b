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

#include "trajbench/synthgen.hpp"

#include "trajbench/errors.hpp"
#include "trajbench/parallel.hpp"
#include "trajbench/perturb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

namespace trajbench
{

Vec2 PathSegment::position(double s) const
{
  if (curvature == 0.0) {
    return start + s * Vec2(std::cos(heading), std::sin(heading));
  }
  const double h = heading + curvature * s;
  return start +
         Vec2(std::sin(h) - std::sin(heading), std::cos(heading) - std::cos(h)) / curvature;
}

double PathSegment::heading_at(double s) const
{
  return heading + curvature * s;
}

Path::Path(std::vector<PathSegment> segments) : segments_(std::move(segments))
{
  for (const auto & s : segments_) {
    length_ += s.length;
  }
}

Vec2 Path::position(double s) const
{
  if (s < 0.0) {
    const auto & first = segments_.front();
    return first.start + s * Vec2(std::cos(first.heading), std::sin(first.heading));
  }
  double base = 0.0;
  for (const auto & seg : segments_) {
    if (s <= base + seg.length) {
      return seg.position(s - base);
    }
    base += seg.length;
  }
  const auto & last = segments_.back();
  const double h = last.end_heading();
  return last.end() + (s - length_) * Vec2(std::cos(h), std::sin(h));
}

double Path::heading(double s) const
{
  if (s < 0.0) {
    return segments_.front().heading;
  }
  double base = 0.0;
  for (const auto & seg : segments_) {
    if (s <= base + seg.length) {
      return seg.heading_at(s - base);
    }
    base += seg.length;
  }
  return segments_.back().end_heading();
}

Path Path::reversed() const
{
  std::vector<PathSegment> out;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    out.push_back({it->end(), it->end_heading() + kPi, it->length, -it->curvature});
  }
  return Path(std::move(out));
}

Path Path::offset(double d) const
{
  std::vector<PathSegment> out;
  for (const auto & seg : segments_) {
    const Vec2 normal(-std::sin(seg.heading), std::cos(seg.heading));
    const double scale = 1.0 - seg.curvature * d;
    out.push_back({seg.start + d * normal, seg.heading, seg.length * scale, seg.curvature / scale});
  }
  return Path(std::move(out));
}

std::vector<Vec2> Path::sample(double spacing) const
{
  std::vector<Vec2> points;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto & seg = segments_[i];
    // Arcs are sampled at most 15 degrees apart.
    const double step =
      seg.curvature == 0.0 ? spacing : std::min(spacing, (kPi / 12) / std::abs(seg.curvature));
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(seg.length / step)));
    for (std::size_t k = (i == 0 ? 0 : 1); k <= n; ++k) {
      points.push_back(seg.position(seg.length * static_cast<double>(k) / static_cast<double>(n)));
    }
  }
  return points;
}

void GenConfig::validate() const
{
  const std::array<double, 3> layout_w{layouts.straight, layouts.arc, layouts.intersection};
  const std::array<double, 5> behavior_w{
    behaviors.constant_velocity, behaviors.accelerating, behaviors.turning, behaviors.lane_change,
    behaviors.crossing_pedestrian};
  const auto check = [](auto weights, const char * what) {
    double total = 0.0;
    for (const double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ConfigError(std::string("generate: negative or non-finite ") + what + " weight");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw ConfigError(std::string("generate: at least one ") + what + " weight must be positive");
    }
  };
  check(layout_w, "layout");
  check(behavior_w, "behavior");
  if (scenes == 0 || min_agents == 0 || max_agents < min_agents || max_targets == 0) {
    throw ConfigError("generate: scene, agent and target counts must be >= 1 with min <= max");
  }
  if (!(sigma_pos >= 0.0) || !(sigma_heading >= 0.0) || !(sigma_vel >= 0.0)) {
    throw ConfigError("generate: noise levels must be non-negative");
  }
  if (!(road_spacing > 0.0)) {
    throw ConfigError("generate: road_spacing must be positive");
  }
  if (window.history == 0 || window.future == 0 || !(window.dt > 0.0)) {
    throw ConfigError("generate: window must have observed and future steps and dt > 0");
  }
}

namespace
{

constexpr double kLaneWidth = 3.5;

Path line(Vec2 start, double heading, double length)
{
  return Path({{start, heading, length, 0.0}});
}

Path transformed(const Path & path, double angle, bool mirror)
{
  // Exact values for quarter turns keep intersection geometry symmetric.
  const double c = std::abs(std::remainder(angle, kPi / 2)) < 1e-15 ? std::round(std::cos(angle)) : std::cos(angle);
  const double s = std::abs(std::remainder(angle, kPi / 2)) < 1e-15 ? std::round(std::sin(angle)) : std::sin(angle);
  std::vector<PathSegment> out;
  for (auto seg : path.segments()) {
    if (mirror) {
      seg.start.y() = -seg.start.y();
      seg.heading = -seg.heading;
      seg.curvature = -seg.curvature;
    }
    seg.start = Vec2(c * seg.start.x() - s * seg.start.y(), s * seg.start.x() + c * seg.start.y());
    seg.heading += angle;
    out.push_back(seg);
  }
  return Path(std::move(out));
}

struct TurnRoute
{
  Path path;
  double turn_start{0.0};
  double turn_length{0.0};
  double radius{0.0};
};

struct LaneChangeRoute
{
  Path lane;
  double shift{0.0};  // lateral target offset, positive to the left
};

struct Layout
{
  std::vector<Polyline> polylines;
  std::vector<Path> stretches;
  std::vector<TurnRoute> turns;
  std::vector<LaneChangeRoute> lane_changes;
  std::vector<Path> crosswalks;

  double spacing{4.0};

  void add(PolylineType type, const Path & path) { polylines.push_back({type, path.sample(spacing)}); }
  void add_crosswalk(const Path & path)
  {
    polylines.push_back({PolylineType::kCrosswalk, path.sample(2.0)});
    crosswalks.push_back(path);
    crosswalks.push_back(path.reversed());
  }
};

double uniform(std::mt19937_64 & rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64 & rng, std::size_t n)
{
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

Layout straight_layout(double spacing, std::mt19937_64 & rng)
{
  Layout layout;
  layout.spacing = spacing;
  const int lanes = uniform(rng, 0.0, 1.0) < 0.4 ? 1 : 2;
  constexpr double half = 120.0;
  for (int i = 0; i < lanes; ++i) {
    const double d = kLaneWidth / 2 + kLaneWidth * i;
    const auto east = line({-half, -d}, 0.0, 2 * half);
    const auto west = line({half, d}, kPi, 2 * half);
    for (const auto & lane : {east, west}) {
      layout.add(PolylineType::kLaneCenter, lane);
      layout.stretches.push_back(lane);
    }
    if (lanes == 2) {
      // Lane 0 is next to the median; moving out is a shift to the right.
      const double shift = i == 0 ? -kLaneWidth : kLaneWidth;
      layout.lane_changes.push_back({east, shift});
      layout.lane_changes.push_back({west, shift});
    }
  }
  const double edge = kLaneWidth * lanes;
  layout.add(PolylineType::kRoadEdge, line({-half, -edge}, 0.0, 2 * half));
  layout.add(PolylineType::kRoadEdge, line({-half, edge}, 0.0, 2 * half));
  const double cx = uniform(rng, -60.0, 60.0);
  const auto crosswalk = line({cx, -edge - 1.5}, kPi / 2, 2 * edge + 3.0);
  layout.add_crosswalk(crosswalk);
  return layout;
}

Layout arc_layout(double spacing, std::mt19937_64 & rng)
{
  Layout layout;
  layout.spacing = spacing;
  const int lanes = uniform(rng, 0.0, 1.0) < 0.5 ? 1 : 2;
  const double radius = uniform(rng, 40.0, 100.0);
  const double angle = uniform(rng, kPi / 3, 5 * kPi / 6);
  const bool mirror = uniform(rng, 0.0, 1.0) < 0.5;
  const double rotation = 0.0;
  constexpr double straight = 120.0;
  const Path reference({
    {{-straight, 0.0}, 0.0, straight, 0.0},
    {{0.0, 0.0}, 0.0, radius * angle, 1.0 / radius},
  });
  // Exit straight continues from the end of the arc.
  const auto & arc = reference.segments()[1];
  const Path full({
    reference.segments()[0],
    arc,
    {arc.end(), arc.end_heading(), straight, 0.0},
  });
  const auto place = [&](const Path & p) { return transformed(p, rotation, mirror); };
  for (int i = 0; i < lanes; ++i) {
    const double d = kLaneWidth / 2 + kLaneWidth * i;
    const auto forward = place(full.offset(-d));
    const auto backward = place(full.offset(d).reversed());
    for (const auto & lane : {forward, backward}) {
      layout.add(PolylineType::kLaneCenter, lane);
      const auto & segs = lane.segments();
      layout.stretches.push_back(Path({segs[0]}));
      layout.stretches.push_back(Path({segs[2]}));
      layout.turns.push_back({lane, segs[0].length, segs[1].length, 1.0 / std::abs(segs[1].curvature)});
    }
  }
  const double edge = kLaneWidth * lanes;
  layout.add(PolylineType::kRoadEdge, place(full.offset(-edge)));
  layout.add(PolylineType::kRoadEdge, place(full.offset(edge)));
  const double cx = uniform(rng, -100.0, -20.0);
  const auto crosswalk = place(line({cx, -edge - 1.5}, kPi / 2, 2 * edge + 3.0));
  layout.add_crosswalk(crosswalk);
  return layout;
}

Layout intersection_layout(double spacing)
{
  Layout layout;
  layout.spacing = spacing;
  constexpr double half = kLaneWidth / 2;
  constexpr double arm = 100.0;
  constexpr double box = 7.75;
  constexpr double right_radius = box - half;
  constexpr double left_radius = box + half;
  const double approach = arm - box;
  for (int q = 0; q < 4; ++q) {
    const double rot = q * kPi / 2;
    const auto place = [&](const Path & p) { return transformed(p, rot, false); };
    // Arm on the -x side, traffic entering eastbound at y = -half.
    const auto in_lane = line({-arm, -half}, 0.0, approach);
    const auto out_lane = line({-box, half}, kPi, approach);
    layout.add(PolylineType::kLaneCenter, place(in_lane));
    layout.add(PolylineType::kLaneCenter, place(out_lane));
    layout.add(PolylineType::kLaneCenter, place(line({-box, -half}, 0.0, 2 * box)));
    const Path right({
      {{-arm, -half}, 0.0, approach, 0.0},
      {{-box, -half}, 0.0, right_radius * kPi / 2, -1.0 / right_radius},
      {{-half, -box}, -kPi / 2, approach, 0.0},
    });
    const Path left({
      {{-arm, -half}, 0.0, approach, 0.0},
      {{-box, -half}, 0.0, left_radius * kPi / 2, 1.0 / left_radius},
      {{half, box}, kPi / 2, approach, 0.0},
    });
    layout.add(PolylineType::kLaneCenter, place(Path({right.segments()[1]})));
    layout.add(PolylineType::kLaneCenter, place(Path({left.segments()[1]})));
    layout.turns.push_back({place(right), approach, right.segments()[1].length, right_radius});
    layout.turns.push_back({place(left), approach, left.segments()[1].length, left_radius});
    layout.stretches.push_back(place(line({-arm, -half}, 0.0, 2 * arm)));
    layout.add(PolylineType::kRoadEdge, place(line({-arm, -kLaneWidth}, 0.0, approach)));
    layout.add(PolylineType::kRoadEdge, place(line({-arm, kLaneWidth}, 0.0, approach)));
    const auto crosswalk = place(line({-box - 2.5, -kLaneWidth - 1.0}, kPi / 2, 2 * kLaneWidth + 2.0));
    layout.add_crosswalk(crosswalk);
  }
  return layout;
}

enum class Behavior { kConstantVelocity, kAccelerating, kTurning, kLaneChange, kCrossing };

// Arc-length motion along a path with an optional lateral shift.
struct Motion
{
  Path path;
  double s0{0.0};    // arc length at t = 0
  double u0{0.0};    // speed at t = 0
  double accel{0.0};
  double shift{0.0};
  double shift_start{0.0};
  double shift_duration{1.0};

  double speed(double t) const { return std::max(0.0, u0 + accel * t); }

  double distance(double t) const
  {
    if (accel < 0.0) {
      const double t_stop = u0 / -accel;
      const double tt = std::min(t, t_stop);
      return s0 + u0 * tt + 0.5 * accel * tt * tt;
    }
    return s0 + u0 * t + 0.5 * accel * t * t;
  }

  AgentState state(double t) const
  {
    const double s = distance(t);
    const double sdot = speed(t);
    const double h = path.heading(s);
    const Vec2 tangent(std::cos(h), std::sin(h));
    const Vec2 normal(-tangent.y(), tangent.x());
    double d = 0.0;
    double ddot = 0.0;
    if (shift != 0.0) {
      const double tau = std::clamp((t - shift_start) / shift_duration, 0.0, 1.0);
      d = shift * 0.5 * (1.0 - std::cos(kPi * tau));
      if (tau > 0.0 && tau < 1.0) {
        ddot = shift * 0.5 * kPi / shift_duration * std::sin(kPi * tau);
      }
    }
    AgentState out;
    out.position = path.position(s) + d * normal;
    out.velocity = sdot * tangent + ddot * normal;
    out.heading = ddot == 0.0 ? h : h + std::atan2(ddot, sdot);
    out.speed = out.velocity.norm();
    out.valid = true;
    return out;
  }
};

double clamp_start(double lo, double hi, std::mt19937_64 & rng)
{
  return hi > lo ? uniform(rng, lo, hi) : lo;
}

Motion straight_motion(const Path & stretch, double u, double accel, std::mt19937_64 & rng)
{
  Motion m;
  m.path = stretch;
  m.u0 = u;
  m.accel = accel;
  const double back = -m.distance(-1.0);
  const double ahead = m.distance(8.0);
  m.s0 = clamp_start(back, stretch.length() - ahead, rng);
  return m;
}

struct AgentPlan
{
  AgentType type{AgentType::kVehicle};
  Motion motion;
  double width{0.0};
  double length{0.0};
};

AgentPlan plan_agent(const Layout & layout, Behavior behavior, std::mt19937_64 & rng)
{
  if (behavior == Behavior::kTurning && layout.turns.empty()) {
    behavior = Behavior::kAccelerating;
  }
  if (behavior == Behavior::kLaneChange && layout.lane_changes.empty()) {
    behavior = Behavior::kConstantVelocity;
  }
  if (behavior == Behavior::kCrossing && layout.crosswalks.empty()) {
    behavior = Behavior::kConstantVelocity;
  }

  AgentPlan plan;
  if (behavior == Behavior::kCrossing) {
    plan.type = AgentType::kPedestrian;
    plan.width = 0.6;
    plan.length = 0.6;
    const auto & walk = layout.crosswalks[pick(rng, layout.crosswalks.size())];
    const double u = uniform(rng, 0.8, 1.8);
    plan.motion.path = walk;
    plan.motion.u0 = u;
    plan.motion.s0 = clamp_start(u, 0.5 * walk.length(), rng);
    return plan;
  }

  const bool cyclist = uniform(rng, 0.0, 1.0) < 0.08;
  plan.type = cyclist ? AgentType::kCyclist : AgentType::kVehicle;
  plan.width = cyclist ? 0.7 : uniform(rng, 1.8, 2.2);
  plan.length = cyclist ? 1.8 : uniform(rng, 4.2, 5.2);
  const double u_max = cyclist ? 7.0 : 15.0;
  const double u_min = cyclist ? 2.0 : 3.0;

  switch (behavior) {
    case Behavior::kConstantVelocity: {
      const auto & stretch = layout.stretches[pick(rng, layout.stretches.size())];
      const double u = uniform(rng, u_min, std::min(u_max, stretch.length() / 9.5));
      plan.motion = straight_motion(stretch, u, 0.0, rng);
      break;
    }
    case Behavior::kAccelerating: {
      const auto & stretch = layout.stretches[pick(rng, layout.stretches.size())];
      const bool braking = uniform(rng, 0.0, 1.0) < 0.5;
      const double a = uniform(rng, 0.5, 2.5);
      const double u = braking ? uniform(rng, u_min, u_max) : uniform(rng, std::max(u_min, a + 0.5), u_max);
      plan.motion = straight_motion(stretch, u, braking ? -a : a, rng);
      break;
    }
    case Behavior::kTurning: {
      const auto & route = layout.turns[pick(rng, layout.turns.size())];
      const double top = std::min(u_max, std::sqrt(3.0 * route.radius));
      const double u = uniform(rng, std::max(2.0, 0.6 * top), top);
      plan.motion.path = route.path;
      plan.motion.u0 = u;
      plan.motion.s0 = route.turn_start - uniform(rng, -0.3 * route.turn_length, 6.0 * u);
      break;
    }
    case Behavior::kLaneChange: {
      const auto & route = layout.lane_changes[pick(rng, layout.lane_changes.size())];
      const double u = uniform(rng, std::max(u_min, 5.0), u_max);
      plan.motion = straight_motion(route.lane, u, 0.0, rng);
      plan.motion.shift = route.shift;
      plan.motion.shift_start = uniform(rng, -0.8, 3.0);
      plan.motion.shift_duration = uniform(rng, 3.0, 5.0);
      break;
    }
    case Behavior::kCrossing:
      break;
  }
  return plan;
}

Behavior sample_behavior(const BehaviorMix & mix, std::mt19937_64 & rng)
{
  std::discrete_distribution<int> d(
    {mix.constant_velocity, mix.accelerating, mix.turning, mix.lane_change, mix.crossing_pedestrian});
  return static_cast<Behavior>(d(rng));
}

}  // namespace

Scene generate_scene(const GenConfig & config, std::size_t index)
{
  std::mt19937_64 rng(derive_seed(config.seed, "scene", static_cast<std::int64_t>(index)));
  std::discrete_distribution<int> layout_dist(
    {config.layouts.straight, config.layouts.arc, config.layouts.intersection});
  const int layout_kind = layout_dist(rng);
  Layout layout = layout_kind == 0   ? straight_layout(config.road_spacing, rng)
                  : layout_kind == 1 ? arc_layout(config.road_spacing, rng)
                                     : intersection_layout(config.road_spacing);

  const double rotation = uniform(rng, -kPi, kPi);
  const Vec2 translation(uniform(rng, -1000.0, 1000.0), uniform(rng, -1000.0, 1000.0));
  Eigen::Matrix2d rot;
  rot << std::cos(rotation), -std::sin(rotation), std::sin(rotation), std::cos(rotation);

  Scene scene;
  char id[64];
  std::snprintf(id, sizeof(id), "%06zu", index);
  scene.id = config.id_prefix + id;
  scene.dt = config.window.dt;
  for (auto & poly : layout.polylines) {
    for (auto & p : poly.points) {
      p = rot * p + translation;
    }
  }
  scene.road.polylines = std::move(layout.polylines);

  const auto n_agents = std::uniform_int_distribution<std::size_t>(config.min_agents, config.max_agents)(rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t history = config.window.history;
  const std::size_t total = history + config.window.future;
  for (std::size_t a = 0; a < n_agents; ++a) {
    const auto plan = plan_agent(layout, sample_behavior(config.behaviors, rng), rng);
    AgentTrack track;
    track.id = static_cast<AgentId>(100 + a);
    track.type = plan.type;
    track.current_index = history - 1;
    for (std::size_t k = 0; k < total; ++k) {
      const double t = (static_cast<double>(k) - static_cast<double>(history - 1)) * config.window.dt;
      AgentState s = plan.motion.state(t);
      s.position = rot * s.position + translation;
      s.velocity = rot * s.velocity;
      s.speed = s.velocity.norm();
      s.heading = wrap_angle(s.heading + rotation);
      s.width = plan.width;
      s.length = plan.length;
      if (k < history) {
        track.observed_truth.push_back(s.position);
        s.position += config.sigma_pos * Vec2(noise(rng), noise(rng));
        s.heading = wrap_angle(s.heading + config.sigma_heading * noise(rng));
        s.velocity += config.sigma_vel * Vec2(noise(rng), noise(rng));
        s.speed = s.velocity.norm();
      }
      track.states.push_back(s);
    }
    scene.tracks.push_back(std::move(track));
  }
  for (std::size_t a = 0; a < std::min(config.max_targets, n_agents); ++a) {
    scene.targets.push_back(scene.tracks[a].id);
  }
  return scene;
}

std::vector<Scene> generate_dataset(const GenConfig & config, std::size_t jobs)
{
  config.validate();
  std::vector<Scene> scenes(config.scenes);
  parallel_for(config.scenes, jobs, [&](std::size_t i) { scenes[i] = generate_scene(config, i); });
  return scenes;
}

}  // namespace trajbench
