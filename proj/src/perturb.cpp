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

#include "trajbench/perturb.hpp"

#include "trajbench/errors.hpp"

#include <random>

namespace trajbench
{

std::string_view to_string(Perturbation::Kind kind)
{
  switch (kind) {
    case Perturbation::Kind::kRemoveRoad:
      return "remove_road";
    case Perturbation::Kind::kLateDetection:
      return "late_detection";
    case Perturbation::Kind::kHeadingOffset:
      return "heading_offset";
    case Perturbation::Kind::kHeadingNoise:
      return "heading_noise";
  }
  return "remove_road";
}

Perturbation::Kind perturbation_kind_from_string(std::string_view name)
{
  for (auto kind : {Perturbation::Kind::kRemoveRoad, Perturbation::Kind::kLateDetection,
                    Perturbation::Kind::kHeadingOffset, Perturbation::Kind::kHeadingNoise}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw ConfigError("unknown perturbation '" + std::string(name) + "'");
}

std::string Perturbation::name() const { return std::string(to_string(kind)); }

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::int64_t index)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) {
    mix_byte(static_cast<unsigned char>(seed >> (8 * i)));
  }
  for (const char c : tag) {
    mix_byte(static_cast<unsigned char>(c));
  }
  const auto u = static_cast<std::uint64_t>(index);
  for (int i = 0; i < 8; ++i) {
    mix_byte(static_cast<unsigned char>(u >> (8 * i)));
  }
  // splitmix64 finalizer
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

std::string base_scene_id(std::string_view id)
{
  const auto pos = id.find('+');
  return std::string(id.substr(0, pos));
}

Scene remove_road(const Scene & scene)
{
  Scene out = scene;
  out.road.polylines.clear();
  return out;
}

Scene late_detection(const Scene & scene, std::span<const AgentId> agents)
{
  Scene out = scene;
  for (const auto agent : agents) {
    auto & track = out.track(agent);
    bool changed = false;
    for (std::size_t t = 0; t < track.current_index; ++t) {
      if (track.states[t].valid || !(track.states[t] == AgentState::invalid())) {
        track.states[t] = AgentState::invalid();
        changed = true;
      }
    }
    if (changed && !track.deltas.empty()) {
      track = derive_kinematics(std::move(track));
    }
  }
  return out;
}

Scene offset_heading(const Scene & scene, AgentId target, double angle)
{
  Scene out = scene;
  auto & track = out.track(target);
  if (angle == 0.0) {
    return out;
  }
  auto & state = track.states.at(track.current_index);
  state.heading = wrap_angle(state.heading + angle);
  if (!track.deltas.empty()) {
    track = derive_kinematics(std::move(track));
  }
  return out;
}

Scene heading_noise(const Scene & scene, AgentId target, double sigma, std::uint64_t seed)
{
  if (sigma < 0.0) {
    throw ConfigError("heading_noise: sigma must be non-negative");
  }
  if (sigma == 0.0) {
    return scene;
  }
  std::mt19937_64 rng(derive_seed(seed, scene.id, target));
  std::normal_distribution<double> noise(0.0, sigma);
  return offset_heading(scene, target, noise(rng));
}

namespace
{

std::vector<AgentId> perturbed_agents(const Scene & scene, Perturbation::Scope scope)
{
  if (scope == Perturbation::Scope::kTargetOnly) {
    return scene.targets;
  }
  std::vector<AgentId> ids;
  for (const auto & t : scene.tracks) {
    if (t.current().valid) {
      ids.push_back(t.id);
    }
  }
  return ids;
}

}  // namespace

Scene apply_perturbation(const Scene & scene, const Perturbation & p)
{
  switch (p.kind) {
    case Perturbation::Kind::kRemoveRoad:
      return remove_road(scene);
    case Perturbation::Kind::kLateDetection:
      return late_detection(scene, perturbed_agents(scene, p.scope));
    case Perturbation::Kind::kHeadingOffset: {
      Scene out = scene;
      for (const auto id : perturbed_agents(scene, p.scope)) {
        out = offset_heading(out, id, p.angle);
      }
      return out;
    }
    case Perturbation::Kind::kHeadingNoise: {
      Scene out = scene;
      for (const auto id : perturbed_agents(scene, p.scope)) {
        out = heading_noise(out, id, p.sigma, p.seed);
      }
      return out;
    }
  }
  return scene;
}

std::vector<Scene> augment_dataset(std::span<const Scene> dataset, const Perturbation & p)
{
  std::vector<Scene> out(dataset.begin(), dataset.end());
  out.reserve(2 * dataset.size());
  for (const auto & scene : dataset) {
    Scene copy = apply_perturbation(scene, p);
    copy.id = scene.id + "+" + p.name();
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace trajbench
