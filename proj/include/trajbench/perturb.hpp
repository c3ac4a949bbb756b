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

#ifndef TRAJBENCH__PERTURB_HPP_
#define TRAJBENCH__PERTURB_HPP_

#include "trajbench/scene.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajbench
{

/// Description of one disruptive transformation of a scene.
struct Perturbation
{
  enum class Kind : std::uint8_t { kRemoveRoad, kLateDetection, kHeadingOffset, kHeadingNoise };
  enum class Scope : std::uint8_t { kTargetOnly, kAllAgents };

  Kind kind{Kind::kRemoveRoad};
  Scope scope{Scope::kTargetOnly};
  double angle{kPi / 2.0};
  double sigma{0.0};
  std::uint64_t seed{0};

  static Perturbation remove_road() { return {Kind::kRemoveRoad}; }
  static Perturbation late_detection(Scope scope = Scope::kTargetOnly)
  {
    return {Kind::kLateDetection, scope};
  }
  static Perturbation heading_offset(double angle = kPi / 2.0)
  {
    return {Kind::kHeadingOffset, Scope::kTargetOnly, angle};
  }
  static Perturbation heading_noise(double sigma, std::uint64_t seed)
  {
    return {Kind::kHeadingNoise, Scope::kTargetOnly, 0.0, sigma, seed};
  }

  // "remove_road", "late_detection", "heading_offset" or "heading_noise".
  std::string name() const;
};

std::string_view to_string(Perturbation::Kind kind);
Perturbation::Kind perturbation_kind_from_string(std::string_view name);

/// Same scene with an empty road graph.
Scene remove_road(const Scene & scene);

/// Drops every observed state before the current one of the named tracks.
Scene late_detection(const Scene & scene, std::span<const AgentId> agents);

/// Adds `angle` to the current heading of `target`; nothing else changes.
Scene offset_heading(const Scene & scene, AgentId target, double angle);

/// Adds a seeded zero-mean Gaussian draw to the current heading of `target`.
/// The stream depends only on (seed, scene id, target id).
Scene heading_noise(const Scene & scene, AgentId target, double sigma, std::uint64_t seed);

/// Applies the perturbation to every target of the scene (or to every agent
/// with a valid current state for all-agents scope).
Scene apply_perturbation(const Scene & scene, const Perturbation & perturbation);

/// Originals followed by one perturbed copy of each scene.
std::vector<Scene> augment_dataset(std::span<const Scene> dataset, const Perturbation & perturbation);

/// Scene id with any provenance suffix removed.
std::string base_scene_id(std::string_view id);

/// Stable 64-bit seed derivation (FNV-1a over the parts, mixed with splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::int64_t index = 0);

}  // namespace trajbench

#endif  // TRAJBENCH__PERTURB_HPP_
