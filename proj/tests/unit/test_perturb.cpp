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

#include "trajbench/errors.hpp"
#include "trajbench/perturb.hpp"
#include "trajbench/predictors.hpp"
#include "trajbench/scene_io.hpp"

#include "../test_util.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace trajbench
{
namespace
{

using json = nlohmann::json;
using testing::random_scene;
using testing::two_agent_scene;

std::vector<Scene> random_scenes(std::uint64_t seed, int n)
{
  std::mt19937_64 rng(seed);
  std::vector<Scene> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(derive_kinematics(random_scene(rng, "s" + std::to_string(i))));
  }
  return out;
}

// Top-level and per-track fields whose serialized forms differ.
std::set<std::string> changed_fields(const Scene & a, const Scene & b)
{
  const auto ja = json::parse(scene_to_json(a));
  const auto jb = json::parse(scene_to_json(b));
  std::set<std::string> out;
  for (const auto & [key, value] : ja.items()) {
    if (key == "tracks") {
      continue;
    }
    if (value != jb.at(key)) {
      out.insert(key);
    }
  }
  const auto & ta = ja.at("tracks");
  const auto & tb = jb.at("tracks");
  if (ta.size() != tb.size()) {
    out.insert("tracks");
    return out;
  }
  for (std::size_t t = 0; t < ta.size(); ++t) {
    for (const auto & [key, value] : ta[t].items()) {
      if (value != tb[t].at(key)) {
        out.insert("tracks." + std::to_string(ta[t].at("id").get<AgentId>()) + "." + key);
      }
    }
  }
  return out;
}

TEST(RemoveRoad, EmptiesOnlyTheRoad)
{
  for (const auto & s : random_scenes(1, 100)) {
    const auto out = remove_road(s);
    EXPECT_TRUE(out.road.empty());
    EXPECT_EQ(out.tracks, s.tracks);
    EXPECT_EQ(out.targets, s.targets);
    EXPECT_EQ(out.dt, s.dt);
    const auto diff = changed_fields(s, out);
    if (s.road.empty()) {
      EXPECT_TRUE(diff.empty());
    } else {
      EXPECT_EQ(diff, std::set<std::string>{"road"});
    }
    EXPECT_EQ(remove_road(out), out);
  }
}

TEST(LateDetection, KeepsOnlyTheCurrentObservation)
{
  const auto s = two_agent_scene();
  const AgentId ids[] = {1};
  const auto out = late_detection(s, ids);
  const auto & t = out.track(1);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_EQ(t.states[k], AgentState::invalid());
  }
  EXPECT_EQ(t.states[10], s.track(1).states[10]);
  EXPECT_EQ(t.future().size(), 80u);
  for (std::size_t k = 10; k < t.states.size(); ++k) {
    EXPECT_EQ(t.states[k], s.track(1).states[k]);
  }
  EXPECT_EQ(out.track(2), s.track(2));
  const AgentId unknown[] = {5};
  EXPECT_THROW(late_detection(s, unknown), DataError);
}

TEST(LateDetection, IdempotentAndMinimal)
{
  for (const auto & s : random_scenes(2, 100)) {
    const auto out = late_detection(s, s.targets);
    EXPECT_EQ(late_detection(out, s.targets), out);
    for (const auto & key : changed_fields(s, out)) {
      bool target_field = false;
      for (const auto id : s.targets) {
        target_field |= key == "tracks." + std::to_string(id) + ".states" ||
                        key == "tracks." + std::to_string(id) + ".deltas";
      }
      EXPECT_TRUE(target_field) << key;
    }
  }
}

TEST(LateDetection, ConstantVelocityIsUnaffected)
{
  ConstantVelocityPredictor cv;
  for (const auto & s : random_scenes(3, 50)) {
    EXPECT_EQ(cv.predict(s, s.targets)[0].modes, cv.predict(late_detection(s, s.targets), s.targets)[0].modes);
  }
}

TEST(OffsetHeading, QuarterTurnChangesOneScalar)
{
  auto s = two_agent_scene();
  s.tracks[0].states[10].heading = 0.0;
  const auto out = offset_heading(s, 1, kPi / 2.0);
  EXPECT_EQ(out.track(1).current().heading, kPi / 2.0);
  auto restored = out;
  restored.tracks[0].states[10].heading = 0.0;
  EXPECT_EQ(restored, s);
  EXPECT_EQ(offset_heading(s, 1, 0.0), s);
  EXPECT_THROW(offset_heading(s, 9, 1.0), DataError);
}

TEST(OffsetHeading, AdditiveCompositionAndMinimality)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (const auto & s : random_scenes(4, 200)) {
    const AgentId target = s.targets.front();
    const double theta = s.track(target).current().heading;
    const auto twice = offset_heading(offset_heading(s, target, kPi / 2.0), target, kPi / 2.0);
    const auto once = offset_heading(s, target, kPi);
    const double expected = wrap_angle(theta + kPi);
    EXPECT_NEAR(std::remainder(twice.track(target).current().heading - expected, 2.0 * kPi), 0.0, 1e-12);
    EXPECT_NEAR(std::remainder(once.track(target).current().heading - expected, 2.0 * kPi), 0.0, 1e-12);

    const double a = angle(rng);
    const double b = angle(rng);
    const auto ab = offset_heading(offset_heading(s, target, a), target, b);
    EXPECT_NEAR(std::remainder(ab.track(target).current().heading - (theta + a + b), 2.0 * kPi), 0.0, 1e-12);

    // Without derived kinematics in the way, only the current heading moves.
    Scene bare = s;
    for (auto & t : bare.tracks) {
      t.deltas.clear();
    }
    const auto moved = offset_heading(bare, target, a);
    auto undone = moved;
    undone.track(target).states[undone.track(target).current_index].heading = bare.track(target).current().heading;
    EXPECT_EQ(undone, bare);
  }
}

TEST(HeadingNoise, DeterministicAndCalibrated)
{
  const auto s = two_agent_scene();
  EXPECT_EQ(heading_noise(s, 1, 0.0, 7), s);
  EXPECT_EQ(heading_noise(s, 1, 0.3, 7), heading_noise(s, 1, 0.3, 7));
  EXPECT_THROW(heading_noise(s, 1, -1.0, 7), ConfigError);

  Scene base = s;
  base.tracks[0].states[10].heading = 0.0;
  double sum = 0.0;
  double sum2 = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    base.id = "noise-" + std::to_string(i);
    const double d = heading_noise(base, 1, 0.5, 99).track(1).current().heading;
    sum += d;
    sum2 += d * d;
  }
  const double mean = sum / n;
  EXPECT_NEAR(std::sqrt(sum2 / n - mean * mean), 0.5, 0.02);
}

TEST(AugmentDataset, SizeProvenanceAndOriginals)
{
  const auto data = random_scenes(5, 100);
  for (const auto & p : {Perturbation::remove_road(), Perturbation::late_detection(),
                         Perturbation::heading_offset(), Perturbation::heading_noise(0.2, 3)}) {
    const auto out = augment_dataset(data, p);
    ASSERT_EQ(out.size(), 2 * data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      EXPECT_EQ(scene_to_json(out[i]), scene_to_json(data[i]));
      EXPECT_EQ(out[data.size() + i].id, data[i].id + "+" + p.name());
      EXPECT_EQ(base_scene_id(out[data.size() + i].id), data[i].id);
    }
  }
  const auto roadless = augment_dataset(data, Perturbation::remove_road());
  std::size_t empty = 0;
  std::size_t empty_before = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    empty += roadless[data.size() + i].road.empty();
    empty_before += data[i].road.empty();
  }
  EXPECT_EQ(empty, data.size());
  EXPECT_LT(empty_before, data.size());
  EXPECT_TRUE(augment_dataset(std::vector<Scene>{}, Perturbation::remove_road()).empty());
}

TEST(ApplyPerturbation, AllTargetsAndAllAgentsScope)
{
  auto s = two_agent_scene();
  s.targets = {1, 2};
  const auto out = apply_perturbation(s, Perturbation::heading_offset(1.0));
  EXPECT_EQ(out.track(1).current().heading, wrap_angle(s.track(1).current().heading + 1.0));
  EXPECT_EQ(out.track(2).current().heading, wrap_angle(s.track(2).current().heading + 1.0));

  s.targets = {1};
  const auto all = apply_perturbation(s, Perturbation::late_detection(Perturbation::Scope::kAllAgents));
  EXPECT_FALSE(all.track(2).states[0].valid);
  const auto only = apply_perturbation(s, Perturbation::late_detection());
  EXPECT_TRUE(only.track(2).states[0].valid);
}

TEST(PerturbationNames, RoundTrip)
{
  for (auto kind : {Perturbation::Kind::kRemoveRoad, Perturbation::Kind::kLateDetection,
                    Perturbation::Kind::kHeadingOffset, Perturbation::Kind::kHeadingNoise}) {
    EXPECT_EQ(perturbation_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(perturbation_kind_from_string("fog"), ConfigError);
}

TEST(DeriveSeed, StableAndSensitive)
{
  EXPECT_EQ(derive_seed(1, "a", 2), derive_seed(1, "a", 2));
  EXPECT_NE(derive_seed(1, "a", 2), derive_seed(1, "a", 3));
  EXPECT_NE(derive_seed(1, "a", 2), derive_seed(2, "a", 2));
  EXPECT_NE(derive_seed(1, "a", 2), derive_seed(1, "b", 2));
}

}  // namespace
}  // namespace trajbench
