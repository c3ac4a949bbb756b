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
#include "trajbench/features.hpp"
#include "trajbench/frames.hpp"

#include "../test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace trajbench
{
namespace
{

using testing::cv_track;
using testing::line_polyline;

TEST(StateFeatures, LayoutAndInvalidRows)
{
  AgentState s = testing::moving_state({1.0, 2.0}, {3.0, 4.0}, kPi / 2.0);
  KinematicDelta d{{0.3, 0.4}, 0.1, 0.2, 1.0};
  const auto f = state_features(s, AgentType::kPedestrian, d);
  ASSERT_EQ(f.size(), feature::kDim);
  EXPECT_EQ(f(feature::kX), 1.0);
  EXPECT_NEAR(f(feature::kCos), 0.0, 1e-15);
  EXPECT_EQ(f(feature::kCos + 1), 1.0);
  EXPECT_EQ(f(feature::kSpeed), 5.0);
  EXPECT_EQ(f(feature::kValid), 1.0);
  EXPECT_EQ(f(feature::kType + 2), 1.0);
  EXPECT_EQ(f(feature::kDeltaHeading), 0.1);
  EXPECT_EQ(f(feature::kDeltaValid), 1.0);
  EXPECT_TRUE(state_features(AgentState::invalid(), AgentType::kVehicle, d).isZero());
}

TEST(EncodeHistory, TargetRowInOwnFrame)
{
  Scene s = testing::two_agent_scene();
  const auto local = derive_kinematics(to_target_frame(s, 1).first);
  const auto rows = encode_history(local.track(1), Normalizer::identity(feature::kDim));
  ASSERT_EQ(rows.rows(), 11);
  EXPECT_EQ(rows(10, feature::kX), 0.0);
  EXPECT_EQ(rows(10, feature::kX + 1), 0.0);
  EXPECT_EQ(rows(10, feature::kCos), 1.0);
  EXPECT_EQ(rows(10, feature::kCos + 1), 0.0);
}

TEST(EncodeHistory, LateDetectionLeavesOneValidRow)
{
  auto t = cv_track(1, {0.0, 0.0}, {1.0, 0.0});
  for (std::size_t k = 0; k < 10; ++k) {
    t.states[k] = AgentState::invalid();
  }
  t = derive_kinematics(t);
  const auto rows = encode_history(t, Normalizer::identity(feature::kDim));
  for (Eigen::Index k = 0; k < 10; ++k) {
    EXPECT_TRUE(rows.row(k).isZero());
  }
  EXPECT_EQ(rows(10, feature::kValid), 1.0);
}

TEST(EncodeHistory, RequiresKinematicsAndMatchingNormalizer)
{
  const auto t = cv_track(1, {0.0, 0.0}, {1.0, 0.0});
  EXPECT_THROW(encode_history(t, Normalizer::identity(feature::kDim)), DataError);
  EXPECT_THROW(encode_history(derive_kinematics(t), Normalizer::identity(3)), DataError);
}

TEST(EncodeHistory, DenormalizingRecoversRawFeatures)
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const auto s = derive_kinematics(testing::random_scene(rng, "f"));
    const auto & track = s.tracks.back();
    Eigen::VectorXd mean(feature::kDim), sd(feature::kDim);
    for (Eigen::Index c = 0; c < feature::kDim; ++c) {
      mean(c) = u(rng);
      sd(c) = 0.1 + std::abs(u(rng));
    }
    const Normalizer n(mean, sd);
    const auto rows = encode_history(track, n);
    for (std::size_t k = 0; k < track.observed_count(); ++k) {
      if (!track.states[k].valid) {
        EXPECT_TRUE(rows.row(static_cast<Eigen::Index>(k)).isZero());
        continue;
      }
      const auto raw = state_features(track.states[k], track.type, track.deltas[k]);
      const Eigen::VectorXd back = n.denormalize(rows.row(static_cast<Eigen::Index>(k)).transpose());
      EXPECT_LT((back - raw).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(EncodeRoad, EmptyRoadIsCanonicalZero)
{
  const auto r = encode_road(RoadGraph{}, 16, Normalizer::identity(road_feature::kDim));
  EXPECT_EQ(r.points.rows(), 16);
  EXPECT_TRUE(r.points.isZero());
  EXPECT_EQ(r.valid_count(), 0u);
}

// Brute-force nearest road points: all points sorted by (distance, index).
std::vector<Vec2> nearest_oracle(const RoadGraph & road, std::size_t budget)
{
  std::vector<std::pair<double, std::size_t>> d;
  std::vector<Vec2> pts;
  for (const auto & l : road.polylines) {
    for (const auto & p : l.points) {
      d.emplace_back(p.norm(), pts.size());
      pts.push_back(p);
    }
  }
  std::stable_sort(d.begin(), d.end(), [](const auto & a, const auto & b) { return a.first < b.first; });
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < std::min(budget, d.size()); ++i) {
    out.push_back(pts[d[i].second]);
  }
  return out;
}

TEST(EncodeRoad, StraightLaneSortedByDistance)
{
  RoadGraph road;
  road.polylines.push_back(line_polyline(PolylineType::kLaneCenter, {-10.25, 0.0}, {9.75, 0.0}, 21));
  const auto r = encode_road(road, 64, Normalizer::identity(road_feature::kDim));
  const auto expected = nearest_oracle(road, 64);
  ASSERT_EQ(r.valid_count(), 21u);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(r.points(static_cast<Eigen::Index>(i), road_feature::kX), expected[i].x());
    EXPECT_EQ(r.points(static_cast<Eigen::Index>(i), road_feature::kCos), 1.0);
    EXPECT_EQ(r.points(static_cast<Eigen::Index>(i), road_feature::kType), 1.0);
  }
  for (Eigen::Index i = 21; i < 64; ++i) {
    EXPECT_TRUE(r.points.row(i).isZero());
  }
}

TEST(EncodeRoad, BudgetKeepsStrictlyNearest)
{
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    RoadGraph road;
    for (int l = 0; l < 4; ++l) {
      road.polylines.push_back(line_polyline(
        static_cast<PolylineType>(l % 3), {u(rng), u(rng)}, {u(rng), u(rng)}, 7));
    }
    const std::size_t budget = 10;
    const auto r = encode_road(road, budget, Normalizer::identity(road_feature::kDim));
    const auto expected = nearest_oracle(road, budget);
    ASSERT_EQ(r.valid_count(), budget);
    double farthest = 0.0;
    for (std::size_t i = 0; i < budget; ++i) {
      const Vec2 p(r.points(static_cast<Eigen::Index>(i), 0), r.points(static_cast<Eigen::Index>(i), 1));
      EXPECT_EQ(p, expected[i]);
      farthest = std::max(farthest, p.norm());
    }
    std::size_t closer = 0;
    for (const auto & row : road_point_rows(road)) {
      closer += Vec2(row(0), row(1)).norm() < farthest;
    }
    EXPECT_LT(closer, budget);
  }
}

TEST(EncodeRoad, SemanticOneHotAndPassThroughColumns)
{
  RoadGraph road;
  road.polylines.push_back(line_polyline(PolylineType::kCrosswalk, {0.0, 1.0}, {0.0, 5.0}, 3));
  const auto rows = road_point_rows(road);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0](road_feature::kType + 2), 1.0);
  EXPECT_EQ(rows[2](road_feature::kCos + 1), 1.0);
  const auto cols = road_pass_through_columns();
  EXPECT_NE(std::find(cols.begin(), cols.end(), road_feature::kValid), cols.end());
  const auto hcols = history_pass_through_columns();
  EXPECT_NE(std::find(hcols.begin(), hcols.end(), feature::kValid), hcols.end());
}

}  // namespace
}  // namespace trajbench
