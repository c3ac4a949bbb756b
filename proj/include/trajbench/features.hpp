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

#ifndef TRAJBENCH__FEATURES_HPP_
#define TRAJBENCH__FEATURES_HPP_

#include "trajbench/frames.hpp"
#include "trajbench/scene.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace trajbench
{

/// Per-step agent feature layout:
/// x, y | cos(theta), sin(theta) | vx, vy | u | w, l | valid | type one-hot (5) |
/// dx, dy | dtheta | du | dvalid
namespace feature
{
constexpr Eigen::Index kX = 0;
constexpr Eigen::Index kCos = 2;
constexpr Eigen::Index kVelocity = 4;
constexpr Eigen::Index kSpeed = 6;
constexpr Eigen::Index kWidth = 7;
constexpr Eigen::Index kValid = 9;
constexpr Eigen::Index kType = 10;
constexpr Eigen::Index kDelta = 15;
constexpr Eigen::Index kDeltaHeading = 17;
constexpr Eigen::Index kDeltaSpeed = 18;
constexpr Eigen::Index kDeltaValid = 19;
constexpr Eigen::Index kDim = 20;
}  // namespace feature

/// Road point layout: x, y | direction cos, sin | semantic one-hot (3) | valid
namespace road_feature
{
constexpr Eigen::Index kX = 0;
constexpr Eigen::Index kCos = 2;
constexpr Eigen::Index kType = 4;
constexpr Eigen::Index kValid = 7;
constexpr Eigen::Index kDim = 8;
}  // namespace road_feature

/// Raw (un-normalized) features of one state; all zeros for invalid states.
Eigen::VectorXd state_features(const AgentState & state, AgentType type, const KinematicDelta & delta);

/// Columns that are categorical and must not be normalized.
std::vector<Eigen::Index> history_pass_through_columns();
std::vector<Eigen::Index> road_pass_through_columns();

/**
 * @brief Normalized history encoding of a track, one row per observed step.
 *
 * Invalid steps are all-zero rows. Throws DataError when derive_kinematics
 * has not been applied.
 */
Eigen::MatrixXd encode_history(const AgentTrack & track, const Normalizer & normalizer);

struct RoadFeatures
{
  Eigen::MatrixXd points;  // budget x road_feature::kDim
  std::vector<bool> valid;

  std::size_t valid_count() const;
};

/**
 * @brief Up to `budget` road points nearest the origin, sorted by distance.
 *
 * Each selected point is encoded with the direction of its polyline segment
 * and normalized; unused slots and the empty road are all-zero rows with
 * valid flag 0.
 */
RoadFeatures encode_road(const RoadGraph & road, std::size_t budget, const Normalizer & normalizer);

/// Raw road point rows of a graph (no selection), used to fit statistics.
std::vector<Eigen::VectorXd> road_point_rows(const RoadGraph & road);

}  // namespace trajbench

#endif  // TRAJBENCH__FEATURES_HPP_
