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

#ifndef TRAJBENCH__FRAMES_HPP_
#define TRAJBENCH__FRAMES_HPP_

#include "trajbench/scene.hpp"

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace trajbench
{

/**
 * @brief Rigid 2D transform mapping local (target-frame) points to the parent frame.
 *
 * apply(p) = R(rotation) * p + translation.
 */
struct PoseTransform
{
  Vec2 translation{0.0, 0.0};
  double rotation{0.0};

  static PoseTransform identity() { return PoseTransform{}; }

  Vec2 apply(const Vec2 & point) const;
  // Rotation only, for direction-like quantities.
  Vec2 apply_direction(const Vec2 & direction) const;
  PoseTransform inverse() const;
};

/**
 * @brief Moves the scene into the frame of `target`: translated so its current
 * position is the origin, rotated so its current heading is zero.
 *
 * The heading that the scene carries is used as-is, so a corrupted heading
 * yields a wrongly rotated scene. Invalid states stay zero-filled. The returned
 * transform maps target-frame points back to the world frame.
 */
std::pair<Scene, PoseTransform> to_target_frame(const Scene & scene, AgentId target);

std::vector<Vec2> from_target_frame(const PoseTransform & transform, std::span<const Vec2> positions);

/// Per-feature z-score statistics.
class Normalizer
{
public:
  static constexpr double kMinStddev = 1e-6;

  Normalizer() = default;
  Normalizer(Eigen::VectorXd mean, Eigen::VectorXd stddev);

  // Identity normalizer of the given dimension.
  static Normalizer identity(Eigen::Index dim);

  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd & mean() const { return mean_; }
  const Eigen::VectorXd & stddev() const { return stddev_; }

  // Resets the listed columns to mean 0 and stddev 1.
  void pass_through(std::span<const Eigen::Index> columns);

  Eigen::VectorXd normalize(const Eigen::VectorXd & row) const;
  Eigen::VectorXd denormalize(const Eigen::VectorXd & row) const;

private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd stddev_;
};

/// Population mean and standard deviation per column; stddev floored at 1e-6.
/// Throws DataError on empty input or inconsistent dimensions.
Normalizer fit_normalizer(std::span<const Eigen::VectorXd> rows);

}  // namespace trajbench

#endif  // TRAJBENCH__FRAMES_HPP_
