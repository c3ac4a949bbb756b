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

#include "trajbench/frames.hpp"

#include "trajbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trajbench
{

namespace
{

Vec2 rotate(const Vec2 & v, double c, double s) { return {c * v.x() - s * v.y(), s * v.x() + c * v.y()}; }

}  // namespace

Vec2 PoseTransform::apply(const Vec2 & point) const
{
  return rotate(point, std::cos(rotation), std::sin(rotation)) + translation;
}

Vec2 PoseTransform::apply_direction(const Vec2 & direction) const
{
  return rotate(direction, std::cos(rotation), std::sin(rotation));
}

PoseTransform PoseTransform::inverse() const
{
  const double c = std::cos(-rotation);
  const double s = std::sin(-rotation);
  return {-rotate(translation, c, s), -rotation};
}

std::pair<Scene, PoseTransform> to_target_frame(const Scene & scene, AgentId target)
{
  const auto & target_track = scene.track(target);
  const auto & origin = target_track.current();
  if (!origin.valid) {
    throw DataError(
      "scene '" + scene.id + "': target " + std::to_string(target) + " has no valid current state");
  }
  const Vec2 center = origin.position;
  const double theta = origin.heading;
  const double c = std::cos(-theta);
  const double s = std::sin(-theta);
  const auto to_local = [&](const Vec2 & p) { return rotate(p - center, c, s); };

  Scene out = scene;
  for (auto & line : out.road.polylines) {
    for (auto & p : line.points) {
      p = to_local(p);
    }
  }
  for (auto & track : out.tracks) {
    for (auto & state : track.states) {
      if (!state.valid) {
        continue;
      }
      state.position = to_local(state.position);
      state.velocity = rotate(state.velocity, c, s);
      state.heading = wrap_angle(state.heading - theta);
    }
    for (auto & p : track.observed_truth) {
      p = to_local(p);
    }
    for (auto & d : track.deltas) {
      d.position = rotate(d.position, c, s);
    }
  }
  return {std::move(out), PoseTransform{center, theta}};
}

std::vector<Vec2> from_target_frame(const PoseTransform & transform, std::span<const Vec2> positions)
{
  const double c = std::cos(transform.rotation);
  const double s = std::sin(transform.rotation);
  std::vector<Vec2> out;
  out.reserve(positions.size());
  for (const auto & p : positions) {
    out.push_back(rotate(p, c, s) + transform.translation);
  }
  return out;
}

Normalizer::Normalizer(Eigen::VectorXd mean, Eigen::VectorXd stddev)
: mean_(std::move(mean)), stddev_(std::move(stddev))
{
  if (mean_.size() != stddev_.size()) {
    throw DataError("normalizer mean/stddev dimension mismatch");
  }
  stddev_ = stddev_.cwiseMax(kMinStddev);
}

Normalizer Normalizer::identity(Eigen::Index dim)
{
  return Normalizer(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

void Normalizer::pass_through(std::span<const Eigen::Index> columns)
{
  for (const auto c : columns) {
    mean_(c) = 0.0;
    stddev_(c) = 1.0;
  }
}

Eigen::VectorXd Normalizer::normalize(const Eigen::VectorXd & row) const
{
  return (row - mean_).cwiseQuotient(stddev_);
}

Eigen::VectorXd Normalizer::denormalize(const Eigen::VectorXd & row) const
{
  return row.cwiseProduct(stddev_) + mean_;
}

Normalizer fit_normalizer(std::span<const Eigen::VectorXd> rows)
{
  if (rows.empty()) {
    throw DataError("fit_normalizer: no rows");
  }
  const auto dim = rows.front().size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  for (const auto & r : rows) {
    if (r.size() != dim) {
      throw DataError("fit_normalizer: inconsistent row dimension");
    }
    sum += r;
  }
  const double n = static_cast<double>(rows.size());
  const Eigen::VectorXd mean = sum / n;
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
  for (const auto & r : rows) {
    sq += (r - mean).cwiseAbs2();
  }
  return Normalizer(mean, (sq / n).cwiseSqrt());
}

}  // namespace trajbench
