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

#include "trajbench/features.hpp"

#include "trajbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trajbench
{

Eigen::VectorXd state_features(const AgentState & s, AgentType type, const KinematicDelta & d)
{
  Eigen::VectorXd f = Eigen::VectorXd::Zero(feature::kDim);
  if (!s.valid) {
    return f;
  }
  f(feature::kX) = s.position.x();
  f(feature::kX + 1) = s.position.y();
  f(feature::kCos) = std::cos(s.heading);
  f(feature::kCos + 1) = std::sin(s.heading);
  f(feature::kVelocity) = s.velocity.x();
  f(feature::kVelocity + 1) = s.velocity.y();
  f(feature::kSpeed) = s.speed;
  f(feature::kWidth) = s.width;
  f(feature::kWidth + 1) = s.length;
  f(feature::kValid) = 1.0;
  const auto code = one_hot(type);
  for (std::size_t i = 0; i < code.size(); ++i) {
    f(feature::kType + static_cast<Eigen::Index>(i)) = code[i];
  }
  f(feature::kDelta) = d.position.x();
  f(feature::kDelta + 1) = d.position.y();
  f(feature::kDeltaHeading) = d.heading;
  f(feature::kDeltaSpeed) = d.speed;
  f(feature::kDeltaValid) = d.validity;
  return f;
}

std::vector<Eigen::Index> history_pass_through_columns()
{
  return {feature::kValid,    feature::kType,     feature::kType + 1, feature::kType + 2,
          feature::kType + 3, feature::kType + 4, feature::kDeltaValid};
}

std::vector<Eigen::Index> road_pass_through_columns()
{
  return {road_feature::kType, road_feature::kType + 1, road_feature::kType + 2, road_feature::kValid};
}

Eigen::MatrixXd encode_history(const AgentTrack & track, const Normalizer & normalizer)
{
  if (!track.has_kinematics()) {
    throw DataError("encode_history: track " + std::to_string(track.id) + " has no derived kinematics");
  }
  if (normalizer.dim() != feature::kDim) {
    throw DataError("encode_history: normalizer dimension mismatch");
  }
  const auto n = static_cast<Eigen::Index>(track.observed_count());
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(n, feature::kDim);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto & s = track.states[static_cast<std::size_t>(t)];
    if (!s.valid) {
      continue;
    }
    rows.row(t) =
      normalizer.normalize(state_features(s, track.type, track.deltas[static_cast<std::size_t>(t)]))
        .transpose();
  }
  return rows;
}

std::size_t RoadFeatures::valid_count() const
{
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

namespace
{

struct RoadPoint
{
  Vec2 position;
  Vec2 direction;
  PolylineType type;
};

std::vector<RoadPoint> road_points(const RoadGraph & road)
{
  std::vector<RoadPoint> points;
  for (const auto & line : road.polylines) {
    const auto n = line.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 dir(1.0, 0.0);
      if (i + 1 < n) {
        dir = line.points[i + 1] - line.points[i];
      } else if (i > 0) {
        dir = line.points[i] - line.points[i - 1];
      }
      const double len = dir.norm();
      dir = len > 0.0 ? Vec2(dir / len) : Vec2(1.0, 0.0);
      points.push_back({line.points[i], dir, line.type});
    }
  }
  return points;
}

Eigen::VectorXd raw_row(const RoadPoint & p)
{
  Eigen::VectorXd row = Eigen::VectorXd::Zero(road_feature::kDim);
  row(road_feature::kX) = p.position.x();
  row(road_feature::kX + 1) = p.position.y();
  row(road_feature::kCos) = p.direction.x();
  row(road_feature::kCos + 1) = p.direction.y();
  row(road_feature::kType + static_cast<Eigen::Index>(p.type)) = 1.0;
  row(road_feature::kValid) = 1.0;
  return row;
}

}  // namespace

std::vector<Eigen::VectorXd> road_point_rows(const RoadGraph & road)
{
  std::vector<Eigen::VectorXd> rows;
  for (const auto & p : road_points(road)) {
    rows.push_back(raw_row(p));
  }
  return rows;
}

RoadFeatures encode_road(const RoadGraph & road, std::size_t budget, const Normalizer & normalizer)
{
  if (normalizer.dim() != road_feature::kDim) {
    throw DataError("encode_road: normalizer dimension mismatch");
  }
  RoadFeatures out;
  out.points = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(budget), road_feature::kDim);
  out.valid.assign(budget, false);
  const auto points = road_points(road);
  if (points.empty() || budget == 0) {
    return out;
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  const auto take = std::min(budget, points.size());
  std::partial_sort(
    order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
    [&](std::size_t a, std::size_t b) {
      const double da = points[a].position.squaredNorm();
      const double db = points[b].position.squaredNorm();
      return da < db || (da == db && a < b);
    });
  for (std::size_t k = 0; k < take; ++k) {
    out.points.row(static_cast<Eigen::Index>(k)) = normalizer.normalize(raw_row(points[order[k]])).transpose();
    out.valid[k] = true;
  }
  return out;
}

}  // namespace trajbench
