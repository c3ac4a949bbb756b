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

#ifndef TRAJBENCH__PREDICTORS_HPP_
#define TRAJBENCH__PREDICTORS_HPP_

#include "trajbench/scene.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trajbench
{

/// K candidate futures with mode probabilities and optional covariances.
struct PredictionSet
{
  // modes[k][t] is the position of mode k at horizon t.
  std::vector<std::vector<Vec2>> modes;
  std::vector<double> probabilities;
  std::optional<std::vector<std::vector<Eigen::Matrix2d>>> covariances;

  std::size_t mode_count() const { return modes.size(); }
  std::size_t horizon_count() const { return modes.empty() ? 0 : modes.front().size(); }

  // Descriptions of broken invariants; empty when well-formed.
  std::vector<std::string> check() const;
};

/// x(t') = x + t' * v for every horizon t'. Throws DataError for invalid states.
PredictionSet predict_cv(const AgentState & state, const HorizonSet & horizons);

/// Common interface of all benchmarked models. Predictions are in the world frame.
class Predictor
{
public:
  virtual ~Predictor() = default;

  virtual std::string name() const = 0;
  // One prediction per requested target of the scene, in order.
  virtual std::vector<PredictionSet> predict(const Scene & scene, std::span<const AgentId> targets) const = 0;
};

class ConstantVelocityPredictor : public Predictor
{
public:
  explicit ConstantVelocityPredictor(HorizonSet horizons = HorizonSet::uniform())
  : horizons_(std::move(horizons))
  {
  }

  std::string name() const override { return "cv"; }
  std::vector<PredictionSet> predict(const Scene & scene, std::span<const AgentId> targets) const override;

private:
  HorizonSet horizons_;
};

}  // namespace trajbench

#endif  // TRAJBENCH__PREDICTORS_HPP_
