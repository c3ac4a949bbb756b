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

#include "trajbench/predictors.hpp"

#include "trajbench/errors.hpp"

#include <Eigen/LU>

#include <cmath>

namespace trajbench
{

std::vector<std::string> PredictionSet::check() const
{
  std::vector<std::string> problems;
  if (modes.empty()) {
    problems.emplace_back("no modes");
    return problems;
  }
  if (probabilities.size() != modes.size()) {
    problems.emplace_back("probability count differs from mode count");
  }
  double total = 0.0;
  for (const double p : probabilities) {
    if (!(p >= 0.0)) {
      problems.emplace_back("negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    problems.emplace_back("probabilities do not sum to 1");
  }
  const auto steps = horizon_count();
  for (const auto & mode : modes) {
    if (mode.size() != steps) {
      problems.emplace_back("modes have different lengths");
    }
    for (const auto & p : mode) {
      if (!p.allFinite()) {
        problems.emplace_back("non-finite position");
        break;
      }
    }
  }
  if (covariances) {
    for (const auto & mode : *covariances) {
      for (const auto & cov : mode) {
        const bool symmetric = cov(0, 1) == cov(1, 0);
        const bool psd = cov(0, 0) >= 0.0 && cov(1, 1) >= 0.0 && cov.determinant() >= -1e-12;
        if (!symmetric || !psd) {
          problems.emplace_back("covariance is not symmetric positive semi-definite");
          return problems;
        }
      }
    }
  }
  return problems;
}

PredictionSet predict_cv(const AgentState & state, const HorizonSet & horizons)
{
  if (!state.valid) {
    throw DataError("predict_cv: current state is invalid");
  }
  PredictionSet out;
  out.modes.resize(1);
  out.modes[0].reserve(horizons.size());
  for (const double t : horizons.times) {
    out.modes[0].push_back(state.position + t * state.velocity);
  }
  out.probabilities = {1.0};
  return out;
}

std::vector<PredictionSet> ConstantVelocityPredictor::predict(
  const Scene & scene, std::span<const AgentId> targets) const
{
  std::vector<PredictionSet> out;
  out.reserve(targets.size());
  for (const auto id : targets) {
    out.push_back(predict_cv(scene.track(id).current(), horizons_));
  }
  return out;
}

}  // namespace trajbench
