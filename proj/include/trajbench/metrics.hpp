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

#ifndef TRAJBENCH__METRICS_HPP_
#define TRAJBENCH__METRICS_HPP_

#include "trajbench/perturb.hpp"
#include "trajbench/predictors.hpp"
#include "trajbench/scene.hpp"

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trajbench
{

/// Minimum over modes of the mean displacement over horizons, skipping steps
/// whose `valid` flag is false (all steps when `valid` is empty). Ties keep the
/// lowest mode index. Throws DataError on shape mismatch, non-finite input or
/// when no step is valid.
double min_ade(const PredictionSet & prediction, std::span<const Vec2> truth, std::span<const bool> valid = {});

struct TrajectoryKey
{
  std::string scene_id;
  AgentId agent_id{0};

  auto operator<=>(const TrajectoryKey &) const = default;
};

struct TrajectoryResult
{
  TrajectoryKey key;
  double min_ade{0.0};
  std::size_t valid_steps{0};

  bool operator==(const TrajectoryResult &) const = default;
};

struct EvalFailure
{
  std::string scene_id;
  std::string message;

  bool operator==(const EvalFailure &) const = default;
};

struct EvalResult
{
  // In dataset order, then target order.
  std::vector<TrajectoryResult> trajectories;
  double aggregate{0.0};
  std::size_t count{0};
  // Mean displacement of each trajectory's best mode at every horizon.
  std::vector<double> per_horizon;
  std::vector<EvalFailure> failures;

  bool operator==(const EvalResult &) const = default;
};

/// Aggregate of per-trajectory values, summed in order.
EvalResult aggregate_results(std::vector<TrajectoryResult> trajectories);

/**
 * @brief minADE of `predictor` over every target of `dataset`.
 *
 * When `perturbation` is set it is applied to all targets of each scene before
 * prediction; ground truth always comes from the unperturbed scene. Scenes that
 * fail are listed in `failures` and skipped. Scenes are processed on `jobs`
 * threads; the result does not depend on `jobs`.
 */
EvalResult evaluate(
  const Predictor & predictor, std::span<const Scene> dataset,
  const std::optional<Perturbation> & perturbation = std::nullopt, std::size_t jobs = 1);

struct Degradation
{
  double delta{0.0};
  // delta / original aggregate; empty when the original aggregate is zero.
  std::optional<double> relative;
};

Degradation degradation(const EvalResult & original, const EvalResult & perturbed);
Degradation degradation(double original, double perturbed);

/// Linear interpolation between order statistics at position q * (n - 1).
/// Throws DataError on empty input or q outside [0, 1].
double quantile(std::vector<double> values, double q);

struct Histogram
{
  std::vector<double> edges;  // bins + 1 values
  std::vector<std::size_t> counts;
};

/// Fixed-width histogram over [lo, hi]; values outside are counted in the edge
/// bins so counts always sum to values.size().
Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

struct DeltaDistribution
{
  std::vector<TrajectoryKey> keys;
  std::vector<double> deltas;
  double median{0.0};
  double p25{0.0};
  double p75{0.0};
  Histogram histogram;
};

struct HistogramRange
{
  std::size_t bins{40};
  double lo{-2.0};
  double hi{2.0};
};

/// Per-trajectory perturbed - original minADE. Throws DataError when the key
/// sets differ or are empty.
DeltaDistribution delta_distribution(
  const EvalResult & original, const EvalResult & perturbed, const HistogramRange & range = {});

/// CSV with columns scene_id, agent_id, min_ade, valid_steps.
void write_eval_csv(const EvalResult & result, std::ostream & out);
/// CSV with columns scene_id, agent_id, delta.
void write_delta_csv(const DeltaDistribution & distribution, std::ostream & out);
/// CSV with columns bin_left, bin_right, count.
void write_histogram_csv(const Histogram & histogram, std::ostream & out);
/// JSON summary document of an evaluation.
std::string eval_summary_json(const EvalResult & result);

/// Shortest decimal form that reads back to the same double.
std::string format_exact(double value);

}  // namespace trajbench

#endif  // TRAJBENCH__METRICS_HPP_
