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

#include "trajbench/metrics.hpp"

#include "trajbench/errors.hpp"
#include "trajbench/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>

namespace trajbench
{
namespace
{

// Per-mode mean displacement; returns the best mode index.
std::size_t best_mode(
  const PredictionSet & prediction, std::span<const Vec2> truth, std::span<const bool> valid,
  double & best_value, std::size_t & valid_steps)
{
  if (prediction.modes.empty()) {
    throw DataError("min_ade: prediction has no modes");
  }
  if (!valid.empty() && valid.size() != truth.size()) {
    throw DataError("min_ade: validity mask length differs from ground truth");
  }
  valid_steps = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!truth[t].allFinite()) {
      throw DataError("min_ade: non-finite ground truth");
    }
    if (valid.empty() || valid[t]) {
      ++valid_steps;
    }
  }
  if (valid_steps == 0) {
    throw DataError("min_ade: no valid ground-truth step");
  }
  std::size_t best = 0;
  best_value = 0.0;
  for (std::size_t k = 0; k < prediction.modes.size(); ++k) {
    const auto & mode = prediction.modes[k];
    if (mode.size() != truth.size()) {
      throw DataError("min_ade: prediction and ground truth lengths differ");
    }
    double total = 0.0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (!mode[t].allFinite()) {
        throw DataError("min_ade: non-finite prediction");
      }
      if (valid.empty() || valid[t]) {
        total += (mode[t] - truth[t]).norm();
      }
    }
    const double ade = total / static_cast<double>(valid_steps);
    if (k == 0 || ade < best_value) {
      best_value = ade;
      best = k;
    }
  }
  return best;
}

struct SceneOutcome
{
  std::vector<TrajectoryResult> trajectories;
  // Per trajectory, per step error of the best mode (NaN when invalid).
  std::vector<std::vector<double>> step_errors;
  std::optional<EvalFailure> failure;
};

}  // namespace

double min_ade(const PredictionSet & prediction, std::span<const Vec2> truth, std::span<const bool> valid)
{
  double value = 0.0;
  std::size_t steps = 0;
  best_mode(prediction, truth, valid, value, steps);
  return value;
}

EvalResult aggregate_results(std::vector<TrajectoryResult> trajectories)
{
  EvalResult result;
  result.trajectories = std::move(trajectories);
  result.count = result.trajectories.size();
  double total = 0.0;
  for (const auto & t : result.trajectories) {
    total += t.min_ade;
  }
  result.aggregate = result.count > 0 ? total / static_cast<double>(result.count) : 0.0;
  return result;
}

EvalResult evaluate(
  const Predictor & predictor, std::span<const Scene> dataset,
  const std::optional<Perturbation> & perturbation, std::size_t jobs)
{
  std::vector<SceneOutcome> outcomes(dataset.size());
  parallel_for(dataset.size(), jobs, [&](std::size_t i) {
    const Scene & scene = dataset[i];
    auto & outcome = outcomes[i];
    try {
      const auto predictions = perturbation ? predictor.predict(apply_perturbation(scene, *perturbation), scene.targets)
                                            : predictor.predict(scene, scene.targets);
      if (predictions.size() != scene.targets.size()) {
        throw DataError("predictor returned the wrong number of predictions");
      }
      for (std::size_t j = 0; j < scene.targets.size(); ++j) {
        const auto & track = scene.track(scene.targets[j]);
        const auto future = track.future();
        std::vector<Vec2> truth;
        const auto valid_storage = std::make_unique<bool[]>(future.size());
        const std::span<const bool> valid(valid_storage.get(), future.size());
        for (std::size_t t = 0; t < future.size(); ++t) {
          truth.push_back(future[t].position);
          valid_storage[t] = future[t].valid;
        }
        double value = 0.0;
        std::size_t steps = 0;
        const auto k = best_mode(predictions[j], truth, valid, value, steps);
        std::vector<double> errors(truth.size(), std::nan(""));
        for (std::size_t t = 0; t < truth.size(); ++t) {
          if (valid[t]) {
            errors[t] = (predictions[j].modes[k][t] - truth[t]).norm();
          }
        }
        outcome.trajectories.push_back({{scene.id, track.id}, value, steps});
        outcome.step_errors.push_back(std::move(errors));
      }
    } catch (const std::exception & e) {
      outcome.trajectories.clear();
      outcome.step_errors.clear();
      outcome.failure = EvalFailure{scene.id, e.what()};
    }
  });

  std::vector<TrajectoryResult> trajectories;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  std::vector<EvalFailure> failures;
  for (auto & o : outcomes) {
    if (o.failure) {
      failures.push_back(*o.failure);
      continue;
    }
    for (std::size_t j = 0; j < o.trajectories.size(); ++j) {
      trajectories.push_back(o.trajectories[j]);
      const auto & errors = o.step_errors[j];
      if (sums.size() < errors.size()) {
        sums.resize(errors.size(), 0.0);
        counts.resize(errors.size(), 0);
      }
      for (std::size_t t = 0; t < errors.size(); ++t) {
        if (!std::isnan(errors[t])) {
          sums[t] += errors[t];
          ++counts[t];
        }
      }
    }
  }
  auto result = aggregate_results(std::move(trajectories));
  result.failures = std::move(failures);
  for (std::size_t t = 0; t < sums.size(); ++t) {
    result.per_horizon.push_back(counts[t] > 0 ? sums[t] / static_cast<double>(counts[t]) : 0.0);
  }
  return result;
}

Degradation degradation(double original, double perturbed)
{
  Degradation d;
  d.delta = perturbed - original;
  if (original != 0.0) {
    d.relative = d.delta / original;
  }
  return d;
}

Degradation degradation(const EvalResult & original, const EvalResult & perturbed)
{
  return degradation(original.aggregate, perturbed.aggregate);
}

double quantile(std::vector<double> values, double q)
{
  if (values.empty()) {
    throw DataError("quantile: empty sample");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DataError("quantile: q must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo, double hi)
{
  if (bins == 0 || !(hi > lo)) {
    throw ConfigError("histogram: need at least one bin and hi > lo");
  }
  Histogram h;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges.push_back(i == bins ? hi : lo + width * static_cast<double>(i));
  }
  h.counts.assign(bins, 0);
  for (const double v : values) {
    const double pos = std::floor((v - lo) / width);
    std::size_t bin = 0;
    if (pos >= static_cast<double>(bins)) {
      bin = bins - 1;
    } else if (pos > 0.0) {
      bin = static_cast<std::size_t>(pos);
    }
    ++h.counts[bin];
  }
  return h;
}

DeltaDistribution delta_distribution(
  const EvalResult & original, const EvalResult & perturbed, const HistogramRange & range)
{
  std::map<TrajectoryKey, double> base;
  for (const auto & t : original.trajectories) {
    base.emplace(t.key, t.min_ade);
  }
  if (base.size() != perturbed.trajectories.size() || base.empty()) {
    throw DataError("delta_distribution: results cover different or empty trajectory sets");
  }
  DeltaDistribution d;
  for (const auto & t : perturbed.trajectories) {
    const auto it = base.find(t.key);
    if (it == base.end()) {
      throw DataError(
        "delta_distribution: trajectory " + t.key.scene_id + "/" + std::to_string(t.key.agent_id) +
        " missing from the original result");
    }
    d.keys.push_back(t.key);
    d.deltas.push_back(t.min_ade - it->second);
  }
  d.median = quantile(d.deltas, 0.5);
  d.p25 = quantile(d.deltas, 0.25);
  d.p75 = quantile(d.deltas, 0.75);
  d.histogram = make_histogram(d.deltas, range.bins, range.lo, range.hi);
  return d;
}

std::string format_exact(double value)
{
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

void write_eval_csv(const EvalResult & result, std::ostream & out)
{
  out << "scene_id,agent_id,min_ade,valid_steps\n";
  for (const auto & t : result.trajectories) {
    out << t.key.scene_id << ',' << t.key.agent_id << ',' << format_exact(t.min_ade) << ','
        << t.valid_steps << '\n';
  }
}

void write_delta_csv(const DeltaDistribution & distribution, std::ostream & out)
{
  out << "scene_id,agent_id,delta\n";
  for (std::size_t i = 0; i < distribution.keys.size(); ++i) {
    out << distribution.keys[i].scene_id << ',' << distribution.keys[i].agent_id << ','
        << format_exact(distribution.deltas[i]) << '\n';
  }
}

void write_histogram_csv(const Histogram & histogram, std::ostream & out)
{
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
    out << format_exact(histogram.edges[i]) << ',' << format_exact(histogram.edges[i + 1]) << ','
        << histogram.counts[i] << '\n';
  }
}

std::string eval_summary_json(const EvalResult & result)
{
  nlohmann::ordered_json j;
  j["count"] = result.count;
  j["min_ade"] = result.aggregate;
  j["per_horizon"] = result.per_horizon;
  auto failures = nlohmann::ordered_json::array();
  for (const auto & f : result.failures) {
    failures.push_back({{"scene_id", f.scene_id}, {"message", f.message}});
  }
  j["failures"] = failures;
  return j.dump(2) + "\n";
}

}  // namespace trajbench
