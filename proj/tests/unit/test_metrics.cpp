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
#include "trajbench/metrics.hpp"
#include "trajbench/perturb.hpp"
#include "trajbench/predictors.hpp"

#include "../test_util.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

namespace trajbench
{
namespace
{

PredictionSet random_prediction(std::mt19937_64 & rng, std::size_t modes, std::size_t steps)
{
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  PredictionSet p;
  for (std::size_t k = 0; k < modes; ++k) {
    std::vector<Vec2> m;
    for (std::size_t t = 0; t < steps; ++t) {
      m.emplace_back(u(rng), u(rng));
    }
    p.modes.push_back(std::move(m));
    p.probabilities.push_back(1.0 / static_cast<double>(modes));
  }
  return p;
}

std::vector<Vec2> random_path(std::mt19937_64 & rng, std::size_t steps)
{
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::vector<Vec2> out;
  for (std::size_t t = 0; t < steps; ++t) {
    out.emplace_back(u(rng), u(rng));
  }
  return out;
}

double brute_force_min_ade(const PredictionSet & p, const std::vector<Vec2> & truth)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & mode : p.modes) {
    double sum = 0.0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      sum += std::hypot(mode[t].x() - truth[t].x(), mode[t].y() - truth[t].y());
    }
    best = std::min(best, sum / static_cast<double>(truth.size()));
  }
  return best;
}

TEST(MinAde, ExactModeGivesZero)
{
  std::mt19937_64 rng(1);
  auto p = random_prediction(rng, 4, 80);
  const auto truth = p.modes[2];
  EXPECT_EQ(min_ade(p, truth), 0.0);
}

TEST(MinAde, UniformOffset)
{
  std::mt19937_64 rng(1);
  const auto truth = random_path(rng, 80);
  PredictionSet p;
  p.modes.emplace_back();
  for (const auto & x : truth) {
    p.modes[0].push_back(x + Vec2(0.3, 0.4));
  }
  p.probabilities = {1.0};
  EXPECT_NEAR(min_ade(p, truth), 0.5, 1e-12);
}

TEST(MinAde, MatchesBruteForce)
{
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = 1 + static_cast<std::size_t>(i % 6);
    const auto p = random_prediction(rng, k, 80);
    const auto truth = random_path(rng, 80);
    EXPECT_NEAR(min_ade(p, truth), brute_force_min_ade(p, truth), 1e-9);
  }
}

TEST(MinAde, Properties)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_prediction(rng, 6, 30);
    const auto truth = random_path(rng, 30);
    const double full = min_ade(p, truth);
    PredictionSet prefix;
    for (std::size_t k = 0; k < p.mode_count(); ++k) {
      PredictionSet single;
      single.modes = {p.modes[k]};
      single.probabilities = {1.0};
      EXPECT_LE(full, min_ade(single, truth));
      prefix.modes.push_back(p.modes[k]);
      prefix.probabilities.assign(k + 1, 1.0 / static_cast<double>(k + 1));
      if (k > 0) {
        PredictionSet shorter = prefix;
        shorter.modes.pop_back();
        shorter.probabilities.assign(k, 1.0 / static_cast<double>(k));
        EXPECT_LE(min_ade(prefix, truth), min_ade(shorter, truth));
      }
    }
    // Rigid motion applied to both sides.
    const double a = u(rng);
    const Vec2 shift(u(rng) * 100.0, u(rng) * 100.0);
    const auto move = [&](const Vec2 & x) -> Vec2 {
      return Vec2(std::cos(a) * x.x() - std::sin(a) * x.y(), std::sin(a) * x.x() + std::cos(a) * x.y()) + shift;
    };
    PredictionSet moved = p;
    std::vector<Vec2> moved_truth;
    for (auto & mode : moved.modes) {
      std::transform(mode.begin(), mode.end(), mode.begin(), move);
    }
    std::transform(truth.begin(), truth.end(), std::back_inserter(moved_truth), move);
    EXPECT_NEAR(min_ade(moved, moved_truth), full, 1e-9);
    // Uniform scaling.
    PredictionSet scaled = p;
    std::vector<Vec2> scaled_truth;
    for (auto & mode : scaled.modes) {
      for (auto & x : mode) {
        x *= 2.5;
      }
    }
    for (const auto & x : truth) {
      scaled_truth.push_back(2.5 * x);
    }
    EXPECT_NEAR(min_ade(scaled, scaled_truth), 2.5 * full, 1e-9);
  }
}

TEST(MinAde, ValidMaskAndErrors)
{
  std::mt19937_64 rng(4);
  auto p = random_prediction(rng, 2, 4);
  auto truth = p.modes[0];
  truth[3] += Vec2(10.0, 0.0);
  const bool mask[] = {true, true, true, false};
  EXPECT_EQ(min_ade(p, truth, mask), 0.0);
  const bool none[] = {false, false, false, false};
  EXPECT_THROW(min_ade(p, truth, none), DataError);
  truth.pop_back();
  EXPECT_THROW(min_ade(p, truth), DataError);
  truth = p.modes[0];
  truth[1].x() = std::nan("");
  EXPECT_THROW(min_ade(p, truth), DataError);
}

TEST(Evaluate, CvOnConstantVelocityScenesIsExact)
{
  std::vector<Scene> data;
  for (int i = 0; i < 5; ++i) {
    auto s = testing::two_agent_scene();
    s.id = "cv-" + std::to_string(i);
    s.targets = {1, 2};
    data.push_back(s);
  }
  ConstantVelocityPredictor cv;
  const auto r = evaluate(cv, data);
  EXPECT_EQ(r.count, 10u);
  EXPECT_LT(r.aggregate, 1e-9);
  EXPECT_EQ(r.per_horizon.size(), 80u);
  EXPECT_TRUE(r.failures.empty());
  for (const auto & p : {Perturbation::remove_road(), Perturbation::late_detection(), Perturbation::heading_offset()}) {
    EXPECT_EQ(evaluate(cv, data, p), r);
  }
}

TEST(Evaluate, SingleSceneAggregateAndFailures)
{
  auto s = testing::two_agent_scene();
  s.tracks[0].states[30].position += Vec2(2.0, 0.0);
  ConstantVelocityPredictor cv;
  const std::vector<Scene> one{s};
  const auto r = evaluate(cv, one);
  ASSERT_EQ(r.count, 1u);
  EXPECT_EQ(r.aggregate, r.trajectories[0].min_ade);
  EXPECT_NEAR(r.aggregate, 2.0 / 80.0, 1e-12);
  EXPECT_EQ(r.trajectories[0].key.agent_id, 1);

  auto broken = s;
  broken.id = "broken";
  broken.targets = {77};
  const std::vector<Scene> two{s, broken};
  const auto with_failure = evaluate(cv, two);
  EXPECT_EQ(with_failure.count, 1u);
  ASSERT_EQ(with_failure.failures.size(), 1u);
  EXPECT_EQ(with_failure.failures[0].scene_id, "broken");
}

TEST(Evaluate, InvalidFutureStepsAreSkipped)
{
  auto s = testing::two_agent_scene();
  s.tracks[0].states[50] = AgentState::invalid();
  ConstantVelocityPredictor cv;
  const std::vector<Scene> one{s};
  const auto r = evaluate(cv, one);
  EXPECT_EQ(r.trajectories[0].valid_steps, 79u);
  EXPECT_LT(r.aggregate, 1e-9);
}

TEST(Evaluate, IndependentOfJobs)
{
  std::mt19937_64 rng(5);
  std::vector<Scene> data;
  for (int i = 0; i < 40; ++i) {
    data.push_back(testing::random_scene(rng, "j" + std::to_string(i)));
  }
  ConstantVelocityPredictor cv;
  EXPECT_EQ(evaluate(cv, data, std::nullopt, 1), evaluate(cv, data, std::nullopt, 4));
}

TEST(Degradation, Arithmetic)
{
  const auto d = degradation(1.0, 2.1079);
  EXPECT_NEAR(d.delta, 1.1079, 1e-12);
  EXPECT_NEAR(*d.relative * 100.0, 110.79, 1e-9);
  const auto improved = degradation(1.0, 0.985);
  EXPECT_NEAR(*improved.relative * 100.0, -1.5, 1e-9);
  const auto same = degradation(1.7, 1.7);
  EXPECT_EQ(same.delta, 0.0);
  EXPECT_EQ(*same.relative, 0.0);
  EXPECT_FALSE(degradation(0.0, 1.0).relative.has_value());
}

// Reference quantile: linear interpolation at h = (n - 1) q.
double quantile_oracle(std::vector<double> v, double q)
{
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TEST(Quantile, DefinitionAndOracle)
{
  EXPECT_EQ(quantile({-1.0, 0.0, 1.0}, 0.5), 0.0);
  EXPECT_EQ(quantile({-1.0, 0.0, 1.0}, 0.25), -0.5);
  EXPECT_EQ(quantile({-1.0, 0.0, 1.0}, 0.75), 0.5);
  EXPECT_EQ(quantile({4.0}, 0.3), 4.0);
  EXPECT_THROW(quantile({}, 0.5), DataError);
  EXPECT_THROW(quantile({1.0}, 1.5), DataError);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(1 + static_cast<std::size_t>(i));
    for (auto & x : v) {
      x = g(rng);
    }
    for (double q : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      EXPECT_NEAR(quantile(v, q), quantile_oracle(v, q), 1e-12);
    }
  }
}

TEST(Histogram, CountsAreConserved)
{
  const std::vector<double> v = {-5.0, -2.0, -0.15, 0.02, 0.05, 1.99, 2.0, 7.0};
  const auto h = make_histogram(v, 40, -2.0, 2.0);
  ASSERT_EQ(h.edges.size(), 41u);
  ASSERT_EQ(h.counts.size(), 40u);
  EXPECT_EQ(h.edges.front(), -2.0);
  EXPECT_EQ(h.edges.back(), 2.0);
  std::size_t total = 0;
  for (auto c : h.counts) {
    total += c;
  }
  EXPECT_EQ(total, v.size());
  EXPECT_EQ(h.counts.front(), 2u);
  EXPECT_EQ(h.counts.back(), 3u);
  EXPECT_EQ(h.counts[18], 1u);
  EXPECT_EQ(h.counts[20], 2u);
}

EvalResult result_of(std::vector<double> values)
{
  std::vector<TrajectoryResult> t;
  for (std::size_t i = 0; i < values.size(); ++i) {
    t.push_back({{"s" + std::to_string(i), 1}, values[i], 80});
  }
  return aggregate_results(std::move(t));
}

TEST(DeltaDistribution, IdenticalResults)
{
  const auto r = result_of({1.0, 2.0, 0.5});
  const auto d = delta_distribution(r, r);
  EXPECT_EQ(d.median, 0.0);
  EXPECT_EQ(d.p25, 0.0);
  EXPECT_EQ(d.p75, 0.0);
}

TEST(DeltaDistribution, QuartilesOfFixture)
{
  const auto d = delta_distribution(result_of({1.0, 1.0, 1.0}), result_of({0.0, 1.0, 2.0}));
  EXPECT_EQ(d.median, 0.0);
  EXPECT_EQ(d.p25, -0.5);
  EXPECT_EQ(d.p75, 0.5);
  std::size_t total = 0;
  for (auto c : d.histogram.counts) {
    total += c;
  }
  EXPECT_EQ(total, 3u);
}

TEST(DeltaDistribution, KeyMismatchThrows)
{
  auto a = result_of({1.0, 2.0});
  auto b = result_of({1.0, 2.0, 3.0});
  EXPECT_THROW(delta_distribution(a, b), DataError);
  EXPECT_THROW(delta_distribution(result_of({}), result_of({})), DataError);
}

TEST(AggregateResults, MeanOfTrajectories)
{
  const auto r = result_of({1.0, 2.0, 4.5});
  EXPECT_EQ(r.count, 3u);
  EXPECT_NEAR(r.aggregate, 7.5 / 3.0, 1e-12);
}

TEST(Export, CsvAndSummary)
{
  const auto r = result_of({1.0, 0.1});
  std::ostringstream csv;
  write_eval_csv(r, csv);
  EXPECT_EQ(csv.str(), "scene_id,agent_id,min_ade,valid_steps\ns0,1,1,80\ns1,1,0.1,80\n");
  const auto d = delta_distribution(r, result_of({1.5, 0.1}));
  std::ostringstream dcsv;
  write_delta_csv(d, dcsv);
  EXPECT_EQ(dcsv.str(), "scene_id,agent_id,delta\ns0,1,0.5\ns1,1,0\n");
  std::ostringstream hcsv;
  write_histogram_csv(make_histogram(std::vector<double>{0.5}, 2, 0.0, 1.0), hcsv);
  EXPECT_EQ(hcsv.str(), "bin_left,bin_right,count\n0,0.5,0\n0.5,1,1\n");
  const auto j = nlohmann::json::parse(eval_summary_json(r));
  EXPECT_EQ(j.at("count").get<std::size_t>(), 2u);
  EXPECT_EQ(j.at("min_ade").get<double>(), r.aggregate);
  EXPECT_EQ(format_exact(0.1), "0.1");
  EXPECT_EQ(std::stod(format_exact(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace trajbench
