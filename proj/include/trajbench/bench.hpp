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

#ifndef TRAJBENCH__BENCH_HPP_
#define TRAJBENCH__BENCH_HPP_

#include "trajbench/metrics.hpp"
#include "trajbench/perturb.hpp"
#include "trajbench/recurrent_model.hpp"
#include "trajbench/synthgen.hpp"
#include "trajbench/training.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace trajbench
{

constexpr const char * kVersion = "0.1.0";

enum class ModelKind { kConstantVelocity, kRecurrent, kRecurrentEnvAware };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct ModelSpec
{
  std::string name;
  ModelKind kind{ModelKind::kConstantVelocity};
  ModelConfig model;
  TrainConfig train;
  // Epochs when training on an augmented set, which holds twice the scenes.
  std::size_t augmented_epochs{12};
};

/// Scenes come from files when both paths are set, otherwise from the
/// generator. Generator seeds are derived from BenchConfig::seed.
struct DatasetSpec
{
  std::string train_path;
  std::string test_path;
  GenConfig train;
  GenConfig test;
};

/// Which agents of each scene are scored; defaults keep every target.
struct TargetFilter
{
  std::size_t max_per_scene{0};     // 0 keeps all
  std::vector<AgentType> types;     // empty keeps all
};

struct BenchConfig
{
  DatasetSpec dataset;
  std::vector<ModelSpec> roster;
  std::vector<Perturbation> perturbations;
  bool retrain{true};
  std::uint64_t seed{1};
  std::size_t jobs{1};
  std::string output_dir{"bench-out"};
  HistogramRange histogram;
  TargetFilter targets;
  // Reuse checkpoints already present in the output directory.
  bool resume{false};

  /// Desk-scale default: cv, lstm and lstm-env on 2000/400 generated scenes
  /// against the three disruptive perturbations, with retraining.
  static BenchConfig defaults();

  /// Throws ConfigError on an empty roster, duplicate names, invalid nested
  /// configs or missing dataset files.
  void validate() const;
};

std::string bench_config_to_json(const BenchConfig & config);
/// Missing keys keep their defaults; unknown keys are rejected (ConfigError).
BenchConfig bench_config_from_json(const std::string & text);
BenchConfig load_bench_config(const std::filesystem::path & path);

/// Seeds used for each randomized stage.
std::uint64_t train_data_seed(const BenchConfig & config);
std::uint64_t test_data_seed(const BenchConfig & config);

/// Loaded or generated (train, test) scenes after the target filter.
std::pair<std::vector<Scene>, std::vector<Scene>> load_datasets(const BenchConfig & config);

/// Keeps the targets selected by `filter`; scenes left without targets are dropped.
std::vector<Scene> filter_targets(std::vector<Scene> scenes, const TargetFilter & filter);

/// Trains one roster model ("cv" needs no training). `augment` selects the
/// training set augment_dataset(train, *augment). `tag` feeds the seeds.
/// Window of the first track of `scenes`; the defaults when there is none.
WindowConfig window_of(std::span<const Scene> scenes);

std::shared_ptr<const Predictor> build_predictor(
  const ModelSpec & spec, std::span<const Scene> train, const BenchConfig & config,
  const std::optional<Perturbation> & augment, std::ostream * log,
  std::shared_ptr<RecurrentModel> * trained = nullptr);

struct ConditionResult
{
  std::string condition;  // "original" or a perturbation name
  double min_ade{0.0};
  std::size_t count{0};
  std::size_t failures{0};
  // Against the same row's original condition; empty on the original itself.
  std::optional<Degradation> degradation;
  std::optional<DeltaDistribution> distribution;
};

struct ReportRow
{
  std::string model;
  std::string training;  // "original" or "augmented:<perturbation>"
  std::vector<ConditionResult> conditions;
};

struct Provenance
{
  std::uint64_t seed{0};
  std::string config_hash;
  std::string version{kVersion};
  std::size_t train_scenes{0};
  std::size_t test_scenes{0};
};

struct TimingEntry
{
  std::string stage;
  double seconds{0.0};
};

struct BenchmarkReport
{
  std::vector<std::string> perturbations;
  std::vector<ReportRow> rows;
  Provenance provenance;
  // Wall-clock data, kept out of the deterministic report files.
  std::vector<TimingEntry> timing;
};

/// FNV-1a hash (hex) of the canonical JSON form of `config`.
std::string config_hash(const BenchConfig & config);

/**
 * @brief Runs the complete benchmark.
 *
 * Trains every roster model on the training set, evaluates each on the test
 * set unperturbed and under every perturbation, and with `retrain` also trains
 * a fresh copy of every learned model on each augmented set and evaluates it
 * on the original and that perturbation. Checkpoints, per-trajectory results
 * and training logs are written to the output directory as they are produced.
 * A failing stage is rethrown with its name prepended.
 */
BenchmarkReport run_benchmark(const BenchConfig & config);

}  // namespace trajbench

#endif  // TRAJBENCH__BENCH_HPP_
