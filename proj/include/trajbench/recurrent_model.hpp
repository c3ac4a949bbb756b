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

#ifndef TRAJBENCH__RECURRENT_MODEL_HPP_
#define TRAJBENCH__RECURRENT_MODEL_HPP_

#include "trajbench/autodiff.hpp"
#include "trajbench/features.hpp"
#include "trajbench/frames.hpp"
#include "trajbench/predictors.hpp"
#include "trajbench/scene.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace trajbench
{

struct ModelConfig
{
  std::size_t layers{3};
  std::size_t hidden{128};
  std::size_t modes{6};
  bool env_aware{false};
  std::size_t history{11};
  std::size_t future{80};
  double dt{0.1};
  std::size_t road_budget{128};
  std::size_t max_neighbors{8};
  // Decoder feedback positions are divided by this (m).
  double position_scale{50.0};
  // Decoder outputs are velocity residuals in units of this (m/s).
  double velocity_scale{5.0};

  // Smaller network used for CPU-scale benchmark runs.
  static ModelConfig desk(bool env_aware);

  bool operator==(const ModelConfig &) const = default;
};

/// Slots of each tensor in the model's ParameterSet.
struct ParameterLayout
{
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<std::size_t> enc_wx, enc_wh, enc_b;
  std::size_t road_w1{kNone}, road_b1{kNone}, road_w2{kNone}, road_b2{kNone};
  std::vector<std::size_t> init_w, init_b;
  std::vector<std::size_t> dec_wx, dec_wh, dec_b;
  std::size_t out_w{kNone}, out_b{kNone};
  std::size_t prob_w{kNone}, prob_b{kNone};
};

/**
 * @brief LSTM encoder-decoder trajectory model.
 *
 * The encoder consumes the target's normalized history. With `env_aware`, the
 * nearest neighbors are encoded by the same encoder and max-pooled, and road
 * points pass through a two-layer point encoder and are max-pooled; both are
 * concatenated to the target summary. The decoder is unrolled for `future`
 * steps, each step consuming the previously predicted positions of all modes,
 * and emits per-mode velocity residuals on top of the current velocity. A
 * linear head on the summary gives mode logits.
 */
class RecurrentModel
{
public:
  explicit RecurrentModel(ModelConfig config, std::uint64_t seed = 0);

  const ModelConfig & config() const { return config_; }
  ad::ParameterSet & parameters() { return params_; }
  const ad::ParameterSet & parameters() const { return params_; }

  const ParameterLayout & layout() const { return layout_; }

  const Normalizer & history_normalizer() const { return history_norm_; }
  const Normalizer & road_normalizer() const { return road_norm_; }
  void set_normalizers(Normalizer history, Normalizer road);

  // Fits both normalizers on target-frame features of every target of `scenes`.
  void fit_normalizers(std::span<const Scene> scenes);

  // Re-draws every parameter: uniform in +-1/sqrt(fan-in), forget-gate bias 1.
  void initialize(std::uint64_t seed);

  // Input width of the first encoder layer.
  static constexpr Eigen::Index kInputDim = feature::kDim;
  Eigen::Index context_dim() const;

private:
  void build_parameters();

  ModelConfig config_;
  ad::ParameterSet params_;
  ParameterLayout layout_;
  Normalizer history_norm_;
  Normalizer road_norm_;
};

/// Model-ready encoding of one (scene, target) pair in the target frame.
struct EncodedSample
{
  std::string scene_id;
  AgentId agent_id{0};
  Eigen::MatrixXd history;                 // observed x feature::kDim
  std::vector<Eigen::MatrixXd> neighbors;  // nearest first
  RoadFeatures road;
  Vec2 velocity{0.0, 0.0};                 // raw current velocity, target frame
  PoseTransform transform;                 // target frame -> world
  std::vector<Vec2> truth;                 // target-frame future positions
  std::vector<bool> truth_valid;
};

/// Perturbation-free preprocessing: target frame, kinematics, encoding.
EncodedSample encode_sample(const RecurrentModel & model, const Scene & world_scene, AgentId target);

struct ForwardOutput
{
  std::vector<ad::Var> positions;  // one 2K x B node per future step (target frame)
  ad::Var logits;                  // K x B
};

/// Builds the computation for a batch on `tape` using parameter leaves `params`.
ForwardOutput forward(
  ad::Tape & tape, const RecurrentModel & model, std::span<const ad::Var> params,
  std::span<const EncodedSample * const> batch);

/// Predictions in the target frame of each sample.
std::vector<PredictionSet> predict_encoded(
  const RecurrentModel & model, std::span<const EncodedSample * const> batch);

/// Prediction for one target of a world-frame scene, returned in the world frame.
PredictionSet predict_recurrent(const RecurrentModel & model, const Scene & world_scene, AgentId target);

class RecurrentPredictor : public Predictor
{
public:
  RecurrentPredictor(std::string name, std::shared_ptr<const RecurrentModel> model)
  : name_(std::move(name)), model_(std::move(model))
  {
  }

  std::string name() const override { return name_; }
  std::vector<PredictionSet> predict(const Scene & scene, std::span<const AgentId> targets) const override;

  const RecurrentModel & model() const { return *model_; }

private:
  std::string name_;
  std::shared_ptr<const RecurrentModel> model_;
};

}  // namespace trajbench

#endif  // TRAJBENCH__RECURRENT_MODEL_HPP_
