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

#ifndef TRAJBENCH__TRAINING_HPP_
#define TRAJBENCH__TRAINING_HPP_

#include "trajbench/autodiff.hpp"
#include "trajbench/predictors.hpp"
#include "trajbench/recurrent_model.hpp"
#include "trajbench/scene.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace trajbench
{

constexpr double kWtaProbabilityWeight = 0.1;

/// Winner-takes-all loss of one prediction: mean L2 error of the closest mode
/// (lowest index on ties) plus `lambda` times its negative log probability.
/// Ground-truth steps flagged invalid are skipped.
double wta_loss(
  const PredictionSet & prediction, std::span<const Vec2> truth, std::span<const bool> valid = {},
  double lambda = kWtaProbabilityWeight);

/// Tape version: sum over the batch of per-sample WTA losses. `positions` are
/// the per-step 2K x B nodes, `logits` is K x B, and `truth[b]` holds the
/// target-frame future of sample b.
ad::Var wta_loss_sum(
  ad::Tape & tape, std::span<const ad::Var> positions, ad::Var logits,
  std::span<const EncodedSample * const> batch, double lambda = kWtaProbabilityWeight);

struct TrainConfig
{
  std::size_t epochs{20};
  std::size_t batch_size{32};
  double step_size{1e-3};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
  double clip_norm{1.0};
  std::uint64_t seed{1};
  double validation_fraction{0.1};
  std::size_t patience{5};
  // Gradient work units; fixed so results do not depend on `jobs`.
  std::size_t chunk_size{16};
  std::size_t jobs{1};
  // Keep the model's normalizers instead of refitting them.
  bool fine_tune{false};

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

struct EpochRecord
{
  std::size_t epoch{0};
  double train_loss{0.0};
  double val_loss{0.0};
  double wall_time{0.0};
};

struct TrainResult
{
  double initial_val_loss{0.0};
  std::vector<EpochRecord> history;
  std::size_t best_epoch{0};
};

/**
 * @brief Adam training of `model` on every target of `dataset`.
 *
 * Scenes are split by base scene id into training and validation parts, so a
 * perturbed copy always lands with its original. Normalizers are refit on the
 * training part unless fine-tuning. Batches are preprocessed lazily; gradients
 * are clipped to `clip_norm`; training stops early after `patience` epochs
 * without validation improvement and the best parameters are restored. Writes
 * one JSON record per epoch to `log` when given. Throws TrainingDivergence on
 * a non-finite loss.
 */
TrainResult train(
  RecurrentModel & model, std::span<const Scene> dataset, const TrainConfig & config,
  std::ostream * log = nullptr);

/// Mean WTA loss over every target of `dataset`.
double mean_loss(const RecurrentModel & model, std::span<const Scene> dataset, std::size_t jobs = 1);

struct GradCheckResult
{
  // Max over parameter groups of |g_a - g_n| / max(1e-8, |g_a| + |g_n|), with
  // |.| the Euclidean norm over the group's checked entries.
  double max_relative_error{0.0};
  std::string worst_group;
  // Same ratio per scalar entry. Entries whose true gradient is below the
  // finite-difference noise floor (about 1e-11 here) dominate this figure.
  double max_element_error{0.0};
  std::size_t checked{0};
  // Entries whose finite-difference evaluation crossed a max/argmin switch.
  std::size_t skipped{0};
  // The base point is a WTA tie; nothing was checked.
  bool tie{false};
};

using LossBuilder = std::function<ad::Var(ad::Tape &, std::span<const ad::Var>)>;

/// Central finite differences (step `step`) against reverse-mode gradients for
/// every scalar of `params`, summarized per parameter group and per entry.
GradCheckResult grad_check(ad::ParameterSet & params, const LossBuilder & loss, double step = 1e-5);

/// Gradient check of the WTA loss of `model` on one target of `scene`.
GradCheckResult grad_check(RecurrentModel & model, const Scene & scene, AgentId target, double step = 1e-5);

}  // namespace trajbench

#endif  // TRAJBENCH__TRAINING_HPP_
