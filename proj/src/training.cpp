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

#include "trajbench/training.hpp"

#include "trajbench/errors.hpp"
#include "trajbench/parallel.hpp"
#include "trajbench/perturb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace trajbench
{

double wta_loss(
  const PredictionSet & prediction, std::span<const Vec2> truth, std::span<const bool> valid,
  double lambda)
{
  if (prediction.modes.empty() || prediction.probabilities.size() != prediction.mode_count()) {
    throw DataError("wta_loss: malformed prediction");
  }
  if (!valid.empty() && valid.size() != truth.size()) {
    throw DataError("wta_loss: validity mask length differs from ground truth");
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_mode = 0;
  for (std::size_t k = 0; k < prediction.mode_count(); ++k) {
    const auto & mode = prediction.modes[k];
    if (mode.size() != truth.size()) {
      throw DataError("wta_loss: prediction and ground truth lengths differ");
    }
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      if (!valid.empty() && !valid[t]) {
        continue;
      }
      total += (mode[t] - truth[t]).norm();
      ++n;
    }
    const double ade = n > 0 ? total / static_cast<double>(n) : 0.0;
    if (ade < best) {
      best = ade;
      best_mode = k;
    }
  }
  return best - lambda * std::log(prediction.probabilities[best_mode]);
}

ad::Var wta_loss_sum(
  ad::Tape & tape, std::span<const ad::Var> positions, ad::Var logits,
  std::span<const EncodedSample * const> batch, double lambda)
{
  using ad::Matrix;
  const auto steps = positions.size();
  const auto & lg = tape.value(logits);
  const Eigen::Index modes = lg.rows();
  const auto b_count = batch.size();

  std::vector<std::int32_t> winner(b_count, 0);
  std::vector<double> count(b_count, 0.0);
  Matrix softmax(modes, static_cast<Eigen::Index>(b_count));
  double total = 0.0;
  for (std::size_t b = 0; b < b_count; ++b) {
    const auto & sample = *batch[b];
    if (sample.truth.size() != steps) {
      throw DataError("wta_loss: ground truth length differs from the decoder horizon");
    }
    std::vector<double> ade(static_cast<std::size_t>(modes), 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      if (!sample.truth_valid[t]) {
        continue;
      }
      count[b] += 1.0;
      const auto & p = tape.value(positions[t]);
      for (Eigen::Index k = 0; k < modes; ++k) {
        const Vec2 d = p.block(2 * k, static_cast<Eigen::Index>(b), 2, 1) - sample.truth[t];
        ade[static_cast<std::size_t>(k)] += d.norm();
      }
    }
    std::size_t best = 0;
    for (std::size_t k = 0; k < ade.size(); ++k) {
      if (count[b] > 0.0) {
        ade[k] /= count[b];
      }
      if (ade[k] < ade[best]) {
        best = k;
      }
    }
    for (std::size_t k = 0; k < ade.size(); ++k) {
      if (k != best && std::abs(ade[k] - ade[best]) <= 1e-12 * std::max(1.0, ade[best])) {
        tape.mark_ambiguous();
      }
    }
    winner[b] = static_cast<std::int32_t>(best);
    tape.decisions().push_back(winner[b]);

    const auto col = lg.col(static_cast<Eigen::Index>(b));
    const double m = col.maxCoeff();
    const Eigen::VectorXd e = (col.array() - m).exp().matrix();
    const double z = e.sum();
    softmax.col(static_cast<Eigen::Index>(b)) = e / z;
    const double nll = m + std::log(z) - col(static_cast<Eigen::Index>(best));
    total += ade[best] + lambda * nll;
  }

  bool ng = tape.needs_grad(logits);
  for (const auto p : positions) {
    ng = ng || tape.needs_grad(p);
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  std::vector<ad::Var> inputs(positions.begin(), positions.end());
  std::vector<std::vector<Vec2>> truth;
  std::vector<std::vector<bool>> truth_valid;
  if (tape.recording() && ng) {
    for (const auto * s : batch) {
      truth.push_back(s->truth);
      truth_valid.push_back(s->truth_valid);
    }
  }
  return tape.push(
    std::move(out), ng,
    [inputs, logits, winner, count, softmax, lambda, truth = std::move(truth),
     truth_valid = std::move(truth_valid)](ad::Tape & t, std::int32_t self) {
      const double g = t.grad(self)(0, 0);
      const auto b_count = winner.size();
      for (std::size_t step = 0; step < inputs.size(); ++step) {
        if (!t.needs_grad(inputs[step])) {
          continue;
        }
        const auto & p = t.value(inputs[step]);
        Matrix d = Matrix::Zero(p.rows(), p.cols());
        for (std::size_t b = 0; b < b_count; ++b) {
          if (!truth_valid[b][step] || count[b] == 0.0) {
            continue;
          }
          const Eigen::Index row = 2 * winner[b];
          const auto col = static_cast<Eigen::Index>(b);
          const Vec2 diff = p.block(row, col, 2, 1) - truth[b][step];
          const double norm = diff.norm();
          if (norm > 0.0) {
            d.block(row, col, 2, 1) = g * diff / (norm * count[b]);
          }
        }
        t.accumulate(inputs[step], d);
      }
      if (t.needs_grad(logits)) {
        Matrix d = softmax;
        for (std::size_t b = 0; b < b_count; ++b) {
          d(winner[b], static_cast<Eigen::Index>(b)) -= 1.0;
        }
        t.accumulate(logits, (g * lambda) * d);
      }
    });
}

void TrainConfig::validate() const
{
  if (epochs == 0 || batch_size == 0 || chunk_size == 0 || jobs == 0) {
    throw ConfigError("train: epochs, batch_size, chunk_size and jobs must be positive");
  }
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("train: step_size must be finite and non-negative");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train: moment decays must lie in [0, 1)");
  }
  if (!(epsilon > 0.0) || !(clip_norm > 0.0)) {
    throw ConfigError("train: epsilon and clip_norm must be positive");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("train: validation_fraction must lie in (0, 1)");
  }
}

namespace
{

struct SampleRef
{
  std::size_t scene;
  AgentId target;
};

struct ChunkResult
{
  double loss{0.0};
  std::vector<ad::Matrix> grads;
};

ChunkResult evaluate_chunk(
  const RecurrentModel & model, std::span<const Scene> scenes, std::span<const SampleRef> refs,
  bool with_gradients)
{
  std::vector<EncodedSample> samples;
  samples.reserve(refs.size());
  for (const auto & r : refs) {
    samples.push_back(encode_sample(model, scenes[r.scene], r.target));
  }
  std::vector<const EncodedSample *> ptrs;
  for (const auto & s : samples) {
    ptrs.push_back(&s);
  }
  ad::Tape tape(with_gradients);
  const auto params = tape.parameters(model.parameters());
  const auto out = forward(tape, model, params, ptrs);
  const auto loss = wta_loss_sum(tape, out.positions, out.logits, ptrs);
  ChunkResult result;
  result.loss = tape.value(loss)(0, 0);
  if (with_gradients) {
    tape.backward(loss);
    result.grads = tape.parameter_gradients(model.parameters());
  }
  return result;
}

std::vector<SampleRef> sample_refs(std::span<const Scene> scenes, std::span<const std::size_t> indices)
{
  std::vector<SampleRef> refs;
  for (const auto i : indices) {
    for (const auto t : scenes[i].targets) {
      refs.push_back({i, t});
    }
  }
  return refs;
}

// Sum of chunk losses over `refs`, chunks of fixed size evaluated on `jobs` threads.
double loss_sum(
  const RecurrentModel & model, std::span<const Scene> scenes, std::span<const SampleRef> refs,
  std::size_t chunk, std::size_t jobs)
{
  const std::size_t n_chunks = (refs.size() + chunk - 1) / chunk;
  std::vector<double> losses(n_chunks, 0.0);
  parallel_for(n_chunks, jobs, [&](std::size_t c) {
    const auto begin = c * chunk;
    const auto len = std::min(chunk, refs.size() - begin);
    losses[c] = evaluate_chunk(model, scenes, refs.subspan(begin, len), false).loss;
  });
  double total = 0.0;
  for (const double l : losses) {
    total += l;
  }
  return total;
}

std::string format_double(double v)
{
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

double mean_loss(const RecurrentModel & model, std::span<const Scene> dataset, std::size_t jobs)
{
  std::vector<std::size_t> all(dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = i;
  }
  const auto refs = sample_refs(dataset, all);
  if (refs.empty()) {
    throw DataError("mean_loss: dataset has no targets");
  }
  return loss_sum(model, dataset, refs, 16, jobs) / static_cast<double>(refs.size());
}

TrainResult train(
  RecurrentModel & model, std::span<const Scene> dataset, const TrainConfig & config, std::ostream * log)
{
  config.validate();
  if (dataset.empty()) {
    throw DataError("train: empty dataset");
  }

  // Split by base scene id so perturbed copies follow their originals.
  std::vector<std::string> bases;
  std::set<std::string> seen;
  for (const auto & s : dataset) {
    auto b = base_scene_id(s.id);
    if (seen.insert(b).second) {
      bases.push_back(std::move(b));
    }
  }
  std::mt19937_64 split_rng(derive_seed(config.seed, "validation-split"));
  std::shuffle(bases.begin(), bases.end(), split_rng);
  std::set<std::string> validation_bases;
  if (bases.size() >= 2) {
    auto n_val = static_cast<std::size_t>(
      std::ceil(config.validation_fraction * static_cast<double>(bases.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, bases.size() - 1);
    validation_bases.insert(bases.begin(), bases.begin() + static_cast<std::ptrdiff_t>(n_val));
  }
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (validation_bases.count(base_scene_id(dataset[i].id)) != 0) {
      val_idx.push_back(i);
    } else {
      train_idx.push_back(i);
    }
  }
  if (val_idx.empty()) {
    val_idx = train_idx;
  }

  if (!config.fine_tune) {
    std::vector<Scene> train_scenes;
    train_scenes.reserve(train_idx.size());
    for (const auto i : train_idx) {
      train_scenes.push_back(dataset[i]);
    }
    model.fit_normalizers(train_scenes);
  }

  auto train_refs = sample_refs(dataset, train_idx);
  const auto val_refs = sample_refs(dataset, val_idx);
  if (train_refs.empty() || val_refs.empty()) {
    throw DataError("train: dataset has no targets");
  }

  auto & params = model.parameters();
  std::vector<ad::Matrix> m1;
  std::vector<ad::Matrix> m2;
  for (const auto & v : params.values) {
    m1.push_back(ad::Matrix::Zero(v.rows(), v.cols()));
    m2.push_back(ad::Matrix::Zero(v.rows(), v.cols()));
  }

  const auto start = std::chrono::steady_clock::now();
  TrainResult result;
  const auto val_loss = [&] {
    return loss_sum(model, dataset, val_refs, config.chunk_size, config.jobs) /
           static_cast<double>(val_refs.size());
  };
  result.initial_val_loss = val_loss();
  double best = result.initial_val_loss;
  auto best_params = params.values;
  std::size_t since_best = 0;
  std::size_t adam_step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::mt19937_64 rng(derive_seed(config.seed, "epoch", static_cast<std::int64_t>(epoch)));
    std::shuffle(train_refs.begin(), train_refs.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < train_refs.size(); begin += config.batch_size) {
      const auto len = std::min(config.batch_size, train_refs.size() - begin);
      const auto batch = std::span<const SampleRef>(train_refs).subspan(begin, len);
      const std::size_t n_chunks = (len + config.chunk_size - 1) / config.chunk_size;
      std::vector<ChunkResult> chunks(n_chunks);
      parallel_for(n_chunks, config.jobs, [&](std::size_t c) {
        const auto cb = c * config.chunk_size;
        const auto cl = std::min(config.chunk_size, len - cb);
        chunks[c] = evaluate_chunk(model, dataset, batch.subspan(cb, cl), true);
      });
      double batch_loss = 0.0;
      std::vector<ad::Matrix> grads = std::move(chunks.front().grads);
      batch_loss += chunks.front().loss;
      for (std::size_t c = 1; c < n_chunks; ++c) {
        batch_loss += chunks[c].loss;
        for (std::size_t p = 0; p < grads.size(); ++p) {
          grads[p] += chunks[c].grads[p];
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDivergence(
          "training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
          std::to_string(begin));
      }
      epoch_loss += batch_loss;
      const double inv = 1.0 / static_cast<double>(len);
      double norm_sq = 0.0;
      for (auto & g : grads) {
        g *= inv;
        norm_sq += g.squaredNorm();
      }
      const double norm = std::sqrt(norm_sq);
      if (!std::isfinite(norm)) {
        throw TrainingDivergence("training diverged: non-finite gradient at epoch " + std::to_string(epoch));
      }
      if (norm > config.clip_norm) {
        for (auto & g : grads) {
          g *= config.clip_norm / norm;
        }
      }
      ++adam_step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(adam_step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(adam_step));
      for (std::size_t p = 0; p < grads.size(); ++p) {
        m1[p] = config.beta1 * m1[p] + (1.0 - config.beta1) * grads[p];
        m2[p] = config.beta2 * m2[p] + (1.0 - config.beta2) * grads[p].cwiseAbs2();
        params.values[p].array() -= config.step_size * (m1[p].array() / c1) /
                                    ((m2[p].array() / c2).sqrt() + config.epsilon);
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(train_refs.size());
    record.val_loss = val_loss();
    record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(record.val_loss)) {
      throw TrainingDivergence("training diverged: non-finite validation loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(record);
    if (log != nullptr) {
      *log << "{\"epoch\":" << record.epoch << ",\"train_loss\":" << format_double(record.train_loss)
           << ",\"val_loss\":" << format_double(record.val_loss)
           << ",\"wall_time\":" << format_double(record.wall_time) << "}\n";
      log->flush();
    }
    if (record.val_loss < best) {
      best = record.val_loss;
      best_params = params.values;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  params.values = std::move(best_params);
  return result;
}

GradCheckResult grad_check(ad::ParameterSet & params, const LossBuilder & loss, double step)
{
  GradCheckResult result;
  ad::Tape tape(true);
  const auto vars = tape.parameters(params);
  const auto root = loss(tape, vars);
  if (tape.ambiguous()) {
    result.tie = true;
    return result;
  }
  tape.backward(root);
  const auto analytic = tape.parameter_gradients(params);
  const auto base_decisions = tape.decisions();

  const auto evaluate = [&](std::vector<std::int32_t> & decisions) {
    ad::Tape t(false);
    const auto v = t.parameters(params);
    const auto r = loss(t, v);
    decisions = t.decisions();
    return t.value(r)(0, 0);
  };
  std::vector<std::int32_t> plus_decisions;
  std::vector<std::int32_t> minus_decisions;
  const auto ratio = [](double diff, double a, double n) { return diff / std::max(1e-8, a + n); };
  for (std::size_t slot = 0; slot < params.size(); ++slot) {
    auto & m = params.values[slot];
    double diff_sq = 0.0;
    double analytic_sq = 0.0;
    double numeric_sq = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double original = m.data()[i];
      m.data()[i] = original + step;
      const double f_plus = evaluate(plus_decisions);
      m.data()[i] = original - step;
      const double f_minus = evaluate(minus_decisions);
      m.data()[i] = original;
      if (plus_decisions != base_decisions || minus_decisions != base_decisions) {
        ++result.skipped;
        continue;
      }
      const double numeric = (f_plus - f_minus) / (2.0 * step);
      const double a = analytic[slot].data()[i];
      result.max_element_error =
        std::max(result.max_element_error, ratio(std::abs(a - numeric), std::abs(a), std::abs(numeric)));
      diff_sq += (a - numeric) * (a - numeric);
      analytic_sq += a * a;
      numeric_sq += numeric * numeric;
      ++result.checked;
    }
    const double group = ratio(std::sqrt(diff_sq), std::sqrt(analytic_sq), std::sqrt(numeric_sq));
    if (group > result.max_relative_error || result.worst_group.empty()) {
      result.max_relative_error = std::max(result.max_relative_error, group);
      result.worst_group = params.names[slot];
    }
  }
  return result;
}

GradCheckResult grad_check(RecurrentModel & model, const Scene & scene, AgentId target, double step)
{
  const auto sample = encode_sample(model, scene, target);
  const EncodedSample * ptr = &sample;
  const std::span<const EncodedSample * const> batch(&ptr, 1);
  return grad_check(
    model.parameters(),
    [&](ad::Tape & tape, std::span<const ad::Var> params) {
      const auto out = forward(tape, model, params, batch);
      return wta_loss_sum(tape, out.positions, out.logits, batch);
    },
    step);
}

}  // namespace trajbench
