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

#include "trajbench/recurrent_model.hpp"

#include "trajbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

namespace trajbench
{

ModelConfig ModelConfig::desk(bool env_aware)
{
  ModelConfig c;
  c.layers = 2;
  c.hidden = 32;
  c.env_aware = env_aware;
  return c;
}

RecurrentModel::RecurrentModel(ModelConfig config, std::uint64_t seed)
: config_(config),
  history_norm_(Normalizer::identity(feature::kDim)),
  road_norm_(Normalizer::identity(road_feature::kDim))
{
  if (config_.layers == 0 || config_.hidden == 0 || config_.modes == 0 || config_.history == 0 ||
      config_.future == 0) {
    throw ConfigError("model configuration: layers, hidden, modes and window lengths must be positive");
  }
  build_parameters();
  initialize(seed);
}

Eigen::Index RecurrentModel::context_dim() const
{
  const auto h = static_cast<Eigen::Index>(config_.hidden);
  return config_.env_aware ? 3 * h : h;
}

void RecurrentModel::build_parameters()
{
  const auto h = static_cast<Eigen::Index>(config_.hidden);
  const auto k = static_cast<Eigen::Index>(config_.modes);
  const auto ctx = context_dim();
  using ad::Matrix;
  auto & p = params_;
  auto & lay = layout_;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const auto in = l == 0 ? kInputDim : h;
    const auto tag = "enc" + std::to_string(l);
    lay.enc_wx.push_back(p.add(tag + ".wx", Matrix::Zero(4 * h, in)));
    lay.enc_wh.push_back(p.add(tag + ".wh", Matrix::Zero(4 * h, h)));
    lay.enc_b.push_back(p.add(tag + ".b", Matrix::Zero(4 * h, 1)));
  }
  if (config_.env_aware) {
    lay.road_w1 = p.add("road.w1", Matrix::Zero(h, road_feature::kDim));
    lay.road_b1 = p.add("road.b1", Matrix::Zero(h, 1));
    lay.road_w2 = p.add("road.w2", Matrix::Zero(h, h));
    lay.road_b2 = p.add("road.b2", Matrix::Zero(h, 1));
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const auto tag = "init" + std::to_string(l);
    lay.init_w.push_back(p.add(tag + ".w", Matrix::Zero(h, ctx)));
    lay.init_b.push_back(p.add(tag + ".b", Matrix::Zero(h, 1)));
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const auto in = l == 0 ? 2 * k + 1 : h;
    const auto tag = "dec" + std::to_string(l);
    lay.dec_wx.push_back(p.add(tag + ".wx", Matrix::Zero(4 * h, in)));
    lay.dec_wh.push_back(p.add(tag + ".wh", Matrix::Zero(4 * h, h)));
    lay.dec_b.push_back(p.add(tag + ".b", Matrix::Zero(4 * h, 1)));
  }
  lay.out_w = p.add("out.w", Matrix::Zero(2 * k, h));
  lay.out_b = p.add("out.b", Matrix::Zero(2 * k, 1));
  lay.prob_w = p.add("prob.w", Matrix::Zero(k, ctx));
  lay.prob_b = p.add("prob.b", Matrix::Zero(k, 1));
}

void RecurrentModel::initialize(std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  const auto h = static_cast<Eigen::Index>(config_.hidden);
  const auto fill = [&rng](ad::Matrix & m, double fan_in) {
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, j) = u(rng);
      }
    }
  };
  auto & v = params_.values;
  const auto lstm = [&](std::size_t wx, std::size_t wh, std::size_t b) {
    const double fan_in = static_cast<double>(v[wx].cols() + v[wh].cols());
    fill(v[wx], fan_in);
    fill(v[wh], fan_in);
    fill(v[b], fan_in);
    v[b].middleRows(h, h).setOnes();
  };
  const auto dense = [&](std::size_t w, std::size_t b) {
    const double fan_in = static_cast<double>(v[w].cols());
    fill(v[w], fan_in);
    fill(v[b], fan_in);
  };
  for (std::size_t l = 0; l < config_.layers; ++l) {
    lstm(layout_.enc_wx[l], layout_.enc_wh[l], layout_.enc_b[l]);
  }
  if (config_.env_aware) {
    dense(layout_.road_w1, layout_.road_b1);
    dense(layout_.road_w2, layout_.road_b2);
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    dense(layout_.init_w[l], layout_.init_b[l]);
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    lstm(layout_.dec_wx[l], layout_.dec_wh[l], layout_.dec_b[l]);
  }
  dense(layout_.out_w, layout_.out_b);
  dense(layout_.prob_w, layout_.prob_b);
}

void RecurrentModel::set_normalizers(Normalizer history, Normalizer road)
{
  if (history.dim() != feature::kDim || road.dim() != road_feature::kDim) {
    throw DataError("normalizer dimension mismatch");
  }
  history_norm_ = std::move(history);
  road_norm_ = std::move(road);
}

namespace
{

std::vector<const AgentTrack *> nearest_neighbors(const Scene & local, AgentId target, std::size_t limit)
{
  std::vector<std::tuple<double, std::size_t, const AgentTrack *>> candidates;
  for (std::size_t i = 0; i < local.tracks.size(); ++i) {
    const auto & t = local.tracks[i];
    if (t.id == target || !t.current().valid) {
      continue;
    }
    candidates.emplace_back(t.current().position.squaredNorm(), i, &t);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto & a, const auto & b) {
    return std::get<0>(a) < std::get<0>(b) ||
           (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) < std::get<1>(b));
  });
  std::vector<const AgentTrack *> out;
  for (std::size_t i = 0; i < candidates.size() && i < limit; ++i) {
    out.push_back(std::get<2>(candidates[i]));
  }
  return out;
}

}  // namespace

void RecurrentModel::fit_normalizers(std::span<const Scene> scenes)
{
  std::vector<Eigen::VectorXd> rows;
  std::vector<Eigen::VectorXd> road_rows;
  const auto identity_road = Normalizer::identity(road_feature::kDim);
  for (const auto & scene : scenes) {
    for (const auto target : scene.targets) {
      auto local = derive_kinematics(to_target_frame(scene, target).first);
      std::vector<const AgentTrack *> tracks{&local.track(target)};
      if (config_.env_aware) {
        for (const auto * n : nearest_neighbors(local, target, config_.max_neighbors)) {
          tracks.push_back(n);
        }
        const auto road = encode_road(local.road, config_.road_budget, identity_road);
        for (std::size_t i = 0; i < road.valid.size(); ++i) {
          if (road.valid[i]) {
            road_rows.emplace_back(road.points.row(static_cast<Eigen::Index>(i)).transpose());
          }
        }
      }
      for (const auto * t : tracks) {
        for (std::size_t s = 0; s < t->observed_count(); ++s) {
          if (t->states[s].valid) {
            rows.push_back(state_features(t->states[s], t->type, t->deltas[s]));
          }
        }
      }
    }
  }
  if (rows.empty()) {
    throw DataError("fit_normalizers: no valid states in the training data");
  }
  auto history = fit_normalizer(rows);
  const auto hp = history_pass_through_columns();
  history.pass_through(hp);
  auto road = road_rows.empty() ? Normalizer::identity(road_feature::kDim) : fit_normalizer(road_rows);
  const auto rp = road_pass_through_columns();
  road.pass_through(rp);
  set_normalizers(std::move(history), std::move(road));
}

EncodedSample encode_sample(const RecurrentModel & model, const Scene & world_scene, AgentId target)
{
  const auto & cfg = model.config();
  auto [frame_scene, transform] = to_target_frame(world_scene, target);
  const Scene local = derive_kinematics(std::move(frame_scene));
  const auto & track = local.track(target);
  if (track.observed_count() != cfg.history || track.future_count() != cfg.future) {
    throw DataError(
      "scene '" + world_scene.id + "': window lengths do not match the model configuration");
  }
  EncodedSample sample;
  sample.scene_id = world_scene.id;
  sample.agent_id = target;
  sample.transform = transform;
  sample.history = encode_history(track, model.history_normalizer());
  sample.velocity = track.current().velocity;
  if (cfg.env_aware) {
    for (const auto * n : nearest_neighbors(local, target, cfg.max_neighbors)) {
      sample.neighbors.push_back(encode_history(*n, model.history_normalizer()));
    }
    sample.road = encode_road(local.road, cfg.road_budget, model.road_normalizer());
  }
  for (const auto & s : track.future()) {
    sample.truth.push_back(s.position);
    sample.truth_valid.push_back(s.valid);
  }
  return sample;
}

ForwardOutput forward(
  ad::Tape & tape, const RecurrentModel & model, std::span<const ad::Var> params,
  std::span<const EncodedSample * const> batch)
{
  using ad::Matrix;
  using ad::Var;
  const auto & cfg = model.config();
  const auto & lay = model.layout();
  const auto hidden = static_cast<Eigen::Index>(cfg.hidden);
  const auto modes = static_cast<Eigen::Index>(cfg.modes);
  const auto b_count = static_cast<Eigen::Index>(batch.size());
  const auto steps = static_cast<Eigen::Index>(cfg.history);
  const auto P = [&](std::size_t slot) { return params[slot]; };

  // Encoder columns: targets first, then every neighbor of every sample.
  std::vector<const Eigen::MatrixXd *> sequences;
  std::vector<std::int32_t> neighbor_group;
  for (const auto * s : batch) {
    if (s->history.rows() != steps || s->history.cols() != feature::kDim) {
      throw DataError("forward: history encoding has the wrong shape");
    }
    sequences.push_back(&s->history);
  }
  if (cfg.env_aware) {
    for (Eigen::Index b = 0; b < b_count; ++b) {
      for (const auto & n : batch[static_cast<std::size_t>(b)]->neighbors) {
        if (n.rows() != steps || n.cols() != feature::kDim) {
          throw DataError("forward: neighbor encoding has the wrong shape");
        }
        sequences.push_back(&n);
        neighbor_group.push_back(static_cast<std::int32_t>(b));
      }
    }
  }
  const auto n_seq = static_cast<Eigen::Index>(sequences.size());

  std::vector<Var> h(cfg.layers);
  std::vector<Var> c(cfg.layers);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    h[l] = tape.constant(Matrix::Zero(hidden, n_seq));
    c[l] = tape.constant(Matrix::Zero(hidden, n_seq));
  }
  for (Eigen::Index t = 0; t < steps; ++t) {
    Matrix x(feature::kDim, n_seq);
    for (Eigen::Index j = 0; j < n_seq; ++j) {
      x.col(j) = sequences[static_cast<std::size_t>(j)]->row(t).transpose();
    }
    Var input = tape.constant(std::move(x));
    for (std::size_t l = 0; l < cfg.layers; ++l) {
      const Var z = ad::affine2(tape, P(lay.enc_wx[l]), input, P(lay.enc_wh[l]), h[l], P(lay.enc_b[l]));
      const auto state = ad::lstm_cell(tape, z, c[l]);
      h[l] = state.h;
      c[l] = state.c;
      input = state.h;
    }
  }
  const Var summary = h.back();

  Var context;
  if (cfg.env_aware) {
    const Var target_summary = ad::slice_cols(tape, summary, 0, b_count);
    Var neighbor_pool;
    if (n_seq > b_count) {
      const Var neighbor_summary = ad::slice_cols(tape, summary, b_count, n_seq - b_count);
      neighbor_pool = ad::group_max(tape, neighbor_summary, neighbor_group, b_count);
    } else {
      neighbor_pool = tape.constant(Matrix::Zero(hidden, b_count));
    }

    std::vector<std::int32_t> road_group;
    std::vector<Eigen::VectorXd> road_cols;
    for (Eigen::Index b = 0; b < b_count; ++b) {
      const auto & road = batch[static_cast<std::size_t>(b)]->road;
      for (std::size_t i = 0; i < road.valid.size(); ++i) {
        if (road.valid[i]) {
          road_cols.emplace_back(road.points.row(static_cast<Eigen::Index>(i)).transpose());
          road_group.push_back(static_cast<std::int32_t>(b));
        }
      }
    }
    Var road_pool;
    if (!road_cols.empty()) {
      Matrix r(road_feature::kDim, static_cast<Eigen::Index>(road_cols.size()));
      for (std::size_t j = 0; j < road_cols.size(); ++j) {
        r.col(static_cast<Eigen::Index>(j)) = road_cols[j];
      }
      const Var points = tape.constant(std::move(r));
      const Var e1 = ad::tanh(tape, ad::linear(tape, P(lay.road_w1), points, P(lay.road_b1)));
      const Var e2 = ad::tanh(tape, ad::linear(tape, P(lay.road_w2), e1, P(lay.road_b2)));
      road_pool = ad::group_max(tape, e2, road_group, b_count);
    } else {
      road_pool = tape.constant(Matrix::Zero(hidden, b_count));
    }
    const Var parts[] = {target_summary, road_pool, neighbor_pool};
    context = ad::concat_rows(tape, parts);
  } else {
    context = summary;
  }

  ForwardOutput out;
  out.logits = ad::linear(tape, P(lay.prob_w), context, P(lay.prob_b));

  for (std::size_t l = 0; l < cfg.layers; ++l) {
    h[l] = ad::tanh(tape, ad::linear(tape, P(lay.init_w[l]), context, P(lay.init_b[l])));
    c[l] = tape.constant(Matrix::Zero(hidden, b_count));
  }
  Matrix v0(2 * modes, b_count);
  for (Eigen::Index b = 0; b < b_count; ++b) {
    for (Eigen::Index k = 0; k < modes; ++k) {
      v0.block(2 * k, b, 2, 1) = batch[static_cast<std::size_t>(b)]->velocity;
    }
  }
  const Var velocity = tape.constant(std::move(v0));
  Var position = tape.constant(Matrix::Zero(2 * modes, b_count));
  const auto future = static_cast<Eigen::Index>(cfg.future);
  out.positions.reserve(cfg.future);
  for (Eigen::Index t = 0; t < future; ++t) {
    const Var progress = tape.constant(
      Matrix::Constant(1, b_count, static_cast<double>(t) / static_cast<double>(future)));
    const Var parts[] = {ad::scale(tape, position, 1.0 / cfg.position_scale), progress};
    Var input = ad::concat_rows(tape, parts);
    for (std::size_t l = 0; l < cfg.layers; ++l) {
      const Var z = ad::affine2(tape, P(lay.dec_wx[l]), input, P(lay.dec_wh[l]), h[l], P(lay.dec_b[l]));
      const auto state = ad::lstm_cell(tape, z, c[l]);
      h[l] = state.h;
      c[l] = state.c;
      input = state.h;
    }
    const Var residual = ad::linear(tape, P(lay.out_w), input, P(lay.out_b));
    const Var step_velocity = ad::add_scaled(tape, velocity, residual, cfg.velocity_scale);
    position = ad::add_scaled(tape, position, step_velocity, cfg.dt);
    out.positions.push_back(position);
  }
  return out;
}

namespace
{

std::vector<double> softmax(const Eigen::VectorXd & logits)
{
  const double m = logits.maxCoeff();
  std::vector<double> p(static_cast<std::size_t>(logits.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    p[static_cast<std::size_t>(i)] = std::exp(logits(i) - m);
    total += p[static_cast<std::size_t>(i)];
  }
  for (auto & v : p) {
    v /= total;
  }
  return p;
}

}  // namespace

std::vector<PredictionSet> predict_encoded(
  const RecurrentModel & model, std::span<const EncodedSample * const> batch)
{
  if (batch.empty()) {
    return {};
  }
  ad::Tape tape(false);
  const auto params = tape.parameters(model.parameters());
  const auto out = forward(tape, model, params, batch);
  const auto modes = model.config().modes;
  std::vector<PredictionSet> sets(batch.size());
  const Eigen::MatrixXd & logits = tape.value(out.logits);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    auto & set = sets[b];
    set.modes.assign(modes, {});
    for (std::size_t k = 0; k < modes; ++k) {
      set.modes[k].reserve(out.positions.size());
    }
    for (const auto & step : out.positions) {
      const auto & v = tape.value(step);
      for (std::size_t k = 0; k < modes; ++k) {
        set.modes[k].emplace_back(
          v(static_cast<Eigen::Index>(2 * k), static_cast<Eigen::Index>(b)),
          v(static_cast<Eigen::Index>(2 * k + 1), static_cast<Eigen::Index>(b)));
      }
    }
    set.probabilities = softmax(logits.col(static_cast<Eigen::Index>(b)));
  }
  return sets;
}

namespace
{

PredictionSet to_world(PredictionSet set, const PoseTransform & transform)
{
  for (auto & mode : set.modes) {
    mode = from_target_frame(transform, mode);
  }
  return set;
}

}  // namespace

PredictionSet predict_recurrent(const RecurrentModel & model, const Scene & world_scene, AgentId target)
{
  const auto sample = encode_sample(model, world_scene, target);
  const EncodedSample * ptr = &sample;
  auto sets = predict_encoded(model, std::span<const EncodedSample * const>(&ptr, 1));
  return to_world(std::move(sets.front()), sample.transform);
}

std::vector<PredictionSet> RecurrentPredictor::predict(
  const Scene & scene, std::span<const AgentId> targets) const
{
  std::vector<EncodedSample> samples;
  samples.reserve(targets.size());
  for (const auto id : targets) {
    samples.push_back(encode_sample(*model_, scene, id));
  }
  std::vector<const EncodedSample *> ptrs;
  for (const auto & s : samples) {
    ptrs.push_back(&s);
  }
  auto sets = predict_encoded(*model_, ptrs);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    sets[i] = to_world(std::move(sets[i]), samples[i].transform);
  }
  return sets;
}

}  // namespace trajbench
