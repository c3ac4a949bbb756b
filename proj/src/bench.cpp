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

#include "trajbench/bench.hpp"

#include "trajbench/checkpoint.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/scene_io.hpp"

#include "json.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace trajbench
{

using Json = nlohmann::ordered_json;

std::string_view to_string(ModelKind kind)
{
  switch (kind) {
    case ModelKind::kConstantVelocity:
      return "cv";
    case ModelKind::kRecurrent:
      return "recurrent";
    case ModelKind::kRecurrentEnvAware:
      return "recurrent-env-aware";
  }
  return "cv";
}

ModelKind model_kind_from_string(std::string_view name)
{
  for (const auto k : {ModelKind::kConstantVelocity, ModelKind::kRecurrent, ModelKind::kRecurrentEnvAware}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

namespace
{

// Reads optional keys of one JSON object and rejects keys nobody asked for.
class Fields
{
public:
  Fields(const Json & j, std::string context) : j_(j), context_(std::move(context))
  {
    if (!j_.is_object()) {
      throw ConfigError(context_ + ": expected an object");
    }
  }

  template <typename T>
  void get(const char * key, T & out)
  {
    if (!j_.contains(key)) {
      return;
    }
    used_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception & e) {
      throw ConfigError(context_ + "." + key + ": " + e.what());
    }
  }

  const Json * child(const char * key)
  {
    if (!j_.contains(key)) {
      return nullptr;
    }
    used_.insert(key);
    return &j_.at(key);
  }

  void finish() const
  {
    for (const auto & item : j_.items()) {
      if (used_.count(item.key()) == 0) {
        throw ConfigError(context_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

private:
  const Json & j_;
  std::string context_;
  std::set<std::string> used_;
};

Json gen_to_json(const GenConfig & g)
{
  Json j;
  j["scenes"] = g.scenes;
  j["layouts"] = {{"straight", g.layouts.straight}, {"arc", g.layouts.arc}, {"intersection", g.layouts.intersection}};
  j["behaviors"] = {
    {"constant_velocity", g.behaviors.constant_velocity},
    {"accelerating", g.behaviors.accelerating},
    {"turning", g.behaviors.turning},
    {"lane_change", g.behaviors.lane_change},
    {"crossing_pedestrian", g.behaviors.crossing_pedestrian}};
  j["min_agents"] = g.min_agents;
  j["max_agents"] = g.max_agents;
  j["max_targets"] = g.max_targets;
  j["sigma_pos"] = g.sigma_pos;
  j["sigma_heading"] = g.sigma_heading;
  j["sigma_vel"] = g.sigma_vel;
  j["road_spacing"] = g.road_spacing;
  j["history"] = g.window.history;
  j["future"] = g.window.future;
  j["dt"] = g.window.dt;
  j["id_prefix"] = g.id_prefix;
  return j;
}

GenConfig gen_from_json(const Json & j, GenConfig g, const std::string & ctx)
{
  Fields f(j, ctx);
  f.get("scenes", g.scenes);
  if (const auto * l = f.child("layouts")) {
    Fields lf(*l, ctx + ".layouts");
    lf.get("straight", g.layouts.straight);
    lf.get("arc", g.layouts.arc);
    lf.get("intersection", g.layouts.intersection);
    lf.finish();
  }
  if (const auto * b = f.child("behaviors")) {
    Fields bf(*b, ctx + ".behaviors");
    bf.get("constant_velocity", g.behaviors.constant_velocity);
    bf.get("accelerating", g.behaviors.accelerating);
    bf.get("turning", g.behaviors.turning);
    bf.get("lane_change", g.behaviors.lane_change);
    bf.get("crossing_pedestrian", g.behaviors.crossing_pedestrian);
    bf.finish();
  }
  f.get("min_agents", g.min_agents);
  f.get("max_agents", g.max_agents);
  f.get("max_targets", g.max_targets);
  f.get("sigma_pos", g.sigma_pos);
  f.get("sigma_heading", g.sigma_heading);
  f.get("sigma_vel", g.sigma_vel);
  f.get("road_spacing", g.road_spacing);
  f.get("history", g.window.history);
  f.get("future", g.window.future);
  f.get("dt", g.window.dt);
  f.get("id_prefix", g.id_prefix);
  f.finish();
  return g;
}

Json model_to_json(const ModelConfig & m)
{
  return {
    {"layers", m.layers},
    {"hidden", m.hidden},
    {"modes", m.modes},
    {"road_budget", m.road_budget},
    {"max_neighbors", m.max_neighbors},
    {"position_scale", m.position_scale},
    {"velocity_scale", m.velocity_scale}};
}

ModelConfig model_from_json(const Json & j, ModelConfig m, const std::string & ctx)
{
  Fields f(j, ctx);
  f.get("layers", m.layers);
  f.get("hidden", m.hidden);
  f.get("modes", m.modes);
  f.get("road_budget", m.road_budget);
  f.get("max_neighbors", m.max_neighbors);
  f.get("position_scale", m.position_scale);
  f.get("velocity_scale", m.velocity_scale);
  f.finish();
  return m;
}

Json train_to_json(const TrainConfig & t)
{
  return {
    {"epochs", t.epochs},
    {"batch_size", t.batch_size},
    {"step_size", t.step_size},
    {"beta1", t.beta1},
    {"beta2", t.beta2},
    {"epsilon", t.epsilon},
    {"clip_norm", t.clip_norm},
    {"validation_fraction", t.validation_fraction},
    {"patience", t.patience},
    {"chunk_size", t.chunk_size},
    {"fine_tune", t.fine_tune}};
}

TrainConfig train_from_json(const Json & j, TrainConfig t, const std::string & ctx)
{
  Fields f(j, ctx);
  f.get("epochs", t.epochs);
  f.get("batch_size", t.batch_size);
  f.get("step_size", t.step_size);
  f.get("beta1", t.beta1);
  f.get("beta2", t.beta2);
  f.get("epsilon", t.epsilon);
  f.get("clip_norm", t.clip_norm);
  f.get("validation_fraction", t.validation_fraction);
  f.get("patience", t.patience);
  f.get("chunk_size", t.chunk_size);
  f.get("fine_tune", t.fine_tune);
  f.finish();
  return t;
}

Json perturbation_to_json(const Perturbation & p)
{
  Json j;
  j["kind"] = std::string(to_string(p.kind));
  switch (p.kind) {
    case Perturbation::Kind::kRemoveRoad:
      break;
    case Perturbation::Kind::kLateDetection:
      j["scope"] = p.scope == Perturbation::Scope::kAllAgents ? "all_agents" : "target_only";
      break;
    case Perturbation::Kind::kHeadingOffset:
      j["angle"] = p.angle;
      break;
    case Perturbation::Kind::kHeadingNoise:
      j["sigma"] = p.sigma;
      j["seed"] = p.seed;
      break;
  }
  return j;
}

Perturbation perturbation_from_json(const Json & j, const std::string & ctx)
{
  Fields f(j, ctx);
  std::string kind;
  f.get("kind", kind);
  Perturbation p;
  p.kind = perturbation_kind_from_string(kind);
  std::string scope = "target_only";
  f.get("scope", scope);
  if (scope == "all_agents") {
    p.scope = Perturbation::Scope::kAllAgents;
  } else if (scope != "target_only") {
    throw ConfigError(ctx + ".scope: expected target_only or all_agents");
  }
  f.get("angle", p.angle);
  f.get("sigma", p.sigma);
  f.get("seed", p.seed);
  f.finish();
  return p;
}

ModelSpec default_spec(const std::string & name, ModelKind kind)
{
  ModelSpec s;
  s.name = name;
  s.kind = kind;
  s.model = ModelConfig::desk(kind == ModelKind::kRecurrentEnvAware);
  return s;
}

// Rethrows `e` as the same error category with the stage name prepended.
[[noreturn]] void rethrow_in_stage(const std::string & stage)
{
  try {
    throw;
  } catch (const ConfigError & e) {
    throw ConfigError("stage " + stage + ": " + e.what());
  } catch (const DataError & e) {
    throw DataError("stage " + stage + ": " + e.what());
  } catch (const TrainingDivergence & e) {
    throw TrainingDivergence("stage " + stage + ": " + e.what());
  } catch (const IoError & e) {
    throw IoError("stage " + stage + ": " + e.what());
  } catch (const std::exception & e) {
    throw Error("stage " + stage + ": " + e.what());
  }
}

std::string file_safe(std::string s)
{
  for (auto & c : s) {
    if (c == ':' || c == '/' || c == ' ') {
      c = '_';
    }
  }
  return s;
}

}  // namespace

BenchConfig BenchConfig::defaults()
{
  BenchConfig c;
  c.dataset.train.scenes = 2000;
  c.dataset.test.scenes = 400;
  c.dataset.test.id_prefix = "test-";
  c.dataset.train.id_prefix = "train-";
  c.roster = {
    default_spec("cv", ModelKind::kConstantVelocity),
    default_spec("lstm", ModelKind::kRecurrent),
    default_spec("lstm-env", ModelKind::kRecurrentEnvAware)};
  c.perturbations = {Perturbation::remove_road(), Perturbation::late_detection(), Perturbation::heading_offset()};
  return c;
}

void BenchConfig::validate() const
{
  if (roster.empty()) {
    throw ConfigError("bench: the model roster is empty");
  }
  std::set<std::string> names;
  for (const auto & m : roster) {
    if (m.name.empty() || !names.insert(m.name).second) {
      throw ConfigError("bench: model names must be non-empty and unique ('" + m.name + "')");
    }
    if (m.kind != ModelKind::kConstantVelocity) {
      m.train.validate();
      if (m.augmented_epochs == 0) {
        throw ConfigError("bench: augmented_epochs of '" + m.name + "' must be positive");
      }
      RecurrentModel probe(m.model);
    }
  }
  std::set<std::string> labels;
  for (const auto & p : perturbations) {
    if (!labels.insert(p.name()).second) {
      throw ConfigError("bench: perturbation '" + p.name() + "' listed twice");
    }
    if (p.kind == Perturbation::Kind::kHeadingNoise && !(p.sigma >= 0.0)) {
      throw ConfigError("bench: heading_noise sigma must be non-negative");
    }
  }
  if (jobs == 0) {
    throw ConfigError("bench: jobs must be positive");
  }
  if (histogram.bins == 0 || !(histogram.hi > histogram.lo)) {
    throw ConfigError("bench: histogram needs bins > 0 and hi > lo");
  }
  if (dataset.train_path.empty() != dataset.test_path.empty()) {
    throw ConfigError("bench: set both dataset paths or neither");
  }
  if (!dataset.train_path.empty()) {
    for (const auto & p : {dataset.train_path, dataset.test_path}) {
      if (!std::filesystem::exists(p)) {
        throw ConfigError("bench: dataset file does not exist: " + p);
      }
    }
  } else {
    dataset.train.validate();
    dataset.test.validate();
  }
}

std::string bench_config_to_json(const BenchConfig & c)
{
  Json j;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  j["retrain"] = c.retrain;
  j["resume"] = c.resume;
  j["dataset"] = {
    {"train_path", c.dataset.train_path},
    {"test_path", c.dataset.test_path},
    {"train", gen_to_json(c.dataset.train)},
    {"test", gen_to_json(c.dataset.test)}};
  auto roster = Json::array();
  for (const auto & m : c.roster) {
    Json mj;
    mj["name"] = m.name;
    mj["kind"] = std::string(to_string(m.kind));
    if (m.kind != ModelKind::kConstantVelocity) {
      mj["model"] = model_to_json(m.model);
      mj["train"] = train_to_json(m.train);
      mj["augmented_epochs"] = m.augmented_epochs;
    }
    roster.push_back(std::move(mj));
  }
  j["roster"] = std::move(roster);
  auto perturbations = Json::array();
  for (const auto & p : c.perturbations) {
    perturbations.push_back(perturbation_to_json(p));
  }
  j["perturbations"] = std::move(perturbations);
  j["histogram"] = {{"bins", c.histogram.bins}, {"lo", c.histogram.lo}, {"hi", c.histogram.hi}};
  auto types = Json::array();
  for (const auto t : c.targets.types) {
    types.push_back(std::string(to_string(t)));
  }
  j["targets"] = {{"max_per_scene", c.targets.max_per_scene}, {"types", std::move(types)}};
  return j.dump(2) + "\n";
}

BenchConfig bench_config_from_json(const std::string & text)
{
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  BenchConfig c = BenchConfig::defaults();
  Fields f(j, "config");
  f.get("seed", c.seed);
  f.get("jobs", c.jobs);
  f.get("output_dir", c.output_dir);
  f.get("retrain", c.retrain);
  f.get("resume", c.resume);
  if (const auto * d = f.child("dataset")) {
    Fields df(*d, "config.dataset");
    df.get("train_path", c.dataset.train_path);
    df.get("test_path", c.dataset.test_path);
    if (const auto * g = df.child("train")) {
      c.dataset.train = gen_from_json(*g, c.dataset.train, "config.dataset.train");
    }
    if (const auto * g = df.child("test")) {
      c.dataset.test = gen_from_json(*g, c.dataset.test, "config.dataset.test");
    }
    df.finish();
  }
  if (const auto * r = f.child("roster")) {
    if (!r->is_array()) {
      throw ConfigError("config.roster: expected an array");
    }
    c.roster.clear();
    for (std::size_t i = 0; i < r->size(); ++i) {
      const auto ctx = "config.roster[" + std::to_string(i) + "]";
      Fields mf((*r)[i], ctx);
      std::string name;
      std::string kind = "cv";
      mf.get("name", name);
      mf.get("kind", kind);
      auto spec = default_spec(name, model_kind_from_string(kind));
      if (const auto * m = mf.child("model")) {
        spec.model = model_from_json(*m, spec.model, ctx + ".model");
      }
      if (const auto * t = mf.child("train")) {
        spec.train = train_from_json(*t, spec.train, ctx + ".train");
      }
      mf.get("augmented_epochs", spec.augmented_epochs);
      mf.finish();
      c.roster.push_back(std::move(spec));
    }
  }
  if (const auto * p = f.child("perturbations")) {
    if (!p->is_array()) {
      throw ConfigError("config.perturbations: expected an array");
    }
    c.perturbations.clear();
    for (std::size_t i = 0; i < p->size(); ++i) {
      c.perturbations.push_back(perturbation_from_json((*p)[i], "config.perturbations[" + std::to_string(i) + "]"));
    }
  }
  if (const auto * h = f.child("histogram")) {
    Fields hf(*h, "config.histogram");
    hf.get("bins", c.histogram.bins);
    hf.get("lo", c.histogram.lo);
    hf.get("hi", c.histogram.hi);
    hf.finish();
  }
  if (const auto * t = f.child("targets")) {
    Fields tf(*t, "config.targets");
    tf.get("max_per_scene", c.targets.max_per_scene);
    std::vector<std::string> types;
    tf.get("types", types);
    c.targets.types.clear();
    for (const auto & name : types) {
      c.targets.types.push_back(agent_type_from_string(name));
    }
    tf.finish();
  }
  f.finish();
  return c;
}

BenchConfig load_bench_config(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file: " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return bench_config_from_json(ss.str());
}

std::string config_hash(const BenchConfig & config)
{
  // Execution settings do not change results and are left out.
  auto canonical = config;
  canonical.jobs = 1;
  canonical.output_dir.clear();
  canonical.resume = false;
  const auto text = bench_config_to_json(canonical);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::uint64_t train_data_seed(const BenchConfig & config)
{
  return derive_seed(config.seed, "train-set");
}

std::uint64_t test_data_seed(const BenchConfig & config)
{
  return derive_seed(config.seed, "test-set");
}

std::vector<Scene> filter_targets(std::vector<Scene> scenes, const TargetFilter & filter)
{
  if (filter.max_per_scene == 0 && filter.types.empty()) {
    return scenes;
  }
  std::vector<Scene> out;
  for (auto & s : scenes) {
    std::vector<AgentId> kept;
    for (const auto id : s.targets) {
      const auto type = s.track(id).type;
      const bool type_ok =
        filter.types.empty() || std::find(filter.types.begin(), filter.types.end(), type) != filter.types.end();
      if (type_ok && (filter.max_per_scene == 0 || kept.size() < filter.max_per_scene)) {
        kept.push_back(id);
      }
    }
    if (!kept.empty()) {
      s.targets = std::move(kept);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::pair<std::vector<Scene>, std::vector<Scene>> load_datasets(const BenchConfig & config)
{
  std::vector<Scene> train;
  std::vector<Scene> test;
  if (!config.dataset.train_path.empty()) {
    train = read_scenes(std::filesystem::path(config.dataset.train_path));
    test = read_scenes(std::filesystem::path(config.dataset.test_path));
    for (const auto * set : {&train, &test}) {
      for (const auto & s : *set) {
        const auto violations = validate_scene(s);
        if (!violations.empty()) {
          throw DataError(
            "scene " + s.id + " is invalid: " + violations.front().where + ": " + violations.front().what);
        }
      }
    }
  } else {
    auto gen_train = config.dataset.train;
    gen_train.seed = train_data_seed(config);
    auto gen_test = config.dataset.test;
    gen_test.seed = test_data_seed(config);
    train = generate_dataset(gen_train, config.jobs);
    test = generate_dataset(gen_test, config.jobs);
  }
  return {filter_targets(std::move(train), config.targets), filter_targets(std::move(test), config.targets)};
}

WindowConfig window_of(std::span<const Scene> scenes)
{
  WindowConfig window;
  if (!scenes.empty() && !scenes.front().tracks.empty()) {
    const auto & track = scenes.front().tracks.front();
    window = {track.observed_count(), track.future_count(), scenes.front().dt};
  }
  return window;
}

std::shared_ptr<const Predictor> build_predictor(
  const ModelSpec & spec, std::span<const Scene> train, const BenchConfig & config,
  const std::optional<Perturbation> & augment, std::ostream * log, std::shared_ptr<RecurrentModel> * trained)
{
  // Models follow the window of the data they are trained on.
  const auto window = window_of(train);
  if (spec.kind == ModelKind::kConstantVelocity) {
    return std::make_shared<ConstantVelocityPredictor>(HorizonSet::uniform(window.future, window.dt));
  }
  const std::string tag = spec.name + "/" + (augment ? augment->name() : std::string("original"));
  auto model_config = spec.model;
  model_config.env_aware = spec.kind == ModelKind::kRecurrentEnvAware;
  model_config.history = window.history;
  model_config.future = window.future;
  model_config.dt = window.dt;
  auto model = std::make_shared<RecurrentModel>(model_config, derive_seed(config.seed, "init:" + spec.name));
  auto train_config = spec.train;
  train_config.seed = derive_seed(config.seed, "train:" + tag);
  train_config.jobs = config.jobs;
  if (augment) {
    train_config.epochs = spec.augmented_epochs;
    const auto augmented = augment_dataset(train, *augment);
    trajbench::train(*model, augmented, train_config, log);
  } else {
    trajbench::train(*model, train, train_config, log);
  }
  if (trained != nullptr) {
    *trained = model;
  }
  return std::make_shared<RecurrentPredictor>(spec.name, model);
}

BenchmarkReport run_benchmark(const BenchConfig & config)
{
  config.validate();
  namespace fs = std::filesystem;
  const fs::path out_dir(config.output_dir);
  try {
    fs::create_directories(out_dir / "checkpoints");
    fs::create_directories(out_dir / "logs");
    fs::create_directories(out_dir / "trajectories");
  } catch (const fs::filesystem_error & e) {
    throw IoError(std::string("cannot create output directory: ") + e.what());
  }

  BenchmarkReport report;
  report.provenance.seed = config.seed;
  report.provenance.config_hash = config_hash(config);
  for (const auto & p : config.perturbations) {
    report.perturbations.push_back(p.name());
  }

  const auto timed = [&](const std::string & stage, auto && fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (...) {
      rethrow_in_stage(stage);
    }
    report.timing.push_back(
      {stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
  };

  std::vector<Scene> train;
  std::vector<Scene> test;
  timed("data", [&] { std::tie(train, test) = load_datasets(config); });
  if (train.empty() || test.empty()) {
    throw DataError("stage data: no scenes with targets");
  }
  report.provenance.train_scenes = train.size();
  report.provenance.test_scenes = test.size();

  const auto obtain = [&](const ModelSpec & spec, const std::optional<Perturbation> & augment) {
    const std::string training = augment ? "augmented:" + augment->name() : std::string("original");
    const std::string stem = file_safe(spec.name + "__" + training);
    const auto ckpt = out_dir / "checkpoints" / (stem + ".ckpt");
    std::shared_ptr<const Predictor> predictor;
    timed("train " + spec.name + " (" + training + ")", [&] {
      if (spec.kind != ModelKind::kConstantVelocity && config.resume && fs::exists(ckpt)) {
        auto model = std::make_shared<RecurrentModel>(load_checkpoint(ckpt));
        predictor = std::make_shared<RecurrentPredictor>(spec.name, model);
        return;
      }
      std::ofstream log;
      if (spec.kind != ModelKind::kConstantVelocity) {
        log.open(out_dir / "logs" / (stem + ".jsonl"), std::ios::trunc);
      }
      std::shared_ptr<RecurrentModel> model;
      predictor = build_predictor(spec, train, config, augment, log.is_open() ? &log : nullptr, &model);
      if (model) {
        save_checkpoint(*model, ckpt);
      }
    });
    return predictor;
  };

  const auto evaluate_row = [&](
                              const ModelSpec & spec, const std::string & training, const Predictor & predictor,
                              const std::vector<Perturbation> & conditions) {
    ReportRow row;
    row.model = spec.name;
    row.training = training;
    EvalResult base;
    const auto run = [&](const std::optional<Perturbation> & p) {
      const std::string label = p ? p->name() : std::string("original");
      EvalResult result;
      timed("eval " + spec.name + " (" + training + ") on " + label, [&] {
        result = evaluate(predictor, test, p, config.jobs);
        std::ofstream csv(out_dir / "trajectories" / file_safe(spec.name + "__" + training + "__" + label + ".csv"));
        write_eval_csv(result, csv);
      });
      ConditionResult c;
      c.condition = label;
      c.min_ade = result.aggregate;
      c.count = result.count;
      c.failures = result.failures.size();
      if (p) {
        c.degradation = degradation(base, result);
        timed("distribution " + spec.name + " (" + training + ") on " + label, [&] {
          c.distribution = delta_distribution(base, result, config.histogram);
        });
      } else {
        base = result;
      }
      row.conditions.push_back(std::move(c));
    };
    run(std::nullopt);
    for (const auto & p : conditions) {
      run(p);
    }
    report.rows.push_back(std::move(row));
  };

  for (const auto & spec : config.roster) {
    const auto predictor = obtain(spec, std::nullopt);
    evaluate_row(spec, "original", *predictor, config.perturbations);
  }
  if (config.retrain) {
    for (const auto & p : config.perturbations) {
      for (const auto & spec : config.roster) {
        if (spec.kind == ModelKind::kConstantVelocity) {
          continue;
        }
        const auto predictor = obtain(spec, p);
        evaluate_row(spec, "augmented:" + p.name(), *predictor, {p});
      }
    }
  }
  return report;
}

}  // namespace trajbench
