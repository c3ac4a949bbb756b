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

// Command-line front end: generate, train, eval, bench and report.

#include "trajbench/bench.hpp"
#include "trajbench/checkpoint.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/report.hpp"
#include "trajbench/scene_io.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace trajbench;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitIo = 5;

struct Options
{
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out;
  std::vector<std::string> formats;
  bool print_config{false};

  std::string model;
  std::string data;
  std::string checkpoint;
  std::string perturbation;
  std::string summary;
  bool resume{false};
};

BenchConfig effective_config(const Options & o)
{
  auto config = o.config_path.empty() ? BenchConfig::defaults() : load_bench_config(o.config_path);
  if (o.seed) {
    config.seed = *o.seed;
  }
  if (o.jobs) {
    config.jobs = *o.jobs;
  }
  if (!o.out.empty()) {
    config.output_dir = o.out;
  }
  if (o.resume) {
    config.resume = true;
  }
  return config;
}

const ModelSpec & find_model(const BenchConfig & config, const std::string & name)
{
  for (const auto & m : config.roster) {
    if (m.name == name) {
      return m;
    }
  }
  throw ConfigError("model '" + name + "' is not in the roster");
}

std::optional<Perturbation> find_perturbation(const BenchConfig & config, const std::string & name)
{
  if (name.empty() || name == "original") {
    return std::nullopt;
  }
  for (const auto & p : config.perturbations) {
    if (p.name() == name) {
      return p;
    }
  }
  throw ConfigError("perturbation '" + name + "' is not in the config");
}

fs::path output_dir(const BenchConfig & config)
{
  fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string());
  }
  return dir;
}

std::vector<ReportFormat> formats(const Options & o)
{
  if (o.formats.empty()) {
    return {ReportFormat::kMarkdown, ReportFormat::kCsv, ReportFormat::kSummary};
  }
  std::vector<ReportFormat> out;
  for (const auto & f : o.formats) {
    out.push_back(report_format_from_string(f));
  }
  return out;
}

std::vector<Scene> scenes_for(const BenchConfig & config, const std::string & path, bool train)
{
  if (!path.empty()) {
    return filter_targets(read_scenes(fs::path(path)), config.targets);
  }
  auto sets = load_datasets(config);
  return train ? std::move(sets.first) : std::move(sets.second);
}

int run_generate(const BenchConfig & config)
{
  auto train = config.dataset.train;
  train.seed = train_data_seed(config);
  auto test = config.dataset.test;
  test.seed = test_data_seed(config);
  const auto dir = output_dir(config);
  write_scenes(generate_dataset(train, config.jobs), dir / "train.jsonl");
  write_scenes(generate_dataset(test, config.jobs), dir / "test.jsonl");
  std::cout << "wrote " << (dir / "train.jsonl").string() << " and " << (dir / "test.jsonl").string() << '\n';
  return 0;
}

int run_train(const BenchConfig & config, const Options & o)
{
  const auto & spec = find_model(config, o.model);
  if (spec.kind == ModelKind::kConstantVelocity) {
    throw ConfigError("model '" + spec.name + "' has no trainable parameters");
  }
  const auto train = scenes_for(config, o.data, true);
  const auto augment = find_perturbation(config, o.perturbation);
  std::shared_ptr<RecurrentModel> model;
  build_predictor(spec, train, config, augment, &std::cout, &model);
  const auto path = o.checkpoint.empty() ? output_dir(config) / (spec.name + ".ckpt") : fs::path(o.checkpoint);
  save_checkpoint(*model, path);
  std::cerr << "saved " << path.string() << '\n';
  return 0;
}

int run_eval(const BenchConfig & config, const Options & o)
{
  const auto & spec = find_model(config, o.model);
  const auto test = scenes_for(config, o.data, false);
  std::shared_ptr<const Predictor> predictor;
  if (spec.kind == ModelKind::kConstantVelocity) {
    const auto window = window_of(test);
    predictor = std::make_shared<ConstantVelocityPredictor>(HorizonSet::uniform(window.future, window.dt));
  } else {
    if (o.checkpoint.empty()) {
      throw ConfigError("eval of a learned model needs --checkpoint");
    }
    predictor = std::make_shared<RecurrentPredictor>(
      spec.name, std::make_shared<RecurrentModel>(load_checkpoint(o.checkpoint)));
  }
  const auto perturbation = find_perturbation(config, o.perturbation);
  const auto result = evaluate(*predictor, test, perturbation, config.jobs);
  const auto dir = output_dir(config);
  std::ofstream csv(dir / "eval.csv");
  write_eval_csv(result, csv);
  std::ofstream summary(dir / "eval_summary.json");
  summary << eval_summary_json(result);
  if (!csv || !summary) {
    throw IoError("failed writing evaluation output to " + dir.string());
  }
  std::cout << spec.name << " on " << (perturbation ? perturbation->name() : "original") << ": minADE "
            << format_exact(result.aggregate) << " m over " << result.count << " trajectories ("
            << result.failures.size() << " failed scenes)\n";
  return 0;
}

int run_bench(const BenchConfig & config, const Options & o)
{
  const auto report = run_benchmark(config);
  const auto dir = output_dir(config);
  for (const auto f : formats(o)) {
    emit_report(report, f, dir);
  }
  std::ofstream timing(dir / "timing.json");
  timing << timing_to_json(report);
  std::cout << render_markdown(report);
  return 0;
}

int run_report(const BenchConfig & config, const Options & o)
{
  const fs::path source = o.summary.empty() ? fs::path(config.output_dir) / "summary.json" : fs::path(o.summary);
  std::ifstream in(source);
  if (!in) {
    throw IoError("cannot open report summary " + source.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const auto report = report_from_json(ss.str());
  const auto dir = output_dir(config);
  for (const auto f : formats(o)) {
    for (const auto & p : emit_report(report, f, dir)) {
      std::cout << p.string() << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"trajbench: robustness benchmark for trajectory predictors"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "benchmark config file (JSON)")->envname("TRB_CONFIG");
  app.add_option("--seed", o.seed, "master seed")->envname("TRB_SEED");
  app.add_option("--jobs", o.jobs, "worker threads")->envname("TRB_JOBS")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output directory")->envname("TRB_OUT");
  app.add_option("--format", o.formats, "report formats: csv, md, summary (default: all)")
    ->envname("TRB_FORMAT")
    ->check(CLI::IsMember({"csv", "md", "summary"}));
  app.add_flag("--print-config", o.print_config, "print the effective config and exit");

  auto * gen = app.add_subcommand("generate", "write train.jsonl and test.jsonl scene files");
  auto * train = app.add_subcommand("train", "train one roster model and save a checkpoint");
  train->add_option("--model", o.model, "roster model name")->required();
  train->add_option("--data", o.data, "training scene file (default: generated)");
  train->add_option("--augment", o.perturbation, "train on the set augmented with this perturbation");
  train->add_option("--checkpoint", o.checkpoint, "checkpoint path (default: OUT/<model>.ckpt)");
  auto * eval = app.add_subcommand("eval", "evaluate one model on a scene file");
  eval->add_option("--model", o.model, "roster model name")->required();
  eval->add_option("--checkpoint", o.checkpoint, "checkpoint of a learned model");
  eval->add_option("--data", o.data, "test scene file (default: generated)");
  eval->add_option("--perturbation", o.perturbation, "perturbation name (default: none)");
  auto * bench = app.add_subcommand("bench", "run the full benchmark and write reports");
  bench->add_flag("--resume", o.resume, "reuse checkpoints found in the output directory");
  auto * report = app.add_subcommand("report", "re-emit reports from a summary.json");
  report->add_option("--summary", o.summary, "summary document (default: OUT/summary.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto config = effective_config(o);
    if (o.print_config) {
      std::cout << bench_config_to_json(config);
      return 0;
    }
    config.validate();
    if (gen->parsed()) {
      return run_generate(config);
    }
    if (train->parsed()) {
      return run_train(config, o);
    }
    if (eval->parsed()) {
      return run_eval(config, o);
    }
    if (bench->parsed()) {
      return run_bench(config, o);
    }
    if (report->parsed()) {
      return run_report(config, o);
    }
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError & e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const TrainingDivergence & e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const IoError & e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
