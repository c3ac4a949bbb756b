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
#include "trajbench/errors.hpp"
#include "trajbench/report.hpp"
#include "trajbench/scene_io.hpp"

#include "../test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace trajbench
{
namespace
{

namespace fs = std::filesystem;

fs::path scratch(const std::string & name)
{
  const auto dir = fs::temp_directory_path() / ("trajbench-bench-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const std::string & text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> split(const std::string & line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

BenchConfig tiny_config(const std::string & out)
{
  auto c = BenchConfig::defaults();
  c.dataset.train.scenes = 10;
  c.dataset.test.scenes = 6;
  c.dataset.train.window.future = 10;
  c.dataset.test.window.future = 10;
  c.output_dir = scratch(out).string();
  for (auto & m : c.roster) {
    m.model.layers = 1;
    m.model.hidden = 6;
    m.model.modes = 2;
    m.model.road_budget = 16;
    m.train.epochs = 1;
    m.augmented_epochs = 1;
  }
  return c;
}

TEST(BenchConfig, DefaultsAreValid)
{
  const auto c = BenchConfig::defaults();
  EXPECT_NO_THROW(c.validate());
  ASSERT_EQ(c.roster.size(), 3u);
  EXPECT_EQ(c.roster[0].kind, ModelKind::kConstantVelocity);
  EXPECT_EQ(c.roster[2].kind, ModelKind::kRecurrentEnvAware);
  EXPECT_EQ(c.perturbations.size(), 3u);
  EXPECT_EQ(c.dataset.train.scenes, 2000u);
  EXPECT_EQ(c.dataset.test.scenes, 400u);
  EXPECT_TRUE(c.retrain);
}

TEST(BenchConfig, JsonRoundTrip)
{
  auto c = BenchConfig::defaults();
  c.seed = 99;
  c.retrain = false;
  c.perturbations.push_back(Perturbation::heading_noise(0.3, 5));
  c.perturbations[1] = Perturbation::late_detection(Perturbation::Scope::kAllAgents);
  c.targets.max_per_scene = 2;
  c.targets.types = {AgentType::kVehicle};
  c.roster[1].train.epochs = 7;
  c.roster[1].augmented_epochs = 3;
  c.roster[2].model.hidden = 16;
  const auto text = bench_config_to_json(c);
  const auto back = bench_config_from_json(text);
  EXPECT_EQ(bench_config_to_json(back), text);
  EXPECT_EQ(back.roster[1].train.epochs, 7u);
  EXPECT_EQ(back.roster[1].augmented_epochs, 3u);
  EXPECT_EQ(back.roster[2].model.hidden, 16u);
  EXPECT_EQ(back.perturbations[1].scope, Perturbation::Scope::kAllAgents);
  EXPECT_EQ(back.perturbations[3].sigma, 0.3);
}

TEST(BenchConfig, PartialDocumentKeepsDefaults)
{
  const auto c = bench_config_from_json(R"({"seed": 4, "dataset": {"train": {"scenes": 12}}})");
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.dataset.train.scenes, 12u);
  EXPECT_EQ(c.dataset.test.scenes, 400u);
  EXPECT_EQ(c.roster.size(), 3u);
}

TEST(BenchConfig, Rejections)
{
  EXPECT_THROW(bench_config_from_json(R"({"sed": 4})"), ConfigError);
  EXPECT_THROW(bench_config_from_json(R"({"roster": [{"name": "x", "kind": "transformer"}]})"), ConfigError);
  EXPECT_THROW(bench_config_from_json(R"({"roster": [{"name": "x", "kind": "cv", "extra": 1}]})"), ConfigError);
  EXPECT_THROW(bench_config_from_json(R"({"seed": "four"})"), ConfigError);
  EXPECT_THROW(bench_config_from_json("{not json"), ConfigError);
  EXPECT_THROW(bench_config_from_json(R"({"roster": []})").validate(), ConfigError);
  EXPECT_THROW(bench_config_from_json(R"({"roster": [{"name": "a"}, {"name": "a"}]})").validate(), ConfigError);
  EXPECT_THROW(
    bench_config_from_json(R"({"dataset": {"train_path": "/nope/a", "test_path": "/nope/b"}})").validate(),
    ConfigError);
  EXPECT_THROW(bench_config_from_json(R"({"dataset": {"train_path": "/nope/a"}})").validate(), ConfigError);
  EXPECT_THROW(load_bench_config("/nonexistent/config.json"), IoError);
}

TEST(BenchConfig, HashIgnoresExecutionSettings)
{
  auto a = BenchConfig::defaults();
  auto b = a;
  b.jobs = 8;
  b.output_dir = "elsewhere";
  b.resume = true;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(FilterTargets, KeepsRequestedTargets)
{
  auto s = testing::two_agent_scene();
  s.targets = {1, 2};
  s.tracks[1].type = AgentType::kPedestrian;
  std::vector<Scene> data{s};
  EXPECT_EQ(filter_targets(data, {}).front().targets.size(), 2u);
  EXPECT_EQ(filter_targets(data, {1, {}}).front().targets, std::vector<AgentId>{1});
  EXPECT_EQ(filter_targets(data, {0, {AgentType::kPedestrian}}).front().targets, std::vector<AgentId>{2});
  EXPECT_TRUE(filter_targets(data, {0, {AgentType::kCyclist}}).empty());
}

TEST(LoadDatasets, FilesAreReadAndValidated)
{
  const auto dir = scratch("files");
  fs::create_directories(dir);
  std::vector<Scene> scenes{testing::two_agent_scene()};
  write_scenes(scenes, dir / "train.jsonl");
  write_scenes(scenes, dir / "test.jsonl");
  auto c = BenchConfig::defaults();
  c.dataset.train_path = (dir / "train.jsonl").string();
  c.dataset.test_path = (dir / "test.jsonl").string();
  const auto [train, test] = load_datasets(c);
  EXPECT_EQ(train, scenes);
  scenes[0].tracks[0].states[3].speed += 1.0;
  write_scenes(scenes, dir / "test.jsonl");
  EXPECT_THROW(load_datasets(c), DataError);
}

TEST(LoadDatasets, GeneratedSetsUseDerivedSeeds)
{
  auto c = tiny_config("gen");
  const auto [train, test] = load_datasets(c);
  EXPECT_EQ(train.size(), 10u);
  EXPECT_EQ(test.size(), 6u);
  EXPECT_EQ(train.front().id, "train-000000");
  EXPECT_EQ(test.front().id, "test-000000");
  EXPECT_NE(train_data_seed(c), test_data_seed(c));
  GenConfig g = c.dataset.train;
  g.seed = train_data_seed(c);
  EXPECT_EQ(generate_scene(g, 3), train[3]);
}

TEST(RunBenchmark, ConstantVelocityRowsShowNoDegradation)
{
  auto c = tiny_config("cv-only");
  c.roster.resize(1);
  const auto report = run_benchmark(c);
  ASSERT_EQ(report.rows.size(), 1u);
  const auto & row = report.rows[0];
  EXPECT_EQ(row.training, "original");
  ASSERT_EQ(row.conditions.size(), 4u);
  for (std::size_t i = 1; i < row.conditions.size(); ++i) {
    EXPECT_EQ(row.conditions[i].degradation->delta, 0.0);
    EXPECT_EQ(*row.conditions[i].degradation->relative, 0.0);
    EXPECT_EQ(row.conditions[i].min_ade, row.conditions[0].min_ade);
    EXPECT_EQ(row.conditions[i].failures, 0u);
  }
  EXPECT_GT(row.conditions[0].count, 6u);
  EXPECT_EQ(report.provenance.config_hash, config_hash(c));
}

TEST(RunBenchmark, RetrainFlagControlsAugmentedRows)
{
  auto c = tiny_config("retrain");
  c.roster.erase(c.roster.begin());  // lstm and lstm-env
  c.perturbations = {Perturbation::remove_road()};
  c.retrain = false;
  const auto off = run_benchmark(c);
  ASSERT_EQ(off.rows.size(), 2u);
  for (const auto & row : off.rows) {
    EXPECT_EQ(row.training, "original");
  }
  // The env-unaware model never reads the road.
  EXPECT_EQ(off.rows[0].conditions[1].degradation->delta, 0.0);

  c.retrain = true;
  c.output_dir = scratch("retrain-on").string();
  const auto on = run_benchmark(c);
  ASSERT_EQ(on.rows.size(), 4u);
  EXPECT_EQ(on.rows[2].training, "augmented:remove_road");
  ASSERT_EQ(on.rows[2].conditions.size(), 2u);
  EXPECT_EQ(on.rows[2].conditions[1].condition, "remove_road");
  // Original rows do not depend on the retrain flag.
  EXPECT_EQ(render_csv(BenchmarkReport{off.perturbations, {on.rows[0], on.rows[1]}, off.provenance, {}}),
            render_csv(BenchmarkReport{off.perturbations, off.rows, off.provenance, {}}));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "checkpoints" / "lstm-env__augmented_remove_road.ckpt"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "logs" / "lstm__original.jsonl"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "trajectories" / "lstm__original__remove_road.csv"));
}

TEST(RunBenchmark, DeterministicAcrossJobsAndResume)
{
  auto c = tiny_config("det-a");
  c.roster.resize(2);
  c.perturbations = {Perturbation::late_detection(), Perturbation::heading_offset()};
  c.retrain = false;
  const auto a = run_benchmark(c);
  c.jobs = 3;
  c.output_dir = scratch("det-b").string();
  const auto b = run_benchmark(c);
  EXPECT_EQ(report_to_json(a), report_to_json(b));
  EXPECT_EQ(render_markdown(a), render_markdown(b));
  EXPECT_EQ(render_csv(a), render_csv(b));
  c.resume = true;
  const auto resumed = run_benchmark(c);
  EXPECT_EQ(report_to_json(resumed), report_to_json(a));
}

TEST(RunBenchmark, StageFailuresNameTheStage)
{
  auto c = tiny_config("fail");
  c.roster.resize(2);
  c.roster[1].train.step_size = 1e300;
  c.roster[1].train.clip_norm = 1e300;
  c.retrain = false;
  try {
    run_benchmark(c);
    FAIL() << "expected TrainingDivergence";
  } catch (const TrainingDivergence & e) {
    EXPECT_NE(std::string(e.what()).find("stage train lstm"), std::string::npos) << e.what();
  }
  // Partial artifacts of finished stages stay on disk.
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "trajectories" / "cv__original__original.csv"));
}

BenchmarkReport handmade_report()
{
  BenchmarkReport r;
  r.perturbations = {"remove_road"};
  r.provenance.seed = 3;
  r.provenance.config_hash = "00ff";
  ReportRow row;
  row.model = "lstm-env";
  row.training = "original";
  EvalResult base;
  base.trajectories = {{{"s0", 1}, 1.0, 80}, {{"s1", 1}, 2.0, 80}};
  EvalResult pert;
  pert.trajectories = {{{"s0", 1}, 1.5, 80}, {{"s1", 1}, 2.25, 80}};
  base = aggregate_results(base.trajectories);
  pert = aggregate_results(pert.trajectories);
  row.conditions.push_back({"original", base.aggregate, 2, 0, std::nullopt, std::nullopt});
  row.conditions.push_back(
    {"remove_road", pert.aggregate, 2, 0, degradation(base, pert), delta_distribution(base, pert)});
  r.rows.push_back(row);
  return r;
}

TEST(Report, OneModelOnePerturbationIsOneMarkdownRow)
{
  const auto md = render_markdown(handmade_report());
  std::size_t data_rows = 0;
  for (const auto & line : lines_of(md)) {
    if (line.rfind("| lstm-env |", 0) == 0) {
      ++data_rows;
      EXPECT_EQ(line, "| lstm-env | 1.5000 | 1.8750 | +0.3750 | +25.00% |");
    }
  }
  EXPECT_EQ(data_rows, 1u);
  EXPECT_EQ(md.find("retrained"), std::string::npos);
}

TEST(Report, PercentCellsMatchRecomputation)
{
  auto c = tiny_config("pct");
  c.roster.resize(2);
  c.retrain = false;
  const auto report = run_benchmark(c);
  const auto rows = lines_of(render_csv(report));
  ASSERT_EQ(split(rows[0]).size(), 11u);
  std::map<std::string, double> original;
  std::size_t checked = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 11u) << rows[i];
    const double min_ade = std::stod(cells[3]);
    if (cells[2] == "original") {
      original[cells[0]] = min_ade;
      continue;
    }
    const double base = original.at(cells[0]);
    EXPECT_NEAR(std::stod(cells[6]), min_ade - base, 1e-12);
    EXPECT_NEAR(std::stod(cells[7]), 100.0 * (min_ade - base) / base, 0.005 + 1e-12);
    EXPECT_LE(std::stod(cells[9]), std::stod(cells[8]));
    EXPECT_LE(std::stod(cells[8]), std::stod(cells[10]));
    ++checked;
  }
  EXPECT_EQ(checked, 6u);
}

TEST(Report, EmptyReportHasHeadersOnly)
{
  BenchmarkReport empty;
  EXPECT_EQ(lines_of(render_csv(empty)).size(), 1u);
  const auto md = render_markdown(empty);
  EXPECT_NE(md.find("| model | original minADE |"), std::string::npos);
  EXPECT_EQ(md.find("| cv"), std::string::npos);
  const auto dir = scratch("empty-report");
  const auto files = emit_report(empty, ReportFormat::kCsv, dir);
  EXPECT_EQ(files.size(), 1u);
}

TEST(Report, EmitsAllFormats)
{
  const auto dir = scratch("emit");
  const auto report = handmade_report();
  const auto csv = emit_report(report, ReportFormat::kCsv, dir);
  ASSERT_EQ(csv.size(), 3u);
  const auto hist = slurp(dir / "histogram__lstm-env__original__remove_road.csv");
  EXPECT_EQ(lines_of(hist).front(), "bin_left,bin_right,count");
  EXPECT_EQ(lines_of(hist).size(), 41u);
  EXPECT_EQ(slurp(dir / "delta__lstm-env__original__remove_road.csv"), "scene_id,agent_id,delta\ns0,1,0.5\ns1,1,0.25\n");
  emit_report(report, ReportFormat::kMarkdown, dir);
  emit_report(report, ReportFormat::kSummary, dir);
  EXPECT_EQ(slurp(dir / "report.md"), render_markdown(report));
  const auto back = report_from_json(slurp(dir / "summary.json"));
  EXPECT_EQ(report_to_json(back), report_to_json(report));
  EXPECT_EQ(render_markdown(back), render_markdown(report));
  EXPECT_THROW(report_from_json("{}"), DataError);
}

TEST(Report, UnwritableDirectoryIsIoError)
{
  const auto file = scratch("blocker");
  fs::create_directories(file.parent_path());
  std::ofstream(file) << "x";
  EXPECT_THROW(emit_report(handmade_report(), ReportFormat::kMarkdown, file / "sub"), IoError);
}

TEST(Report, FormatNames)
{
  EXPECT_EQ(report_format_from_string("csv"), ReportFormat::kCsv);
  EXPECT_EQ(report_format_from_string("md"), ReportFormat::kMarkdown);
  EXPECT_EQ(report_format_from_string("summary"), ReportFormat::kSummary);
  EXPECT_THROW(report_format_from_string("pdf"), ConfigError);
  EXPECT_EQ(format_percent(std::nullopt), "n/a");
  EXPECT_EQ(format_percent(1.10789), "+110.79%");
  EXPECT_EQ(format_percent(-0.015), "-1.50%");
}

}  // namespace
}  // namespace trajbench
