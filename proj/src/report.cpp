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

#include "trajbench/report.hpp"

#include "trajbench/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace trajbench
{
namespace
{

using Json = nlohmann::ordered_json;

std::string fixed(double v, const char * fmt)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string condition_stem(const ReportRow & row, const ConditionResult & c)
{
  std::string s = row.model + "__" + row.training + "__" + c.condition;
  for (auto & ch : s) {
    if (ch == ':' || ch == '/' || ch == ' ') {
      ch = '_';
    }
  }
  return s;
}

const ConditionResult * find_condition(const ReportRow & row, const std::string & name)
{
  for (const auto & c : row.conditions) {
    if (c.condition == name) {
      return &c;
    }
  }
  return nullptr;
}

void write_file(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace

ReportFormat report_format_from_string(std::string_view name)
{
  if (name == "csv") {
    return ReportFormat::kCsv;
  }
  if (name == "md") {
    return ReportFormat::kMarkdown;
  }
  if (name == "summary") {
    return ReportFormat::kSummary;
  }
  throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv, md or summary)");
}

std::string format_percent(const std::optional<double> & relative)
{
  if (!relative) {
    return "n/a";
  }
  return fixed(*relative * 100.0, "%+.2f") + "%";
}

std::string render_markdown(const BenchmarkReport & report)
{
  std::ostringstream md;
  md << "# Robustness benchmark\n\n";
  md << "minADE in metres on the test set; delta and relative increase against the original condition.\n\n";
  md << "## Models trained on original data\n\n";
  md << "| model | original minADE |";
  for (const auto & p : report.perturbations) {
    md << ' ' << p << " minADE | " << p << " Δ | " << p << " %Δ |";
  }
  md << "\n|---|---|";
  for (std::size_t i = 0; i < report.perturbations.size(); ++i) {
    md << "---|---|---|";
  }
  md << '\n';
  for (const auto & row : report.rows) {
    if (row.training != "original") {
      continue;
    }
    const auto * base = find_condition(row, "original");
    md << "| " << row.model << " | " << (base ? fixed(base->min_ade, "%.4f") : "n/a") << " |";
    for (const auto & p : report.perturbations) {
      const auto * c = find_condition(row, p);
      if (c == nullptr || !c->degradation) {
        md << " n/a | n/a | n/a |";
        continue;
      }
      md << ' ' << fixed(c->min_ade, "%.4f") << " | " << fixed(c->degradation->delta, "%+.4f") << " | "
         << format_percent(c->degradation->relative) << " |";
    }
    md << '\n';
  }

  bool augmented = false;
  for (const auto & row : report.rows) {
    augmented = augmented || row.training != "original";
  }
  if (augmented) {
    md << "\n## Models retrained on augmented data\n\n";
    md << "| model | training | original minADE | perturbed minADE | Δ | %Δ |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto & row : report.rows) {
      if (row.training == "original" || row.conditions.size() < 2) {
        continue;
      }
      const auto & base = row.conditions.front();
      const auto & c = row.conditions[1];
      md << "| " << row.model << " | " << row.training << " | " << fixed(base.min_ade, "%.4f") << " | "
         << fixed(c.min_ade, "%.4f") << " | " << (c.degradation ? fixed(c.degradation->delta, "%+.4f") : "n/a")
         << " | " << (c.degradation ? format_percent(c.degradation->relative) : "n/a") << " |\n";
    }
  }
  md << "\nseed " << report.provenance.seed << ", config " << report.provenance.config_hash << ", version "
     << report.provenance.version << ", " << report.provenance.train_scenes << " training / "
     << report.provenance.test_scenes << " test scenes\n";
  return md.str();
}

std::string render_csv(const BenchmarkReport & report)
{
  std::ostringstream csv;
  csv << "model,training,condition,min_ade,count,failures,delta,relative_pct,median,p25,p75\n";
  for (const auto & row : report.rows) {
    for (const auto & c : row.conditions) {
      csv << row.model << ',' << row.training << ',' << c.condition << ',' << format_exact(c.min_ade) << ','
          << c.count << ',' << c.failures << ',';
      if (c.degradation) {
        csv << format_exact(c.degradation->delta) << ','
            << (c.degradation->relative ? fixed(*c.degradation->relative * 100.0, "%.2f") : "");
      } else {
        csv << ',';
      }
      csv << ',';
      if (c.distribution) {
        csv << format_exact(c.distribution->median) << ',' << format_exact(c.distribution->p25) << ','
            << format_exact(c.distribution->p75);
      } else {
        csv << ",,";
      }
      csv << '\n';
    }
  }
  return csv.str();
}

std::string report_to_json(const BenchmarkReport & report)
{
  Json j;
  j["provenance"] = {
    {"seed", report.provenance.seed},
    {"config_hash", report.provenance.config_hash},
    {"version", report.provenance.version},
    {"train_scenes", report.provenance.train_scenes},
    {"test_scenes", report.provenance.test_scenes}};
  j["perturbations"] = report.perturbations;
  auto rows = Json::array();
  for (const auto & row : report.rows) {
    Json rj;
    rj["model"] = row.model;
    rj["training"] = row.training;
    auto conditions = Json::array();
    for (const auto & c : row.conditions) {
      Json cj;
      cj["condition"] = c.condition;
      cj["min_ade"] = c.min_ade;
      cj["count"] = c.count;
      cj["failures"] = c.failures;
      if (c.degradation) {
        cj["delta"] = c.degradation->delta;
        cj["relative"] = c.degradation->relative ? Json(*c.degradation->relative) : Json(nullptr);
      }
      if (c.distribution) {
        const auto & d = *c.distribution;
        Json dj;
        dj["median"] = d.median;
        dj["p25"] = d.p25;
        dj["p75"] = d.p75;
        dj["edges"] = d.histogram.edges;
        dj["counts"] = d.histogram.counts;
        auto keys = Json::array();
        for (const auto & k : d.keys) {
          keys.push_back(Json::array({k.scene_id, k.agent_id}));
        }
        dj["keys"] = std::move(keys);
        dj["deltas"] = d.deltas;
        cj["distribution"] = std::move(dj);
      }
      conditions.push_back(std::move(cj));
    }
    rj["conditions"] = std::move(conditions);
    rows.push_back(std::move(rj));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

BenchmarkReport report_from_json(const std::string & text)
{
  try {
    const auto j = Json::parse(text);
    BenchmarkReport report;
    const auto & p = j.at("provenance");
    report.provenance.seed = p.at("seed").get<std::uint64_t>();
    report.provenance.config_hash = p.at("config_hash").get<std::string>();
    report.provenance.version = p.at("version").get<std::string>();
    report.provenance.train_scenes = p.at("train_scenes").get<std::size_t>();
    report.provenance.test_scenes = p.at("test_scenes").get<std::size_t>();
    report.perturbations = j.at("perturbations").get<std::vector<std::string>>();
    for (const auto & rj : j.at("rows")) {
      ReportRow row;
      row.model = rj.at("model").get<std::string>();
      row.training = rj.at("training").get<std::string>();
      for (const auto & cj : rj.at("conditions")) {
        ConditionResult c;
        c.condition = cj.at("condition").get<std::string>();
        c.min_ade = cj.at("min_ade").get<double>();
        c.count = cj.at("count").get<std::size_t>();
        c.failures = cj.at("failures").get<std::size_t>();
        if (cj.contains("delta")) {
          Degradation d;
          d.delta = cj.at("delta").get<double>();
          if (!cj.at("relative").is_null()) {
            d.relative = cj.at("relative").get<double>();
          }
          c.degradation = d;
        }
        if (cj.contains("distribution")) {
          const auto & dj = cj.at("distribution");
          DeltaDistribution d;
          d.median = dj.at("median").get<double>();
          d.p25 = dj.at("p25").get<double>();
          d.p75 = dj.at("p75").get<double>();
          d.histogram.edges = dj.at("edges").get<std::vector<double>>();
          d.histogram.counts = dj.at("counts").get<std::vector<std::size_t>>();
          for (const auto & k : dj.at("keys")) {
            d.keys.push_back({k.at(0).get<std::string>(), k.at(1).get<AgentId>()});
          }
          d.deltas = dj.at("deltas").get<std::vector<double>>();
          c.distribution = std::move(d);
        }
        row.conditions.push_back(std::move(c));
      }
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception & e) {
    throw DataError(std::string("report: malformed summary document: ") + e.what());
  }
}

std::string timing_to_json(const BenchmarkReport & report)
{
  auto stages = Json::array();
  for (const auto & t : report.timing) {
    stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  }
  return Json{{"stages", stages}}.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_report(
  const BenchmarkReport & report, ReportFormat format, const std::filesystem::path & dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::filesystem::path & path, const std::string & text) {
    write_file(path, text);
    written.push_back(path);
  };
  switch (format) {
    case ReportFormat::kMarkdown:
      emit(dir / "report.md", render_markdown(report));
      break;
    case ReportFormat::kSummary:
      emit(dir / "summary.json", report_to_json(report));
      break;
    case ReportFormat::kCsv: {
      emit(dir / "report.csv", render_csv(report));
      for (const auto & row : report.rows) {
        for (const auto & c : row.conditions) {
          if (!c.distribution) {
            continue;
          }
          const auto stem = condition_stem(row, c);
          std::ostringstream hist;
          write_histogram_csv(c.distribution->histogram, hist);
          emit(dir / ("histogram__" + stem + ".csv"), hist.str());
          std::ostringstream deltas;
          write_delta_csv(*c.distribution, deltas);
          emit(dir / ("delta__" + stem + ".csv"), deltas.str());
        }
      }
      break;
    }
  }
  return written;
}

}  // namespace trajbench
