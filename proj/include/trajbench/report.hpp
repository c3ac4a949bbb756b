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

#ifndef TRAJBENCH__REPORT_HPP_
#define TRAJBENCH__REPORT_HPP_

#include "trajbench/bench.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace trajbench
{

enum class ReportFormat { kCsv, kMarkdown, kSummary };

ReportFormat report_format_from_string(std::string_view name);

/// Table-1 style matrix: one row per model trained on original data with the
/// original minADE followed by minADE, delta and relative increase for every
/// perturbation. A second table lists augmented-training rows when present.
std::string render_markdown(const BenchmarkReport & report);

/// One row per (model, training, condition) with columns
/// model,training,condition,min_ade,count,failures,delta,relative_pct,median,p25,p75.
std::string render_csv(const BenchmarkReport & report);

/// Complete report as JSON, including per-trajectory deltas and histograms.
std::string report_to_json(const BenchmarkReport & report);
/// Inverse of report_to_json (timing is not part of it). Throws DataError.
BenchmarkReport report_from_json(const std::string & text);

/// Timing entries as JSON.
std::string timing_to_json(const BenchmarkReport & report);

/**
 * @brief Writes the report in `format` into `dir` and returns the file paths.
 *
 * kMarkdown writes report.md; kCsv writes report.csv plus, for every perturbed
 * condition, a histogram CSV (bin_left,bin_right,count) and a per-trajectory
 * delta CSV; kSummary writes summary.json. Throws IoError when `dir` cannot be
 * created or written.
 */
std::vector<std::filesystem::path> emit_report(
  const BenchmarkReport & report, ReportFormat format, const std::filesystem::path & dir);

/// Relative increase in percent with two decimals and explicit sign, "n/a"
/// when undefined.
std::string format_percent(const std::optional<double> & relative);

}  // namespace trajbench

#endif  // TRAJBENCH__REPORT_HPP_
