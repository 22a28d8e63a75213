// Copyright 2026 The detsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "detsplit/errors.hpp"
#include "detsplit/router.hpp"
#include "detsplit/sweep.hpp"

namespace detsplit {

enum class ReportFormat { kCsv, kJson, kMarkdown, kPlotdata };

inline ReportFormat parse_report_format(std::string_view token) {
  if (token == "csv") return ReportFormat::kCsv;
  if (token == "json") return ReportFormat::kJson;
  if (token == "markdown") return ReportFormat::kMarkdown;
  if (token == "plotdata") return ReportFormat::kPlotdata;
  throw ConfigError("unknown report format '" + std::string(token) +
                    "' (expected csv, json, markdown, or plotdata)");
}

namespace detail {

inline std::string fmt(double value, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

inline std::string split_label(double p) {
  return fmt(p * 100.0, "%g") + "% easy";
}

}  // namespace detail

/// JSON form of a sweep, the lossless interchange format the other renderers
/// can be regenerated from.
inline nlohmann::json sweep_result_to_json(const SweepResult& result) {
  nlohmann::json doc;
  doc["timing"] = {{"fast_s", result.timing.fast_s},
                   {"slow_s", result.timing.slow_s},
                   {"predictor_s", result.timing.predictor_s}};
  doc["splits"] = result.splits;

  doc["criteria"] = nlohmann::json::array();
  for (const auto& name : result.criterion_names) {
    nlohmann::json entry;
    entry["name"] = name;
    entry["cells"] = nlohmann::json::array();
    const auto& per_split = result.cells.at(name);
    for (double p : result.splits) {
      const CellResult& cell = per_split.at(p);
      entry["cells"].push_back({{"split", p},
                                {"easy_count", cell.easy_count},
                                {"ap", cell.eval.ap},
                                {"disc_roc", cell.eval.disc_roc},
                                {"cont_roc", cell.eval.cont_roc},
                                {"avg_seconds", cell.cost.avg_seconds},
                                {"detection_seconds",
                                 cell.cost.detection_seconds},
                                {"overhead_seconds",
                                 cell.cost.overhead_seconds}});
    }
    doc["criteria"].push_back(std::move(entry));
  }

  doc["baseline"] = nlohmann::json::array();
  for (double p : result.splits) {
    const BaselineCell& cell = result.baseline.at(p);
    doc["baseline"].push_back(
        {{"split", p},
         {"ap_mean", cell.mean.ap},
         {"ap_stddev", cell.stddev.ap},
         {"disc_roc_mean", cell.mean.disc_roc},
         {"disc_roc_stddev", cell.stddev.disc_roc},
         {"cont_roc_mean", cell.mean.cont_roc},
         {"cont_roc_stddev", cell.stddev.cont_roc},
         {"avg_seconds", cell.cost.avg_seconds},
         {"detection_seconds", cell.cost.detection_seconds},
         {"overhead_seconds", cell.cost.overhead_seconds}});
  }
  return doc;
}

inline SweepResult sweep_result_from_json(const nlohmann::json& doc) {
  try {
    SweepResult result;
    result.timing.fast_s = doc.at("timing").at("fast_s").get<double>();
    result.timing.slow_s = doc.at("timing").at("slow_s").get<double>();
    result.timing.predictor_s =
        doc.at("timing").at("predictor_s").get<double>();
    result.splits = doc.at("splits").get<std::vector<double>>();

    for (const auto& entry : doc.at("criteria")) {
      const auto name = entry.at("name").get<std::string>();
      result.criterion_names.push_back(name);
      for (const auto& c : entry.at("cells")) {
        CellResult cell;
        cell.easy_count = c.at("easy_count").get<std::size_t>();
        cell.eval = {c.at("ap").get<double>(),
                     c.at("disc_roc").get<double>(),
                     c.at("cont_roc").get<double>()};
        cell.cost = {c.at("avg_seconds").get<double>(),
                     c.at("detection_seconds").get<double>(),
                     c.at("overhead_seconds").get<double>()};
        result.cells[name][c.at("split").get<double>()] = cell;
      }
    }
    for (const auto& b : doc.at("baseline")) {
      BaselineCell cell;
      cell.mean = {b.at("ap_mean").get<double>(),
                   b.at("disc_roc_mean").get<double>(),
                   b.at("cont_roc_mean").get<double>()};
      cell.stddev = {b.at("ap_stddev").get<double>(),
                     b.at("disc_roc_stddev").get<double>(),
                     b.at("cont_roc_stddev").get<double>()};
      cell.cost = {b.at("avg_seconds").get<double>(),
                   b.at("detection_seconds").get<double>(),
                   b.at("overhead_seconds").get<double>()};
      result.baseline[b.at("split").get<double>()] = cell;
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed sweep result: ") + e.what());
  }
}

namespace detail {

inline std::string emit_csv(const SweepResult& result) {
  std::string out = "criterion,split,metric,value\n";
  auto row = [&out](const std::string& criterion, double split,
                    const char* metric, double value) {
    out += criterion + ',' + fmt(split, "%.2f") + ',' + metric + ',' +
           fmt(value, "%.4f") + '\n';
  };
  for (const auto& name : result.criterion_names) {
    const auto& per_split = result.cells.at(name);
    for (double p : result.splits) {
      const CellResult& cell = per_split.at(p);
      row(name, p, "ap", cell.eval.ap);
      row(name, p, "disc_roc", cell.eval.disc_roc);
      row(name, p, "cont_roc", cell.eval.cont_roc);
      row(name, p, "avg_seconds", cell.cost.avg_seconds);
      row(name, p, "detection_seconds", cell.cost.detection_seconds);
      row(name, p, "overhead_seconds", cell.cost.overhead_seconds);
    }
  }
  for (double p : result.splits) {
    const BaselineCell& cell = result.baseline.at(p);
    row("random", p, "ap_mean", cell.mean.ap);
    row("random", p, "ap_stddev", cell.stddev.ap);
    row("random", p, "disc_roc_mean", cell.mean.disc_roc);
    row("random", p, "disc_roc_stddev", cell.stddev.disc_roc);
    row("random", p, "cont_roc_mean", cell.mean.cont_roc);
    row("random", p, "cont_roc_stddev", cell.stddev.cont_roc);
    row("random", p, "avg_seconds", cell.cost.avg_seconds);
    row("random", p, "detection_seconds", cell.cost.detection_seconds);
    row("random", p, "overhead_seconds", cell.cost.overhead_seconds);
  }
  return out;
}

inline std::string emit_markdown(const SweepResult& result) {
  std::string out = "## Detection quality (average precision)\n\n";
  out += "| strategy |";
  for (double p : result.splits) out += ' ' + split_label(p) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < result.splits.size(); ++i) out += "---:|";
  out += "\n| random (baseline) |";
  for (double p : result.splits) {
    const BaselineCell& cell = result.baseline.at(p);
    out += ' ' + fmt(cell.mean.ap, "%.3f") + " ± " +
           fmt(cell.stddev.ap, "%.3f") + " |";
  }
  out += '\n';
  for (const auto& name : result.criterion_names) {
    out += "| " + name + " |";
    for (double p : result.splits) {
      out += ' ' + fmt(result.cells.at(name).at(p).eval.ap, "%.3f") + " |";
    }
    out += '\n';
  }

  out += "\n## Modeled time per image (seconds)\n\n";
  out += "| component |";
  for (double p : result.splits) out += ' ' + split_label(p) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < result.splits.size(); ++i) out += "---:|";
  out += '\n';

  auto time_row = [&](const char* label, auto value_of, bool skip_boundary) {
    out += "| ";
    out += label;
    out += " |";
    for (double p : result.splits) {
      const bool boundary = p == 0.0 || p == 1.0;
      out += (skip_boundary && boundary)
                 ? " - |"
                 : ' ' + fmt(value_of(p), "%.2f") + " |";
    }
    out += '\n';
  };
  const TimingModel& t = result.timing;
  time_row("difficulty-score overhead",
           [&](double p) { return expected_cost(p, t, false).overhead_seconds; },
           true);
  time_row("fast-detector overhead",
           [&](double p) { return expected_cost(p, t, true).overhead_seconds; },
           true);
  time_row("detection only",
           [&](double p) { return expected_cost(p, t, false).detection_seconds; },
           false);
  time_row("detection + difficulty scores",
           [&](double p) { return expected_cost(p, t, false).avg_seconds; },
           false);
  time_row("detection + fast-detector criterion",
           [&](double p) { return expected_cost(p, t, true).avg_seconds; },
           false);
  return out;
}

inline std::string emit_plotdata(const SweepResult& result) {
  std::string out = "criterion,split,avg_seconds,ap,disc_roc,cont_roc\n";
  for (const auto& name : result.criterion_names) {
    for (double p : result.splits) {
      const CellResult& cell = result.cells.at(name).at(p);
      out += name + ',' + fmt(p, "%.2f") + ',' +
             fmt(cell.cost.avg_seconds, "%.4f") + ',' +
             fmt(cell.eval.ap, "%.4f") + ',' +
             fmt(cell.eval.disc_roc, "%.4f") + ',' +
             fmt(cell.eval.cont_roc, "%.4f") + '\n';
    }
  }
  return out;
}

}  // namespace detail

inline std::string emit_report(const SweepResult& result,
                               ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv:
      return detail::emit_csv(result);
    case ReportFormat::kJson:
      return sweep_result_to_json(result).dump(2) + "\n";
    case ReportFormat::kMarkdown:
      return detail::emit_markdown(result);
    case ReportFormat::kPlotdata:
      return detail::emit_plotdata(result);
  }
  throw ConfigError("unhandled report format");
}

}  // namespace detsplit
