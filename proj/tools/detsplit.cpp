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

// Command-line front end. Subcommands:
//   generate  write a seeded synthetic benchmark to a directory
//   sweep     run every criterion over a split grid and report
//   baseline  run only the random-assignment baseline
//   eval      score one detections source against a dataset
//   report    re-render a saved sweep result
// Exit codes: 0 success, 2 input/format error, 3 configuration error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>

#include "detsplit/detsplit.hpp"

namespace {

using detsplit::ConfigError;
using detsplit::InputError;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw InputError("failed while writing file '" + path + "'");
  std::cout << "wrote " << path << "\n";
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + what + ": '" + text + "'");
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    if (text.find('-') != std::string::npos) throw std::invalid_argument("");
    std::size_t pos = 0;
    const std::uint64_t value = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("invalid unsigned integer for " + what + ": '" + text +
                      "'");
  }
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::vector<double> parse_splits(const std::string& text) {
  std::vector<double> splits;
  for (const auto& token : split_commas(text)) {
    splits.push_back(parse_double(token, "--splits"));
  }
  return splits;
}

detsplit::TimingModel parse_timing(const std::string& text) {
  detsplit::TimingModel timing;
  if (text.empty()) return timing;
  for (const auto& token : split_commas(text)) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("timing token '" + token + "' is not key=value");
    }
    const std::string key = token.substr(0, eq);
    const double value = parse_double(token.substr(eq + 1), "--timing");
    if (key == "fast") {
      timing.fast_s = value;
    } else if (key == "slow") {
      timing.slow_s = value;
    } else if (key == "pred") {
      timing.predictor_s = value;
    } else {
      throw ConfigError("unknown timing key '" + key +
                        "' (expected fast, slow, pred)");
    }
  }
  timing.validate();
  return timing;
}

std::vector<detsplit::CriterionSpec> parse_criteria(const std::string& text) {
  std::vector<detsplit::CriterionSpec> criteria;
  for (const auto& token : split_commas(text)) {
    criteria.push_back(detsplit::CriterionSpec::parse(token));
  }
  return criteria;
}

std::vector<detsplit::ReportFormat> parse_emit(const std::string& text) {
  std::vector<detsplit::ReportFormat> formats;
  for (const auto& token : split_commas(text)) {
    const auto format = detsplit::parse_report_format(token);
    bool seen = false;
    for (auto f : formats) seen = seen || f == format;
    if (!seen) formats.push_back(format);
  }
  return formats;
}

detsplit::SyntheticDetectorConfig parse_synth_backend(const std::string& body) {
  detsplit::SyntheticDetectorConfig cfg;
  bool first = true;
  for (const auto& token : split_commas(body)) {
    if (first && token == "fast") {
      cfg = detsplit::default_fast_config();
    } else if (first && token == "slow") {
      cfg = detsplit::default_slow_config();
    } else {
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("synth spec token '" + token +
                          "' is not key=value (or a leading fast/slow preset)");
      }
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "q") {
        cfg.quality = parse_double(value, "synth q");
      } else if (key == "s0") {
        cfg.size_midpoint = parse_double(value, "synth s0");
      } else if (key == "gamma") {
        cfg.size_slope = parse_double(value, "synth gamma");
      } else if (key == "fp") {
        cfg.false_positive_rate = parse_double(value, "synth fp");
      } else if (key == "noise") {
        cfg.localization_noise = parse_double(value, "synth noise");
      } else if (key == "ctp") {
        cfg.tp_confidence_floor = parse_double(value, "synth ctp");
      } else if (key == "cfp") {
        cfg.fp_confidence_ceiling = parse_double(value, "synth cfp");
      } else if (key == "seed") {
        cfg.seed = parse_u64(value, "synth seed");
      } else {
        throw ConfigError("unknown synth key '" + key +
                          "' (expected q, s0, gamma, fp, noise, ctp, cfp, "
                          "seed)");
      }
    }
    first = false;
  }
  return cfg;
}

/// Backend factory: "synth:..." builds the simulator, anything else is a
/// precomputed-detections jsonl path. Confidence filtering is off; the file
/// or simulator is taken as-is.
std::unique_ptr<detsplit::DetectorBackend> make_backend(
    const std::string& spec, std::string name) {
  detsplit::BackendConfig config{std::move(name), 0.0, 0.0};
  constexpr std::string_view prefix = "synth:";
  if (spec.rfind(prefix, 0) == 0) {
    return std::make_unique<detsplit::SyntheticBackend>(
        parse_synth_backend(spec.substr(prefix.size())), std::move(config));
  }
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw InputError("cannot open detections file '" + spec + "'");
  return std::make_unique<detsplit::PrecomputedBackend>(
      detsplit::parse_detections(in), std::move(config));
}

detsplit::DatasetFormat parse_format(const std::string& token) {
  if (token == "jsonl") return detsplit::DatasetFormat::kJsonl;
  if (token == "fddb-ellipse") return detsplit::DatasetFormat::kFddbEllipse;
  throw ConfigError("unknown dataset format '" + token +
                    "' (expected jsonl or fddb-ellipse)");
}

detsplit::Dataset load_dataset(const std::string& path,
                               const std::string& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset file '" + path + "'");
  return detsplit::parse_dataset(in, parse_format(format),
                                 std::filesystem::path(path).stem().string());
}

/// Score-table entries are "name=path" or a bare path whose file stem names
/// the table.
detsplit::ScoreTableRegistry load_scores(
    const std::vector<std::string>& entries) {
  detsplit::ScoreTableRegistry registry;
  for (const auto& entry : entries) {
    std::string name;
    std::string path;
    const auto eq = entry.find('=');
    if (eq != std::string::npos) {
      name = entry.substr(0, eq);
      path = entry.substr(eq + 1);
    } else {
      path = entry;
      name = std::filesystem::path(entry).stem().string();
    }
    if (name.empty() || path.empty()) {
      throw ConfigError("score table entry '" + entry +
                        "' must be <name>=<path> or a csv path");
    }
    if (registry.contains(name)) {
      throw ConfigError("score table '" + name + "' given twice");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open score table '" + path + "'");
    registry.emplace(std::move(name), detsplit::load_score_table(in));
  }
  return registry;
}

// ---------------------------------------------------------------------------
// Declarative config files: a JSON object whose keys are the long option
// names (dashes or underscores). Command-line flags override file values.

std::string config_value_to_string(const nlohmann::json& value,
                                   const std::string& key) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number()) return value.dump();
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ',';
      joined += config_value_to_string(item, key);
    }
    return joined;
  }
  throw ConfigError("config key '" + key +
                    "' must be a string, number, boolean, or array");
}

class ConfigDoc {
 public:
  void load(const std::string& path) {
    try {
      doc_ = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("config file '" + path + "': " + e.what());
    }
    if (!doc_.is_object()) {
      throw InputError("config file '" + path + "' must be a JSON object");
    }
    loaded_ = true;
  }

  const nlohmann::json* find(const std::string& key) const {
    if (!loaded_) return nullptr;
    if (auto it = doc_.find(key); it != doc_.end()) return &*it;
    std::string underscored = key;
    for (char& c : underscored) {
      if (c == '-') c = '_';
    }
    if (auto it = doc_.find(underscored); it != doc_.end()) return &*it;
    return nullptr;
  }

  /// Fill `target` from the config when the flag was not given on the
  /// command line.
  void merge(const CLI::App& cmd, const std::string& key,
             std::string* target) const {
    if (cmd.count("--" + key) > 0) return;
    if (const nlohmann::json* value = find(key)) {
      *target = config_value_to_string(*value, key);
    }
  }

  void merge(const CLI::App& cmd, const std::string& key,
             std::vector<std::string>* target) const {
    if (cmd.count("--" + key) > 0) return;
    const nlohmann::json* value = find(key);
    if (value == nullptr) return;
    target->clear();
    if (value->is_array()) {
      for (const auto& item : *value) {
        target->push_back(config_value_to_string(item, key));
      }
    } else {
      target->push_back(config_value_to_string(*value, key));
    }
  }

  void merge(const CLI::App& cmd, const std::string& key, bool* target) const {
    if (cmd.count("--" + key) > 0) return;
    if (const nlohmann::json* value = find(key)) {
      if (!value->is_boolean()) {
        throw ConfigError("config key '" + key + "' must be a boolean");
      }
      *target = value->get<bool>();
    }
  }

 private:
  nlohmann::json doc_;
  bool loaded_ = false;
};

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) {
    throw ConfigError("missing required option " + flag);
  }
}

// ---------------------------------------------------------------------------
// Subcommand option bags. Numeric options stay strings until after the
// config merge so file values and flag values go through one converter.

struct GenerateOpts {
  std::string config_path;
  std::string out;
  std::string images = "500";
  std::string seed = "1";
  bool independent_draws = false;
};

struct SweepOpts {
  std::string config_path;
  std::string dataset;
  std::string format = "jsonl";
  std::string fast;
  std::string slow;
  std::string criterion;
  std::vector<std::string> scores;
  std::string splits = "1.0,0.75,0.5,0.25,0.0";
  std::string timing = "fast=0.28,slow=1.89,pred=0.05";
  std::string runs = "5";
  std::string seed = "0";
  std::string fp_axis = "0";
  std::string out;
  std::string emit = "csv";
};

struct BaselineOpts {
  std::string config_path;
  std::string dataset;
  std::string format = "jsonl";
  std::string fast;
  std::string slow;
  std::string splits = "1.0,0.75,0.5,0.25,0.0";
  std::string timing = "fast=0.28,slow=1.89,pred=0.05";
  std::string runs = "5";
  std::string seed = "0";
  std::string fp_axis = "0";
  std::string out;
};

struct EvalOpts {
  std::string config_path;
  std::string dataset;
  std::string format = "jsonl";
  std::string fast;
  std::string fp_axis = "0";
};

struct ReportOpts {
  std::string config_path;
  std::string in;
  std::string emit = "csv";
  std::string out;
};

std::string report_filename(detsplit::ReportFormat format) {
  switch (format) {
    case detsplit::ReportFormat::kCsv:
      return "report.csv";
    case detsplit::ReportFormat::kJson:
      return "report.json";
    case detsplit::ReportFormat::kMarkdown:
      return "report.md";
    case detsplit::ReportFormat::kPlotdata:
      return "plotdata.csv";
  }
  throw ConfigError("unhandled report format");
}

void run_generate(const CLI::App& cmd, GenerateOpts opts) {
  ConfigDoc config;
  if (!opts.config_path.empty()) config.load(opts.config_path);
  config.merge(cmd, "out", &opts.out);
  config.merge(cmd, "images", &opts.images);
  config.merge(cmd, "seed", &opts.seed);
  config.merge(cmd, "independent-draws", &opts.independent_draws);
  require(opts.out, "--out");

  detsplit::SynthBenchConfig cfg;
  cfg.num_images =
      static_cast<std::size_t>(parse_u64(opts.images, "--images"));
  cfg.master_seed = parse_u64(opts.seed, "--seed");
  cfg.shared_draws = !opts.independent_draws;

  const detsplit::SynthBenchmark bench = detsplit::generate_benchmark(cfg);
  const detsplit::SyntheticBackend fast = detsplit::make_fast_backend(bench);
  const detsplit::SyntheticBackend slow = detsplit::make_slow_backend(bench);
  std::map<std::string, std::vector<detsplit::Detection>> fast_out;
  std::map<std::string, std::vector<detsplit::Detection>> slow_out;
  for (const auto& image : bench.dataset.images) {
    fast_out[image.id] = fast.detect(image).detections;
    slow_out[image.id] = slow.detect(image).detections;
  }

  const std::filesystem::path dir(opts.out);
  std::filesystem::create_directories(dir);
  write_file((dir / "dataset.jsonl").string(),
             detsplit::serialize_dataset(bench.dataset));
  write_file((dir / "detections_fast.jsonl").string(),
             detsplit::serialize_detections(fast_out));
  write_file((dir / "detections_slow.jsonl").string(),
             detsplit::serialize_detections(slow_out));
  write_file((dir / "scores_class_agnostic.csv").string(),
             detsplit::serialize_score_table(bench.class_agnostic));
  write_file((dir / "scores_person_aware.csv").string(),
             detsplit::serialize_score_table(bench.person_aware));

  auto synth_json = [](const detsplit::SyntheticDetectorConfig& c) {
    return nlohmann::json{{"quality", c.quality},
                          {"size_midpoint", c.size_midpoint},
                          {"size_slope", c.size_slope},
                          {"false_positive_rate", c.false_positive_rate},
                          {"localization_noise", c.localization_noise},
                          {"tp_confidence_floor", c.tp_confidence_floor},
                          {"fp_confidence_ceiling", c.fp_confidence_ceiling},
                          {"seed", c.seed}};
  };
  nlohmann::json doc;
  doc["generator"] = {{"images", cfg.num_images},
                      {"seed", cfg.master_seed},
                      {"shared_draws", cfg.shared_draws},
                      {"fast", synth_json(bench.fast_config)},
                      {"slow", synth_json(bench.slow_config)}};
  // Ready-made sweep configuration pointing at the files above.
  doc["dataset"] = (dir / "dataset.jsonl").string();
  doc["format"] = "jsonl";
  doc["fast"] = (dir / "detections_fast.jsonl").string();
  doc["slow"] = (dir / "detections_slow.jsonl").string();
  doc["scores"] = {
      "class_agnostic=" + (dir / "scores_class_agnostic.csv").string(),
      "person_aware=" + (dir / "scores_person_aware.csv").string()};
  doc["criterion"] =
      "difficulty:class_agnostic,difficulty:person_aware,num_faces,"
      "avg_face_size,faces_over_avg_size";
  write_file((dir / "config.json").string(), doc.dump(2) + "\n");
}

void run_sweep_cmd(const CLI::App& cmd, SweepOpts opts) {
  ConfigDoc config;
  if (!opts.config_path.empty()) config.load(opts.config_path);
  config.merge(cmd, "dataset", &opts.dataset);
  config.merge(cmd, "format", &opts.format);
  config.merge(cmd, "fast", &opts.fast);
  config.merge(cmd, "slow", &opts.slow);
  config.merge(cmd, "criterion", &opts.criterion);
  config.merge(cmd, "scores", &opts.scores);
  config.merge(cmd, "splits", &opts.splits);
  config.merge(cmd, "timing", &opts.timing);
  config.merge(cmd, "runs", &opts.runs);
  config.merge(cmd, "seed", &opts.seed);
  config.merge(cmd, "fp-axis", &opts.fp_axis);
  config.merge(cmd, "out", &opts.out);
  config.merge(cmd, "emit", &opts.emit);
  require(opts.dataset, "--dataset");
  require(opts.fast, "--fast");
  require(opts.slow, "--slow");
  require(opts.criterion, "--criterion");
  require(opts.out, "--out");

  detsplit::ExperimentConfig experiment;
  experiment.criteria = parse_criteria(opts.criterion);
  experiment.split_grid = parse_splits(opts.splits);
  experiment.timing = parse_timing(opts.timing);
  experiment.baseline_runs =
      static_cast<std::size_t>(parse_u64(opts.runs, "--runs"));
  experiment.baseline_seed = parse_u64(opts.seed, "--seed");
  experiment.roc_fp_axis = parse_double(opts.fp_axis, "--fp-axis");

  const detsplit::Dataset dataset = load_dataset(opts.dataset, opts.format);
  const detsplit::ScoreTableRegistry tables = load_scores(opts.scores);
  const auto fast = make_backend(opts.fast, "fast");
  const auto slow = make_backend(opts.slow, "slow");

  const detsplit::SweepResult result =
      detsplit::run_sweep(dataset, tables, *fast, *slow, experiment);

  const std::filesystem::path dir(opts.out);
  std::filesystem::create_directories(dir);
  write_file((dir / "sweep.json").string(),
             detsplit::emit_report(result, detsplit::ReportFormat::kJson));
  for (const auto format : parse_emit(opts.emit)) {
    if (format == detsplit::ReportFormat::kJson) continue;  // sweep.json
    write_file((dir / report_filename(format)).string(),
               detsplit::emit_report(result, format));
  }
}

void run_baseline_cmd(const CLI::App& cmd, BaselineOpts opts) {
  ConfigDoc config;
  if (!opts.config_path.empty()) config.load(opts.config_path);
  config.merge(cmd, "dataset", &opts.dataset);
  config.merge(cmd, "format", &opts.format);
  config.merge(cmd, "fast", &opts.fast);
  config.merge(cmd, "slow", &opts.slow);
  config.merge(cmd, "splits", &opts.splits);
  config.merge(cmd, "timing", &opts.timing);
  config.merge(cmd, "runs", &opts.runs);
  config.merge(cmd, "seed", &opts.seed);
  config.merge(cmd, "fp-axis", &opts.fp_axis);
  config.merge(cmd, "out", &opts.out);
  require(opts.dataset, "--dataset");
  require(opts.fast, "--fast");
  require(opts.slow, "--slow");

  const detsplit::Dataset dataset = load_dataset(opts.dataset, opts.format);
  const auto fast = make_backend(opts.fast, "fast");
  const auto slow = make_backend(opts.slow, "slow");
  const auto splits = parse_splits(opts.splits);
  const auto timing = parse_timing(opts.timing);
  const auto runs = static_cast<std::size_t>(parse_u64(opts.runs, "--runs"));
  const auto seed = parse_u64(opts.seed, "--seed");
  const double fp_axis = parse_double(opts.fp_axis, "--fp-axis");

  detsplit::SweepResult result;
  result.splits = splits;
  result.timing = timing;
  for (const double p : splits) {
    result.baseline[p] = detsplit::random_baseline(dataset, *fast, *slow, p,
                                                   runs, seed, fp_axis,
                                                   timing);
  }
  const std::string csv =
      detsplit::emit_report(result, detsplit::ReportFormat::kCsv);
  std::cout << csv;
  if (!opts.out.empty()) {
    const std::filesystem::path dir(opts.out);
    std::filesystem::create_directories(dir);
    write_file((dir / "baseline.csv").string(), csv);
  }
}

void run_eval_cmd(const CLI::App& cmd, EvalOpts opts) {
  ConfigDoc config;
  if (!opts.config_path.empty()) config.load(opts.config_path);
  config.merge(cmd, "dataset", &opts.dataset);
  config.merge(cmd, "format", &opts.format);
  config.merge(cmd, "fast", &opts.fast);
  config.merge(cmd, "fp-axis", &opts.fp_axis);
  require(opts.dataset, "--dataset");
  require(opts.fast, "--fast");

  const detsplit::Dataset dataset = load_dataset(opts.dataset, opts.format);
  const auto backend = make_backend(opts.fast, "eval");
  const double fp_axis = parse_double(opts.fp_axis, "--fp-axis");

  std::map<std::string, detsplit::DetectorOutput> outputs;
  for (const auto& image : dataset.images) {
    outputs[image.id] = backend->detect(image);
  }
  const detsplit::MatchResult match =
      detsplit::match_detections(outputs, dataset);
  const detsplit::EvalReport report = detsplit::evaluate(match, fp_axis);
  const nlohmann::json doc{{"ap", report.ap},
                           {"disc_roc", report.disc_roc},
                           {"cont_roc", report.cont_roc},
                           {"num_gt_faces", match.num_gt_faces},
                           {"num_detections", match.detections.size()}};
  std::cout << doc.dump(2) << "\n";
}

void run_report_cmd(const CLI::App& cmd, ReportOpts opts) {
  ConfigDoc config;
  if (!opts.config_path.empty()) config.load(opts.config_path);
  config.merge(cmd, "in", &opts.in);
  config.merge(cmd, "emit", &opts.emit);
  config.merge(cmd, "out", &opts.out);
  require(opts.in, "--in");

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(opts.in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("sweep result '" + opts.in + "': " + e.what());
  }
  const detsplit::SweepResult result = detsplit::sweep_result_from_json(doc);
  const auto formats = parse_emit(opts.emit);

  if (opts.out.empty()) {
    if (formats.size() != 1) {
      throw ConfigError(
          "without --out, --emit must name exactly one format to print");
    }
    std::cout << detsplit::emit_report(result, formats.front());
    return;
  }
  const std::filesystem::path dir(opts.out);
  std::filesystem::create_directories(dir);
  for (const auto format : formats) {
    write_file((dir / report_filename(format)).string(),
               detsplit::emit_report(result, format));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "detsplit: route images between fast and slow detectors by predicted "
      "difficulty"};
  app.require_subcommand(1);

  GenerateOpts gen;
  CLI::App* cmd_gen =
      app.add_subcommand("generate", "Write a seeded synthetic benchmark");
  cmd_gen->add_option("--out", gen.out, "Output directory");
  cmd_gen->add_option("--images", gen.images, "Number of images (default 500)");
  cmd_gen->add_option("--seed", gen.seed, "Master seed (default 1)");
  cmd_gen->add_flag("--independent-draws", gen.independent_draws,
                    "Give the slow detector its own random stream instead of "
                    "the shared dominant-pair stream");
  cmd_gen->add_option("--config", gen.config_path,
                      "JSON config file (flags override it)");

  SweepOpts sweep;
  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "Run every criterion across the split grid and report");
  cmd_sweep->add_option("--dataset", sweep.dataset, "Dataset file");
  cmd_sweep->add_option("--format", sweep.format,
                        "Dataset format: jsonl or fddb-ellipse");
  cmd_sweep->add_option("--fast", sweep.fast,
                        "Fast backend: detections jsonl path or synth spec");
  cmd_sweep->add_option("--slow", sweep.slow,
                        "Slow backend: detections jsonl path or synth spec");
  cmd_sweep->add_option("--criterion", sweep.criterion,
                        "Comma list: num_faces, avg_face_size, "
                        "faces_over_avg_size, difficulty:<table>");
  cmd_sweep->add_option("--scores", sweep.scores,
                        "Score table <name>=<csv path> (repeatable; bare "
                        "path uses the file stem as name)");
  cmd_sweep->add_option("--splits", sweep.splits,
                        "Comma list of easy fractions (default "
                        "1.0,0.75,0.5,0.25,0.0)");
  cmd_sweep->add_option("--timing", sweep.timing,
                        "fast=<s>,slow=<s>,pred=<s> (default "
                        "fast=0.28,slow=1.89,pred=0.05)");
  cmd_sweep->add_option("--runs", sweep.runs,
                        "Random-baseline runs (default 5)");
  cmd_sweep->add_option("--seed", sweep.seed,
                        "Random-baseline seed (default 0)");
  cmd_sweep->add_option("--fp-axis", sweep.fp_axis,
                        "ROC false-positive axis maximum (0 = automatic)");
  cmd_sweep->add_option("--out", sweep.out, "Output directory");
  cmd_sweep->add_option("--emit", sweep.emit,
                        "Comma list of csv,json,markdown,plotdata (default "
                        "csv; sweep.json is always written)");
  cmd_sweep->add_option("--config", sweep.config_path,
                        "JSON config file (flags override it)");

  BaselineOpts baseline;
  CLI::App* cmd_baseline = app.add_subcommand(
      "baseline", "Run only the random-assignment baseline");
  cmd_baseline->add_option("--dataset", baseline.dataset, "Dataset file");
  cmd_baseline->add_option("--format", baseline.format,
                           "Dataset format: jsonl or fddb-ellipse");
  cmd_baseline->add_option("--fast", baseline.fast,
                           "Fast backend: detections jsonl path or synth "
                           "spec");
  cmd_baseline->add_option("--slow", baseline.slow,
                           "Slow backend: detections jsonl path or synth "
                           "spec");
  cmd_baseline->add_option("--splits", baseline.splits,
                           "Comma list of easy fractions");
  cmd_baseline->add_option("--timing", baseline.timing,
                           "fast=<s>,slow=<s>,pred=<s>");
  cmd_baseline->add_option("--runs", baseline.runs, "Runs (default 5)");
  cmd_baseline->add_option("--seed", baseline.seed, "Seed (default 0)");
  cmd_baseline->add_option("--fp-axis", baseline.fp_axis,
                           "ROC false-positive axis maximum (0 = automatic)");
  cmd_baseline->add_option("--out", baseline.out,
                           "Optional directory for baseline.csv (stdout "
                           "always gets the csv)");
  cmd_baseline->add_option("--config", baseline.config_path,
                           "JSON config file (flags override it)");

  EvalOpts eval;
  CLI::App* cmd_eval = app.add_subcommand(
      "eval", "Score one detections source against a dataset");
  cmd_eval->add_option("--dataset", eval.dataset, "Dataset file");
  cmd_eval->add_option("--format", eval.format,
                       "Dataset format: jsonl or fddb-ellipse");
  cmd_eval->add_option("--fast", eval.fast,
                       "Detections to score: jsonl path or synth spec");
  cmd_eval->add_option("--fp-axis", eval.fp_axis,
                       "ROC false-positive axis maximum (0 = automatic)");
  cmd_eval->add_option("--config", eval.config_path,
                       "JSON config file (flags override it)");

  ReportOpts report;
  CLI::App* cmd_report =
      app.add_subcommand("report", "Re-render a saved sweep result");
  cmd_report->add_option("--in", report.in, "sweep.json produced by sweep");
  cmd_report->add_option("--emit", report.emit,
                         "Comma list of csv,json,markdown,plotdata");
  cmd_report->add_option("--out", report.out,
                         "Output directory (omit to print a single format)");
  cmd_report->add_option("--config", report.config_path,
                         "JSON config file (flags override it)");

  try {
    app.parse(argc, argv);
    if (cmd_gen->parsed()) run_generate(*cmd_gen, gen);
    if (cmd_sweep->parsed()) run_sweep_cmd(*cmd_sweep, sweep);
    if (cmd_baseline->parsed()) run_baseline_cmd(*cmd_baseline, baseline);
    if (cmd_eval->parsed()) run_eval_cmd(*cmd_eval, eval);
    if (cmd_report->parsed()) run_report_cmd(*cmd_report, report);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
