// Copyright 2026 The dslrec Authors.
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

#include "dslrec/experiment.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "dslrec/checkpoint.h"
#include "dslrec/config.h"
#include "dslrec/graph.h"

namespace dslrec {
namespace {

template <typename T>
std::string JoinList(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out << FormatDouble(values[k]);
    } else {
      out << values[k];
    }
  }
  return out.str();
}

std::string DegreeCutsText(const std::vector<DegreeInterval>& intervals) {
  std::vector<int> cuts;
  for (const auto& i : intervals) cuts.push_back(i.lo);
  return JoinList(cuts);
}

std::uint64_t ToSeed(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(value, &used);
    if (used == value.size()) return seed;
  } catch (const std::exception&) {
  }
  throw Error("bad value '" + value + "' for " + key);
}

int ToCount(const std::string& key, const std::string& value) {
  const auto list = ParseIntList(value);
  if (list.size() != 1) throw Error("bad value '" + value + "' for " + key);
  return list[0];
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

EvalOptions TestOptions(const ExperimentSpec& spec) {
  EvalOptions o;
  o.split = Split::kTest;
  o.num_negatives = spec.num_negatives;
  o.cutoffs = spec.cutoffs;
  o.seed = spec.eval_seed;
  o.num_threads = spec.num_threads;
  return o;
}

void WriteReportFiles(const std::filesystem::path& dir, const EvalReport& report) {
  auto table = OpenForWrite(dir / "report.txt");
  WriteReportTable(table, report);
  auto rows = OpenForWrite(dir / "metrics.txt");
  WriteMetricRows(rows, report);
}

std::string MetricLabel(const char* name, int cutoff) {
  return std::string(name) + "@" + std::to_string(cutoff);
}

}  // namespace

std::string TaskName(Task task) {
  switch (task) {
    case Task::kTrain:
      return "train";
    case Task::kEval:
      return "eval";
    case Task::kAblation:
      return "ablate";
    case Task::kRobustness:
      return "robust";
    case Task::kSweep:
      return "sweep";
    case Task::kCaseStudy:
      return "case-study";
  }
  return "unknown";
}

void ExperimentSpec::Validate() const {
  train.Validate();
  if (dataset_dir.empty()) throw Error("a dataset directory is required");
  if (!std::filesystem::is_directory(dataset_dir)) {
    throw Error("dataset directory does not exist: " + dataset_dir.string());
  }
  if (task == Task::kEval && checkpoint_dir.empty()) {
    throw Error("eval needs a checkpoint directory");
  }
  if (!checkpoint_dir.empty() && !std::filesystem::is_directory(checkpoint_dir)) {
    throw Error("checkpoint directory does not exist: " + checkpoint_dir.string());
  }
  if (num_negatives < 0) throw Error("negatives must be nonnegative");
  if (num_threads < 1) throw Error("threads must be positive");
  if (cutoffs.empty()) throw Error("at least one cutoff is required");
  for (int n : cutoffs) {
    if (n < 1) throw Error("cutoffs must be positive");
  }
  if (task == Task::kSweep && lambda2_grid.empty() && batch_grid.empty() &&
      layer_grid.empty()) {
    throw Error("sweep needs at least one non-empty grid");
  }
  if (task == Task::kAblation && variants.empty()) {
    throw Error("ablation needs at least one variant");
  }
  for (double r : noise_ratios) {
    if (r < 0.0) throw Error("noise ratios must be nonnegative");
  }
}

void ApplySetting(ExperimentSpec& spec, const std::string& key,
                  const std::string& value) {
  if (ApplyTrainSetting(spec.train, key, value)) return;
  if (key == "dataset_dir") {
    spec.dataset_dir = value;
  } else if (key == "out") {
    spec.out_dir = value;
  } else if (key == "checkpoint") {
    spec.checkpoint_dir = value;
  } else if (key == "split_seed") {
    spec.split_seed = ToSeed(key, value);
  } else if (key == "eval_seed") {
    spec.eval_seed = ToSeed(key, value);
  } else if (key == "noise_seed") {
    spec.noise_seed = ToSeed(key, value);
  } else if (key == "negatives") {
    spec.num_negatives = ToCount(key, value);
  } else if (key == "threads") {
    spec.num_threads = ToCount(key, value);
  } else if (key == "cutoffs") {
    spec.cutoffs = ParseIntList(value);
  } else if (key == "variants") {
    spec.variants.clear();
    std::stringstream in(value);
    std::string name;
    while (std::getline(in, name, ',')) {
      if (!name.empty()) spec.variants.push_back(ParseVariant(name));
    }
  } else if (key == "noise_ratios") {
    spec.noise_ratios = ParseDoubleList(value);
  } else if (key == "lambda2_grid") {
    spec.lambda2_grid = ParseDoubleList(value);
  } else if (key == "batch_grid") {
    spec.batch_grid = ParseIntList(value);
  } else if (key == "layer_grid") {
    spec.layer_grid = ParseIntList(value);
  } else if (key == "degree_cuts") {
    spec.degree_intervals = ParseDegreeCuts(value);
  } else if (key == "relevance_sample") {
    if (value == "all") {
      spec.relevance_sample.reset();
    } else {
      const int n = ToCount(key, value);
      if (n < 0) throw Error("relevance_sample must be nonnegative");
      spec.relevance_sample = static_cast<std::size_t>(n);
    }
  } else {
    throw Error("unknown setting: " + key);
  }
}

void ApplyConfigFile(ExperimentSpec& spec, const std::filesystem::path& path) {
  for (const auto& [key, value] : ReadKeyValueFile(path)) {
    ApplySetting(spec, key, value);
  }
}

std::string FormatSpec(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "task=" << TaskName(spec.task) << '\n'
      << "dataset_dir=" << spec.dataset_dir.string() << '\n'
      << "out=" << spec.out_dir.string() << '\n';
  if (!spec.checkpoint_dir.empty()) {
    out << "checkpoint=" << spec.checkpoint_dir.string() << '\n';
  }
  out << FormatTrainConfig(spec.train) << "split_seed=" << spec.split_seed << '\n'
      << "eval_seed=" << spec.eval_seed << '\n'
      << "noise_seed=" << spec.noise_seed << '\n'
      << "negatives=" << spec.num_negatives << '\n'
      << "cutoffs=" << JoinList(spec.cutoffs) << '\n'
      << "threads=" << spec.num_threads << '\n';
  std::vector<std::string> names;
  for (Variant v : spec.variants) names.push_back(VariantName(v));
  out << "variants=" << JoinList(names) << '\n'
      << "noise_ratios=" << JoinList(spec.noise_ratios) << '\n'
      << "lambda2_grid=" << JoinList(spec.lambda2_grid) << '\n'
      << "batch_grid=" << JoinList(spec.batch_grid) << '\n'
      << "layer_grid=" << JoinList(spec.layer_grid) << '\n'
      << "degree_cuts=" << DegreeCutsText(spec.degree_intervals) << '\n'
      << "relevance_sample="
      << (spec.relevance_sample ? std::to_string(*spec.relevance_sample) : "all")
      << '\n';
  return out.str();
}

std::filesystem::path MakeRunDir(const ExperimentSpec& spec) {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y%m%dT%H%M%SZ") << '-' << spec.train.seed;
  const auto base = spec.out_dir / TaskName(spec.task) / stamp.str();
  auto dir = base;
  for (int suffix = 1; std::filesystem::exists(dir); ++suffix) {
    dir = base.string() + "." + std::to_string(suffix);
  }
  std::filesystem::create_directories(dir);
  return dir;
}

EvalReport EvaluateModel(const ModelState& model, const Dataset& dataset,
                         const ExperimentSpec& spec) {
  const auto strata = StratifyByDegree(dataset, spec.degree_intervals);
  return EvaluateStratified(model, dataset, strata, TestOptions(spec));
}

TrainOutcome TrainAndEvaluate(const Dataset& dataset, const TrainConfig& config,
                              const ExperimentSpec& spec,
                              const std::filesystem::path& run_dir) {
  TrainOutcome outcome;
  outcome.config = config;
  FitOptions fit_options;
  fit_options.num_threads = spec.num_threads;
  fit_options.validation = TestOptions(spec);
  fit_options.log = spec.log;
  if (!run_dir.empty()) {
    std::filesystem::create_directories(run_dir);
    ExperimentSpec resolved = spec;
    resolved.train = config;
    OpenForWrite(run_dir / "config.txt") << FormatSpec(resolved);
    fit_options.checkpoint_dir = run_dir / "checkpoint";
  }
  try {
    outcome.fit = Fit(dataset, config, fit_options);
  } catch (const DivergenceError&) {
    if (!run_dir.empty()) {
      OpenForWrite(run_dir / "DIVERGED") << "training diverged; checkpoint/ holds "
                                            "the last good parameters\n";
    }
    throw;
  }
  outcome.test = EvaluateModel(outcome.fit.model, dataset, spec);
  auto& meta = outcome.test.metadata;
  meta["variant"] = VariantName(config.variant);
  meta["seed"] = std::to_string(config.seed);
  meta["noise_ratio"] = FormatDouble(dataset.noise_ratio);
  meta["best_epoch"] = std::to_string(outcome.fit.best_epoch);
  meta["epochs_run"] = std::to_string(outcome.fit.epochs.size() - 1);
  if (!run_dir.empty()) {
    auto epochs = OpenForWrite(run_dir / "epochs.tsv");
    WriteEpochTable(epochs, outcome.fit.epochs);
    WriteReportFiles(run_dir, outcome.test);
  }
  return outcome;
}

std::vector<AblationRow> RunAblation(const Dataset& dataset,
                                     const ExperimentSpec& spec,
                                     const std::filesystem::path& run_dir) {
  std::vector<AblationRow> rows;
  for (Variant variant : spec.variants) {
    AblationRow row;
    row.variant = variant;
    TrainConfig config = spec.train;
    config.variant = variant;
    try {
      const auto cell_dir =
          run_dir.empty() ? run_dir : run_dir / VariantName(variant);
      row.report = TrainAndEvaluate(dataset, config, spec, cell_dir).test;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      if (spec.log != nullptr) {
        *spec.log << "variant " << VariantName(variant) << " failed: " << e.what()
                  << std::endl;
      }
    }
    rows.push_back(std::move(row));
  }
  if (!run_dir.empty()) {
    auto out = OpenForWrite(run_dir / "ablation.txt");
    WriteAblationTable(out, rows, spec.cutoffs);
  }
  return rows;
}

void WriteAblationTable(std::ostream& out, const std::vector<AblationRow>& rows,
                        const std::vector<int>& cutoffs) {
  out << std::left << std::setw(10) << "variant" << std::right;
  for (int n : cutoffs) {
    out << std::setw(10) << MetricLabel("HR", n) << std::setw(10)
        << MetricLabel("NDCG", n);
  }
  out << '\n' << std::fixed << std::setprecision(4);
  for (const auto& row : rows) {
    out << std::left << std::setw(10) << VariantName(row.variant) << std::right;
    if (!row.ok) {
      out << "  failed: " << row.error << '\n';
      continue;
    }
    for (int n : cutoffs) {
      out << std::setw(10) << row.report.HitRatio(n) << std::setw(10)
          << row.report.Ndcg(n);
    }
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

std::vector<RobustnessRow> RunRobustness(const Dataset& dataset,
                                         const ExperimentSpec& spec,
                                         const std::filesystem::path& run_dir) {
  std::vector<double> ratios{0.0};
  for (double r : spec.noise_ratios) {
    if (r != 0.0) ratios.push_back(r);
  }
  std::vector<RobustnessRow> rows;
  for (double ratio : ratios) {
    const Dataset noisy = InjectNoise(dataset, ratio, spec.noise_seed);
    const auto cell_dir =
        run_dir.empty() ? run_dir : run_dir / ("ratio-" + FormatDouble(ratio));
    RobustnessRow row;
    row.ratio = ratio;
    row.noise_edges = noisy.noise_edges;
    row.report = TrainAndEvaluate(noisy, spec.train, spec, cell_dir).test;
    for (int n : spec.cutoffs) {
      auto degradation = [](double base, double value) {
        return base > 0.0 ? (base - value) / base : 0.0;
      };
      const auto& base = rows.empty() ? row.report : rows.front().report;
      row.hr_degradation[n] = degradation(base.HitRatio(n), row.report.HitRatio(n));
      row.ndcg_degradation[n] = degradation(base.Ndcg(n), row.report.Ndcg(n));
    }
    rows.push_back(std::move(row));
  }
  if (!run_dir.empty()) {
    auto out = OpenForWrite(run_dir / "robustness.txt");
    WriteRobustnessTable(out, rows, spec.cutoffs);
  }
  return rows;
}

void WriteRobustnessTable(std::ostream& out, const std::vector<RobustnessRow>& rows,
                          const std::vector<int>& cutoffs) {
  out << "# ratio noise_edges metric value degradation\n" << std::setprecision(10);
  for (const auto& row : rows) {
    for (int n : cutoffs) {
      out << FormatDouble(row.ratio) << ' ' << row.noise_edges << ' '
          << MetricLabel("hr", n) << ' ' << row.report.HitRatio(n) << ' '
          << row.hr_degradation.at(n) << '\n';
      out << FormatDouble(row.ratio) << ' ' << row.noise_edges << ' '
          << MetricLabel("ndcg", n) << ' ' << row.report.Ndcg(n) << ' '
          << row.ndcg_degradation.at(n) << '\n';
    }
  }
  out << "# ratio stratum users metric value\n";
  for (const auto& row : rows) {
    for (const auto& s : row.report.strata) {
      for (int n : cutoffs) {
        out << FormatDouble(row.ratio) << ' ' << s.label << ' ' << s.users << ' '
            << MetricLabel("hr", n) << ' ' << s.hr.at(n) << '\n';
        out << FormatDouble(row.ratio) << ' ' << s.label << ' ' << s.users << ' '
            << MetricLabel("ndcg", n) << ' ' << s.ndcg.at(n) << '\n';
      }
    }
  }
}

std::vector<SweepCell> RunSweep(const Dataset& dataset, const ExperimentSpec& spec,
                                const std::filesystem::path& run_dir) {
  struct Axis {
    std::string name;
    std::vector<std::string> values;
  };
  std::vector<Axis> axes;
  if (!spec.lambda2_grid.empty()) {
    Axis a{"lambda2", {}};
    for (double v : spec.lambda2_grid) a.values.push_back(FormatDouble(v));
    axes.push_back(a);
  }
  if (!spec.batch_grid.empty()) {
    Axis a{"batch_size", {}};
    for (int v : spec.batch_grid) a.values.push_back(std::to_string(v));
    axes.push_back(a);
  }
  if (!spec.layer_grid.empty()) {
    Axis a{"layers", {}};
    for (int v : spec.layer_grid) a.values.push_back(std::to_string(v));
    axes.push_back(a);
  }
  if (axes.empty()) throw Error("sweep needs at least one non-empty grid");

  std::vector<SweepCell> cells;
  std::vector<std::size_t> position(axes.size(), 0);
  while (true) {
    SweepCell cell;
    ExperimentSpec cell_spec = spec;
    std::string cell_name;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& value = axes[a].values[position[a]];
      cell.axes.emplace_back(axes[a].name, value);
      ApplySetting(cell_spec, axes[a].name, value);
      cell_name += (a > 0 ? "_" : "") + axes[a].name + "-" + value;
    }
    const auto cell_dir = run_dir.empty() ? run_dir : run_dir / cell_name;
    cell.report = TrainAndEvaluate(dataset, cell_spec.train, cell_spec, cell_dir).test;
    cells.push_back(std::move(cell));

    bool exhausted = true;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++position[a] < axes[a].values.size()) {
        exhausted = false;
        break;
      }
      position[a] = 0;
    }
    if (exhausted) break;
  }
  if (!run_dir.empty()) {
    auto out = OpenForWrite(run_dir / "sweep.txt");
    WriteSweepRows(out, cells);
  }
  return cells;
}

void WriteSweepRows(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << std::setprecision(10);
  for (const auto& cell : cells) {
    std::string prefix;
    for (const auto& [axis, value] : cell.axes) prefix += axis + ' ' + value + ' ';
    for (int n : cell.report.cutoffs) {
      out << prefix << MetricLabel("hr", n) << ' ' << cell.report.HitRatio(n) << '\n';
    }
    for (int n : cell.report.cutoffs) {
      out << prefix << MetricLabel("ndcg", n) << ' ' << cell.report.Ndcg(n) << '\n';
    }
  }
}

CaseStudyResult RunCaseStudy(const Dataset& dataset, const ExperimentSpec& spec,
                             const std::filesystem::path& run_dir) {
  CaseStudyResult result;
  ModelState model;
  if (!spec.checkpoint_dir.empty()) {
    auto ckpt = LoadCheckpoint(spec.checkpoint_dir);
    if (ckpt.state.num_users() != dataset.num_users ||
        ckpt.state.num_items() != dataset.num_items) {
      throw Error("checkpoint shape does not match the dataset");
    }
    model = std::move(ckpt.state);
    Encode(model, BuildInteractionLaplacian(dataset), BuildSocialLaplacian(dataset),
           spec.num_threads);
    result.test = EvaluateModel(model, dataset, spec);
    if (!run_dir.empty()) WriteReportFiles(run_dir, result.test);
  } else {
    auto outcome = TrainAndEvaluate(dataset, spec.train, spec, run_dir);
    model = std::move(outcome.fit.model);
    result.test = std::move(outcome.test);
  }
  result.rows = ExportRelevanceWeights(model, dataset, spec.relevance_sample,
                                       spec.train.seed);
  if (!run_dir.empty()) {
    auto out = OpenForWrite(run_dir / "relevance.txt");
    WriteRelevanceTable(out, result.rows, dataset);
  }
  return result;
}

}  // namespace dslrec
