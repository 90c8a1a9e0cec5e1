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

// Experiment tasks on top of Fit: train, ablation, noise robustness, grid
// sweeps and relevance-weight export. Every runner accepts an in-memory
// dataset; when `run_dir` is non-empty it also writes its artifacts there.

#ifndef DSLREC_EXPERIMENT_H_
#define DSLREC_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dslrec/data.h"
#include "dslrec/eval.h"
#include "dslrec/objective.h"
#include "dslrec/trainer.h"

namespace dslrec {

enum class Task { kTrain, kEval, kAblation, kRobustness, kSweep, kCaseStudy };

std::string TaskName(Task task);

struct ExperimentSpec {
  Task task = Task::kTrain;
  std::filesystem::path dataset_dir;
  std::filesystem::path out_dir = "runs";
  // Existing checkpoint for `eval` and optionally `case-study`.
  std::filesystem::path checkpoint_dir;
  TrainConfig train;
  std::uint64_t split_seed = 7;
  std::uint64_t eval_seed = 11;
  std::uint64_t noise_seed = 13;
  int num_negatives = 99;
  std::vector<int> cutoffs = {5, 10, 20};
  int num_threads = 1;
  std::vector<Variant> variants = AllVariants();
  std::vector<double> noise_ratios = {0.0, 0.1, 0.2, 0.3};
  std::vector<double> lambda2_grid;
  std::vector<int> batch_grid;
  std::vector<int> layer_grid;
  std::vector<DegreeInterval> degree_intervals = DefaultDegreeIntervals();
  std::optional<std::size_t> relevance_sample;
  std::ostream* log = nullptr;

  // Cross-field checks, e.g. a sweep needs at least one non-empty grid.
  void Validate() const;
};

// Applies one `key=value` setting (training keys included). Throws on an
// unknown key or a malformed value.
void ApplySetting(ExperimentSpec& spec, const std::string& key,
                  const std::string& value);
void ApplyConfigFile(ExperimentSpec& spec, const std::filesystem::path& path);

// Resolved settings, one `key=value` per line.
std::string FormatSpec(const ExperimentSpec& spec);

// <out>/<task>/<UTC timestamp>-<seed>, suffixed when it already exists.
std::filesystem::path MakeRunDir(const ExperimentSpec& spec);

struct TrainOutcome {
  TrainConfig config;
  FitResult fit;
  EvalReport test;  // overall plus degree strata
};

TrainOutcome TrainAndEvaluate(const Dataset& dataset, const TrainConfig& config,
                              const ExperimentSpec& spec,
                              const std::filesystem::path& run_dir);

// Test-split report for an encoded model.
EvalReport EvaluateModel(const ModelState& model, const Dataset& dataset,
                         const ExperimentSpec& spec);

struct AblationRow {
  Variant variant = Variant::kFull;
  bool ok = false;
  std::string error;
  EvalReport report;
};

std::vector<AblationRow> RunAblation(const Dataset& dataset,
                                     const ExperimentSpec& spec,
                                     const std::filesystem::path& run_dir);
void WriteAblationTable(std::ostream& out, const std::vector<AblationRow>& rows,
                        const std::vector<int>& cutoffs);

struct RobustnessRow {
  double ratio = 0.0;
  std::size_t noise_edges = 0;
  EvalReport report;
  // (baseline - value) / baseline per cutoff, baseline being ratio 0.
  std::map<int, double> hr_degradation;
  std::map<int, double> ndcg_degradation;
};

// Ratio 0 is always run first and serves as the baseline.
std::vector<RobustnessRow> RunRobustness(const Dataset& dataset,
                                         const ExperimentSpec& spec,
                                         const std::filesystem::path& run_dir);
void WriteRobustnessTable(std::ostream& out, const std::vector<RobustnessRow>& rows,
                          const std::vector<int>& cutoffs);

struct SweepCell {
  std::vector<std::pair<std::string, std::string>> axes;  // (axis, value)
  EvalReport report;
};

// Cartesian product over the non-empty grids.
std::vector<SweepCell> RunSweep(const Dataset& dataset, const ExperimentSpec& spec,
                                const std::filesystem::path& run_dir);
// `axis value [axis value...] metric value` rows.
void WriteSweepRows(std::ostream& out, const std::vector<SweepCell>& cells);

struct CaseStudyResult {
  std::vector<RelevanceRow> rows;
  EvalReport test;
};

// Trains (or loads `spec.checkpoint_dir`) and exports relevance weights.
CaseStudyResult RunCaseStudy(const Dataset& dataset, const ExperimentSpec& spec,
                             const std::filesystem::path& run_dir);

}  // namespace dslrec

#endif  // DSLREC_EXPERIMENT_H_
