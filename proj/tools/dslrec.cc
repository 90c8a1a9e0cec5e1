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

// dslrec: train, evaluate and study dual-view social recommenders.
//
//   dslrec train --dataset-dir data/ciao --out runs
//   dslrec robust --dataset-dir data/ciao --set noise_ratios=0.1,0.2
//   dslrec check

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dslrec/checkpoint.h"
#include "dslrec/checks.h"
#include "dslrec/config.h"
#include "dslrec/data.h"
#include "dslrec/experiment.h"
#include "dslrec/graph.h"
#include "dslrec/synthetic.h"

namespace {

using dslrec::ExperimentSpec;
using dslrec::Task;

struct CommonFlags {
  std::string dataset_dir;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> variant;
  std::optional<int> threads;
  std::optional<int> negatives;
  std::optional<int> epochs;
  std::optional<std::string> checkpoint;
  std::vector<std::string> settings;
  bool quiet = false;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--dataset-dir", f.dataset_dir,
                  "Directory with interactions.txt/social.txt or a saved dataset");
  cmd->add_option("--config", f.config, "key=value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Model initialization and sampling seed");
  cmd->add_option("--out", f.out, "Output root (default: runs)");
  cmd->add_option("--variant", f.variant, "full | dsl_d | dsl_s | dsl_c");
  cmd->add_option("--threads", f.threads, "Worker threads");
  cmd->add_option("--negatives", f.negatives, "Sampled negatives per held-out item");
  cmd->add_option("--epochs", f.epochs, "Maximum training epochs");
  cmd->add_option("--checkpoint", f.checkpoint, "Checkpoint directory to load");
  cmd->add_option("--set", f.settings, "Extra key=value setting (repeatable)");
  cmd->add_flag("-q,--quiet", f.quiet, "No per-epoch progress");
}

// Config file first, then flags, so flags win.
ExperimentSpec ResolveSpec(Task task, const CommonFlags& f) {
  ExperimentSpec spec;
  spec.task = task;
  if (!f.config.empty()) dslrec::ApplyConfigFile(spec, f.config);
  if (!f.dataset_dir.empty()) spec.dataset_dir = f.dataset_dir;
  if (f.seed) spec.train.seed = *f.seed;
  if (f.out) spec.out_dir = *f.out;
  if (f.variant) spec.train.variant = dslrec::ParseVariant(*f.variant);
  if (f.threads) spec.num_threads = *f.threads;
  if (f.negatives) spec.num_negatives = *f.negatives;
  if (f.epochs) spec.train.epochs = *f.epochs;
  if (f.checkpoint) spec.checkpoint_dir = *f.checkpoint;
  for (const auto& kv : dslrec::ParseKeyValues([&] {
         std::string text;
         for (const auto& s : f.settings) text += s + '\n';
         return text;
       }())) {
    dslrec::ApplySetting(spec, kv.first, kv.second);
  }
  if (!f.quiet) spec.log = &std::cerr;
  spec.Validate();
  return spec;
}

void PrintDatasetSummary(const dslrec::Dataset& ds) {
  std::cerr << "dataset: " << ds.num_users << " users, " << ds.num_items
            << " items, " << ds.num_interactions() << " interactions ("
            << ds.train.size() << " train, " << ds.val.size() << " val, "
            << ds.test.size() << " test), " << ds.num_ties() << " ties\n";
}

void WarnSkipped(const dslrec::EvalReport& report, int negatives,
                 const std::string& label = "") {
  if (report.users_skipped == 0) return;
  std::cerr << "warning: " << (label.empty() ? "" : label + ": ") << report.users_skipped
            << " users skipped (fewer than " << negatives << " unobserved items)\n";
}

int RunTask(Task task, const CommonFlags& flags) {
  const ExperimentSpec spec = ResolveSpec(task, flags);
  const dslrec::Dataset dataset =
      dslrec::OpenDatasetDir(spec.dataset_dir, spec.split_seed);
  PrintDatasetSummary(dataset);
  const auto run_dir = dslrec::MakeRunDir(spec);
  std::cerr << "writing to " << run_dir.string() << '\n';

  switch (task) {
    case Task::kTrain: {
      const auto outcome = dslrec::TrainAndEvaluate(dataset, spec.train, spec, run_dir);
      WarnSkipped(outcome.test, spec.num_negatives);
      dslrec::WriteReportTable(std::cout, outcome.test);
      break;
    }
    case Task::kEval: {
      auto ckpt = dslrec::LoadCheckpoint(spec.checkpoint_dir);
      if (ckpt.state.num_users() != dataset.num_users ||
          ckpt.state.num_items() != dataset.num_items) {
        throw dslrec::Error("checkpoint shape does not match the dataset");
      }
      dslrec::Encode(ckpt.state, dslrec::BuildInteractionLaplacian(dataset),
                     dslrec::BuildSocialLaplacian(dataset), spec.num_threads);
      auto report = dslrec::EvaluateModel(ckpt.state, dataset, spec);
      report.metadata["variant"] = dslrec::VariantName(ckpt.config.variant);
      report.metadata["checkpoint"] = spec.checkpoint_dir.string();
      std::ofstream(run_dir / "config.txt") << dslrec::FormatSpec(spec);
      std::ofstream table(run_dir / "report.txt");
      dslrec::WriteReportTable(table, report);
      std::ofstream rows(run_dir / "metrics.txt");
      dslrec::WriteMetricRows(rows, report);
      WarnSkipped(report, spec.num_negatives);
      dslrec::WriteReportTable(std::cout, report);
      break;
    }
    case Task::kAblation: {
      std::ofstream(run_dir / "config.txt") << dslrec::FormatSpec(spec);
      const auto rows = dslrec::RunAblation(dataset, spec, run_dir);
      for (const auto& r : rows) {
        if (r.ok) WarnSkipped(r.report, spec.num_negatives, dslrec::VariantName(r.variant));
      }
      dslrec::WriteAblationTable(std::cout, rows, spec.cutoffs);
      for (const auto& r : rows) {
        if (!r.ok) return 1;
      }
      break;
    }
    case Task::kRobustness: {
      std::ofstream(run_dir / "config.txt") << dslrec::FormatSpec(spec);
      const auto rows = dslrec::RunRobustness(dataset, spec, run_dir);
      for (const auto& r : rows) {
        WarnSkipped(r.report, spec.num_negatives, "ratio " + dslrec::FormatDouble(r.ratio));
      }
      dslrec::WriteRobustnessTable(std::cout, rows, spec.cutoffs);
      break;
    }
    case Task::kSweep: {
      std::ofstream(run_dir / "config.txt") << dslrec::FormatSpec(spec);
      const auto cells = dslrec::RunSweep(dataset, spec, run_dir);
      if (!cells.empty()) WarnSkipped(cells.front().report, spec.num_negatives);
      dslrec::WriteSweepRows(std::cout, cells);
      break;
    }
    case Task::kCaseStudy: {
      const auto result = dslrec::RunCaseStudy(dataset, spec, run_dir);
      WarnSkipped(result.test, spec.num_negatives);
      dslrec::WriteReportTable(std::cout, result.test);
      std::cout << result.rows.size() << " relevance rows in "
                << (run_dir / "relevance.txt").string() << '\n';
      break;
    }
  }
  return 0;
}

int RunChecks() {
  using namespace dslrec::oracle;
  const CheckResult results[] = {CheckGradients(), CheckForwardEquivalence(),
                                 CheckRankingMetrics()};
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

int RunStats(const std::string& dir, std::uint64_t split_seed) {
  const auto ds = dslrec::OpenDatasetDir(dir, split_seed);
  std::cout << "users " << ds.num_users << '\n'
            << "items " << ds.num_items << '\n'
            << "interactions " << ds.num_interactions() << '\n'
            << "social_ties " << ds.num_ties() << '\n'
            << "density " << std::setprecision(6) << ds.Density() * 100.0 << "%\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dslrec: dual-view social recommendation with denoised alignment"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    Task task;
  };
  const Sub tasks[] = {
      {"train", "Train with early stopping, then evaluate on test", Task::kTrain},
      {"eval", "Evaluate a saved checkpoint on test", Task::kEval},
      {"ablate", "Train every variant with shared seeds and splits", Task::kAblation},
      {"robust", "Retrain on noise-injected graphs", Task::kRobustness},
      {"sweep", "Grid over lambda2 / batch size / layers", Task::kSweep},
      {"case-study", "Export learned relevance weights of social ties",
       Task::kCaseStudy},
  };
  std::vector<CommonFlags> flags(std::size(tasks));
  std::vector<CLI::App*> commands;
  for (std::size_t k = 0; k < std::size(tasks); ++k) {
    commands.push_back(app.add_subcommand(tasks[k].name, tasks[k].help));
    AddCommonFlags(commands.back(), flags[k]);
  }

  auto* check = app.add_subcommand("check", "Run the randomized oracle self-checks");

  std::string stats_dir;
  std::uint64_t stats_split_seed = 7;
  auto* stats = app.add_subcommand("stats", "Print dataset statistics");
  stats->add_option("--dataset-dir", stats_dir)->required();
  stats->add_option("--split-seed", stats_split_seed);

  dslrec::PlantedClusterOptions synth_options;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a planted-cluster dataset");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--users", synth_options.num_users);
  synth->add_option("--items", synth_options.num_items);
  synth->add_option("--clusters", synth_options.num_clusters);
  synth->add_option("--min-interactions", synth_options.min_interactions);
  synth->add_option("--max-interactions", synth_options.max_interactions);
  synth->add_option("--off-cluster-rate", synth_options.off_cluster_rate);
  synth->add_option("--popularity-skew", synth_options.popularity_skew);
  synth->add_option("--ties", synth_options.num_ties);
  synth->add_option("--cross-fraction", synth_options.cross_tie_fraction);
  synth->add_option("--seed", synth_options.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t k = 0; k < commands.size(); ++k) {
      if (commands[k]->parsed()) return RunTask(tasks[k].task, flags[k]);
    }
    if (check->parsed()) return RunChecks();
    if (stats->parsed()) return RunStats(stats_dir, stats_split_seed);
    if (synth->parsed()) {
      const auto data = dslrec::GeneratePlantedClusters(synth_options);
      std::filesystem::create_directories(synth_out);
      std::ofstream inter(std::filesystem::path(synth_out) / "interactions.txt");
      for (const auto& [u, i] : data.interactions.edges) inter << u << ' ' << i << '\n';
      std::ofstream social(std::filesystem::path(synth_out) / "social.txt");
      for (const auto& [a, b] : data.social.edges) {
        if (a < b) social << a << ' ' << b << '\n';
      }
      std::ofstream clusters(std::filesystem::path(synth_out) / "clusters.txt");
      for (std::size_t u = 0; u < data.user_cluster.size(); ++u) {
        clusters << 'u' << u << ' ' << data.user_cluster[u] << '\n';
      }
      std::cerr << data.interactions.edges.size() << " interactions, "
                << data.social.num_ties() << " ties (" << data.cross_ties
                << " cross-cluster)\n";
      return 0;
    }
  } catch (const dslrec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
