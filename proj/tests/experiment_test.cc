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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dslrec/checkpoint.h"
#include "dslrec/config.h"
#include "dslrec/synthetic.h"
#include "gtest/gtest.h"

namespace dslrec {
namespace {

namespace fs = std::filesystem;

fs::path ScratchDir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dslrec_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const Dataset& Fixture() {
  static const Dataset ds = OpenDatasetDir(DSLREC_FIXTURE_DIR, 7);
  return ds;
}

ExperimentSpec SmallSpec() {
  ExperimentSpec spec;
  spec.dataset_dir = DSLREC_FIXTURE_DIR;
  spec.train.dim = 8;
  spec.train.batch_size = 256;
  spec.train.lr = 0.01;
  spec.train.epochs = 3;
  spec.train.lambda_ssl = 0.01;
  spec.num_negatives = 40;
  spec.cutoffs = {5, 10};
  return spec;
}

TEST(SpecTest, SettingsAndValidation) {
  ExperimentSpec spec;
  ApplySetting(spec, "negatives", "49");
  ApplySetting(spec, "variants", "full,dsl_c");
  ApplySetting(spec, "layer_grid", "1,2,3,4");
  ApplySetting(spec, "degree_cuts", "0,3");
  ApplySetting(spec, "relevance_sample", "25");
  ApplySetting(spec, "lambda2", "0.001");
  EXPECT_EQ(spec.num_negatives, 49);
  EXPECT_EQ(spec.variants, (std::vector<Variant>{Variant::kFull, Variant::kContrastive}));
  EXPECT_EQ(spec.layer_grid, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(spec.degree_intervals.size(), 2u);
  EXPECT_EQ(spec.relevance_sample, 25u);
  EXPECT_EQ(spec.train.lambda_ssl, 0.001);
  ApplySetting(spec, "relevance_sample", "all");
  EXPECT_FALSE(spec.relevance_sample.has_value());
  EXPECT_THROW(ApplySetting(spec, "colour", "blue"), Error);
  EXPECT_THROW(ApplySetting(spec, "negatives", "many"), Error);

  EXPECT_THROW(spec.Validate(), Error);  // no dataset
  spec.dataset_dir = DSLREC_FIXTURE_DIR;
  EXPECT_NO_THROW(spec.Validate());
  spec.dataset_dir = "/nonexistent/dslrec";
  EXPECT_THROW(spec.Validate(), Error);
  spec = ExperimentSpec{};
  spec.dataset_dir = DSLREC_FIXTURE_DIR;
  spec.task = Task::kSweep;
  EXPECT_THROW(spec.Validate(), Error);
  spec.batch_grid = {512};
  EXPECT_NO_THROW(spec.Validate());
  spec.task = Task::kEval;
  EXPECT_THROW(spec.Validate(), Error);
}

TEST(SpecTest, FormatRoundTrips) {
  ExperimentSpec spec = SmallSpec();
  spec.task = Task::kRobustness;
  spec.noise_ratios = {0.1, 0.25};
  spec.lambda2_grid = {1e-6, 1e-5};
  spec.train.lr = 0.1 + 0.2;
  spec.relevance_sample = 7;
  const std::string text = FormatSpec(spec);
  ExperimentSpec parsed;
  for (const auto& [key, value] : ParseKeyValues(text)) {
    if (key == "task") continue;
    ApplySetting(parsed, key, value);
  }
  parsed.task = spec.task;
  EXPECT_EQ(FormatSpec(parsed), text);
}

TEST(SpecTest, ConfigFileThenOverrides) {
  const auto dir = ScratchDir("config");
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "# tuned\nlr = 0.005\nbatch_size=1024\nseed=9\n";
  ExperimentSpec spec;
  ApplyConfigFile(spec, dir / "run.cfg");
  ApplySetting(spec, "seed", "10");
  EXPECT_EQ(spec.train.lr, 0.005);
  EXPECT_EQ(spec.train.batch_size, 1024);
  EXPECT_EQ(spec.train.seed, 10u);
}

TEST(RunDirTest, LayoutAndCollisionSuffix) {
  ExperimentSpec spec;
  spec.out_dir = ScratchDir("runs");
  spec.task = Task::kSweep;
  spec.train.seed = 42;
  const auto a = MakeRunDir(spec);
  const auto b = MakeRunDir(spec);
  EXPECT_TRUE(fs::is_directory(a));
  EXPECT_TRUE(fs::is_directory(b));
  EXPECT_NE(a, b);
  EXPECT_EQ(a.parent_path(), spec.out_dir / "sweep");
  const std::string name = a.filename().string();
  EXPECT_EQ(name.substr(name.size() - 3), "-42");
  EXPECT_EQ(name.size(), std::string("20260101T000000Z-42").size());
}

TEST(TrainTaskTest, ZeroEpochsWritesEveryArtifact) {
  ExperimentSpec spec = SmallSpec();
  spec.train.epochs = 0;
  const auto dir = ScratchDir("zero");
  const auto outcome = TrainAndEvaluate(Fixture(), spec.train, spec, dir);
  for (const char* f : {"config.txt", "epochs.tsv", "report.txt", "metrics.txt",
                        "checkpoint/shape", "checkpoint/E_u"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(outcome.test.metadata.at("epochs_run"), "0");
  EXPECT_EQ(outcome.test.metadata.at("variant"), "full");
  EXPECT_GT(outcome.test.users_evaluated, 0u);
  EXPECT_FALSE(outcome.test.strata.empty());
  EXPECT_NE(ReadAll(dir / "config.txt").find("epochs=0"), std::string::npos);
}

TEST(TrainTaskTest, RerunReproducesReports) {
  const ExperimentSpec spec = SmallSpec();
  const auto a = ScratchDir("rerun_a"), b = ScratchDir("rerun_b");
  TrainAndEvaluate(Fixture(), spec.train, spec, a);
  TrainAndEvaluate(Fixture(), spec.train, spec, b);
  EXPECT_EQ(ReadAll(a / "metrics.txt"), ReadAll(b / "metrics.txt"));
  EXPECT_EQ(ReadAll(a / "report.txt"), ReadAll(b / "report.txt"));
  EXPECT_EQ(ReadAll(a / "checkpoint/E_u"), ReadAll(b / "checkpoint/E_u"));
}

TEST(AblationTest, FourRowsAndIsolatedFailures) {
  ExperimentSpec spec = SmallSpec();
  spec.train.epochs = 1;
  const auto dir = ScratchDir("ablation");
  fs::create_directories(dir);
  // A regular file where dsl_c's run directory should go.
  std::ofstream(dir / "dsl_c") << "blocked\n";
  const auto rows = RunAblation(Fixture(), spec, dir);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    if (row.variant == Variant::kContrastive) {
      EXPECT_FALSE(row.ok);
      EXPECT_FALSE(row.error.empty());
    } else {
      EXPECT_TRUE(row.ok) << row.error;
      EXPECT_EQ(row.report.metadata.at("variant"), VariantName(row.variant));
    }
  }
  const std::string table = ReadAll(dir / "ablation.txt");
  EXPECT_NE(table.find("dsl_s"), std::string::npos);
  EXPECT_NE(table.find("failed"), std::string::npos);
}

TEST(AblationTest, VariantsShareSplitAndSeeds) {
  ExperimentSpec spec = SmallSpec();
  spec.train.epochs = 0;
  spec.variants = {Variant::kFull, Variant::kNoDenoise};
  const auto rows = RunAblation(Fixture(), spec, {});
  ASSERT_EQ(rows.size(), 2u);
  // With no training both variants hold the same initial parameters.
  EXPECT_EQ(rows[0].report.hr, rows[1].report.hr);
}

TEST(RobustnessTest, BaselineFirstAndBitIdenticalToPlainRun) {
  ExperimentSpec spec = SmallSpec();
  spec.noise_ratios = {0.1, 0.2, 0.3};
  const auto dir = ScratchDir("robust");
  const auto rows = RunRobustness(Fixture(), spec, dir);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].ratio, 0.0);
  EXPECT_EQ(rows[0].noise_edges, 0u);
  for (int n : spec.cutoffs) {
    EXPECT_EQ(rows[0].hr_degradation.at(n), 0.0);
    const double base = rows[0].report.HitRatio(n);
    for (const auto& row : rows) {
      if (base > 0) {
        EXPECT_DOUBLE_EQ(row.hr_degradation.at(n), (base - row.report.HitRatio(n)) / base);
      }
    }
  }
  EXPECT_EQ(rows[3].noise_edges,
            static_cast<std::size_t>(std::floor(0.3 * Fixture().train.size() + 1e-9)));
  const auto plain = ScratchDir("robust_plain");
  TrainAndEvaluate(Fixture(), spec.train, spec, plain);
  EXPECT_EQ(ReadAll(dir / "ratio-0" / "metrics.txt"), ReadAll(plain / "metrics.txt"));
  for (const char* t : {"E_u", "E_v", "T", "w", "c"}) {
    EXPECT_EQ(ReadAll(dir / "ratio-0" / "checkpoint" / t),
              ReadAll(plain / "checkpoint" / t));
  }
  EXPECT_NE(ReadAll(dir / "robustness.txt").find("0.3 "), std::string::npos);
}

TEST(SweepTest, LayerGridGivesOneCellPerValue) {
  ExperimentSpec spec = SmallSpec();
  spec.train.epochs = 1;
  spec.layer_grid = {1, 2, 3, 4};
  const auto dir = ScratchDir("sweep");
  const auto cells = RunSweep(Fixture(), spec, dir);
  ASSERT_EQ(cells.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(cells[k].axes, (std::vector<std::pair<std::string, std::string>>{
                                 {"layers", std::to_string(k + 1)}}));
  }
  std::ostringstream rows;
  WriteSweepRows(rows, cells);
  const std::string text = rows.str();
  // 4 cells x 2 cutoffs x 2 metrics.
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 16);
  EXPECT_EQ(ReadAll(dir / "sweep.txt"), text);
  EXPECT_TRUE(fs::exists(dir / "layers-3" / "metrics.txt"));
}

TEST(SweepTest, CartesianProductOrder) {
  ExperimentSpec spec = SmallSpec();
  spec.train.epochs = 0;
  spec.lambda2_grid = {1e-6, 1e-3};
  spec.batch_grid = {128, 256, 512};
  const auto cells = RunSweep(Fixture(), spec, {});
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].axes[0].second, "1e-06");
  EXPECT_EQ(cells[0].axes[1].second, "128");
  EXPECT_EQ(cells[1].axes[1].second, "256");
  EXPECT_EQ(cells[3].axes[0].second, "0.001");
}

TEST(SweepTest, SinglePointEqualsTrainRun) {
  ExperimentSpec spec = SmallSpec();
  spec.batch_grid = {128};
  const auto cells = RunSweep(Fixture(), spec, {});
  ASSERT_EQ(cells.size(), 1u);
  TrainConfig cfg = spec.train;
  cfg.batch_size = 128;
  const auto outcome = TrainAndEvaluate(Fixture(), cfg, spec, {});
  EXPECT_EQ(cells[0].report.hr, outcome.test.hr);
  EXPECT_EQ(cells[0].report.ndcg, outcome.test.ndcg);
}

TEST(CaseStudyTest, TrainsOrLoadsAndExports) {
  ExperimentSpec spec = SmallSpec();
  spec.relevance_sample = 30;
  const auto dir = ScratchDir("case");
  const auto trained = RunCaseStudy(Fixture(), spec, dir);
  ASSERT_EQ(trained.rows.size(), 30u);
  for (std::size_t k = 1; k < trained.rows.size(); ++k) {
    EXPECT_LE(trained.rows[k - 1].z, trained.rows[k].z);
  }
  const std::string table = ReadAll(dir / "relevance.txt");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 31);

  spec.checkpoint_dir = dir / "checkpoint";
  spec.relevance_sample.reset();
  const auto loaded = RunCaseStudy(Fixture(), spec, {});
  EXPECT_EQ(loaded.rows.size(), Fixture().num_ties());
  EXPECT_EQ(loaded.test.hr, trained.test.hr);
}

TEST(PlantedClusterTest, GeneratorHonorsOptions) {
  PlantedClusterOptions options;
  options.num_users = 100;
  options.num_items = 80;
  options.num_ties = 150;
  options.cross_tie_fraction = 0.4;
  const auto data = GeneratePlantedClusters(options);
  EXPECT_EQ(data.social.num_ties(), 150u);
  EXPECT_EQ(data.cross_ties, 60u);
  std::map<std::string, int> per_user;
  for (const auto& [u, i] : data.interactions.edges) {
    ++per_user[u];
    const int uk = std::stoi(u.substr(1)), ik = std::stoi(i.substr(1));
    EXPECT_EQ(data.user_cluster[uk], data.item_cluster[ik]);
  }
  for (const auto& [u, n] : per_user) {
    EXPECT_GE(n, options.min_interactions);
    EXPECT_LE(n, options.max_interactions);
  }
  std::size_t cross = 0;
  for (const auto& [a, b] : data.social.edges) {
    if (data.user_cluster[std::stoi(a.substr(1))] != data.user_cluster[std::stoi(b.substr(1))]) {
      ++cross;
    }
  }
  EXPECT_EQ(cross, 2 * data.cross_ties);
}

TEST(PlantedClusterTest, FiftyEpochsRecoverThePlantedSignal) {
  // Ten taste clusters of 20 items: the held-out item competes with only a
  // handful of same-cluster negatives.
  PlantedClusterOptions options;
  options.num_clusters = 10;
  options.seed = 3;
  const auto data = GeneratePlantedClusters(options);
  const Dataset ds = BuildDataset(data.interactions, data.social, 3);
  ExperimentSpec spec;
  spec.train.dim = 32;
  spec.train.batch_size = 256;
  spec.train.epochs = 50;
  spec.train.patience = 50;
  spec.train.lr = 0.01;
  spec.cutoffs = {10};
  const auto outcome = TrainAndEvaluate(ds, spec.train, spec, {});
  EXPECT_GT(outcome.test.HitRatio(10), 0.9);
}

}  // namespace
}  // namespace dslrec
