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

// Microbenchmarks for the hot paths: propagation, the two alignment losses
// and a full training step.
//
//   ./dslrec_bench --benchmark_filter=Alignment

#include <random>

#include "benchmark/benchmark.h"
#include "dslrec/checks.h"
#include "dslrec/graph.h"
#include "dslrec/model.h"
#include "dslrec/objective.h"

namespace dslrec {
namespace {

Dataset RandomGraph(int users, int items, double edge_p, double tie_p) {
  std::mt19937_64 rng(17);
  return oracle::RandomDataset(rng, users, items, edge_p, tie_p);
}

void BM_Propagate(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  const auto ds = RandomGraph(nodes / 2, nodes / 2, 20.0 / nodes, 0.0);
  const auto graph = BuildInteractionLaplacian(ds);
  Matrix in(graph.size(), 64, 0.5), out;
  for (auto _ : state) {
    PropagateInto(graph, in, &out);
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * graph.laplacian.nnz());
}
BENCHMARK(BM_Propagate)->Arg(2000)->Arg(8000);

struct AlignmentFixture {
  explicit AlignmentFixture(int batch) {
    model = InitModel(kUsers, 1, 64, 3);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    model.interaction_agg = Matrix(kUsers + 1, 64);
    model.social_agg = Matrix(kUsers, 64);
    for (double& v : model.interaction_agg.values()) v = normal(rng);
    for (double& v : model.social_agg.values()) v = 0.05 * normal(rng);
    std::uniform_int_distribution<int> user(0, kUsers - 1);
    for (int k = 0; k < batch; ++k) pairs.push_back({user(rng), user(rng)});
    ResetHeadGradients(model, &grads);
  }
  static constexpr int kUsers = 8192;
  ModelState model;
  std::vector<UserPair> pairs;
  HeadGradients grads;
};

void BM_HingeAlignment(benchmark::State& state) {
  AlignmentFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(HingeAlignment(f.pairs, f.model, 1.0, &f.grads));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HingeAlignment)->RangeMultiplier(2)->Range(512, 4096)->Complexity();

void BM_InfoNceAlignment(benchmark::State& state) {
  AlignmentFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(InfoNceAlignment(f.pairs, f.model, 1.0, 0.1, &f.grads));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_InfoNceAlignment)->RangeMultiplier(2)->Range(512, 4096)->Complexity();

void BM_TrainingStep(benchmark::State& state) {
  const auto ds = RandomGraph(2000, 2000, 0.005, 0.005);
  const auto gr = BuildInteractionLaplacian(ds);
  const auto gs = BuildSocialLaplacian(ds);
  TrainConfig cfg;
  cfg.dim = 64;
  cfg.batch_size = 2048;
  cfg.lambda_ssl = 1e-3;
  ModelState model = InitModel(ds.num_users, ds.num_items, cfg.dim, 1, cfg.ToModelOptions());
  Encode(model, gr, gs);
  AdamState adam = MakeAdamState(model);
  const SamplingIndex index(ds);
  std::mt19937_64 rng(2);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const Batch batch = SampleBatch(index, cfg.batch_size, rng);
    const GradientSet g = ComputeGradients(batch, model, cfg, gr, gs, threads);
    AdamStep(model, g, adam, cfg.lr);
    Encode(model, gr, gs, threads);
  }
}
BENCHMARK(BM_TrainingStep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dslrec

BENCHMARK_MAIN();
