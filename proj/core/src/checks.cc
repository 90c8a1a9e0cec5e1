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

#include "dslrec/checks.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dslrec/eval.h"
#include "dslrec/graph.h"
#include "dslrec/model.h"
#include "dslrec/objective.h"
#include "dslrec/oracle.h"

namespace dslrec::oracle {
namespace {

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Drops alignment pairs sitting on (or numerically near) a non-smooth point
// of the objective.
std::vector<UserPair> SmoothPairs(const Dataset& dataset, const ModelState& state,
                                  const std::vector<UserPair>& pairs,
                                  const GradientCheckOptions& options) {
  const auto f = DenseForwardPass(dataset, state.user_embeddings,
                                  state.item_embeddings, state.options.layers,
                                  state.options.aggregation);
  std::vector<UserPair> kept;
  for (const auto& p : pairs) {
    const auto terms =
        EvaluateSimilarity(state.projection, f.interaction_agg.row(p.first),
                           f.interaction_agg.row(p.second), state.options.leaky_slope);
    const double zhat = Dot(f.social_agg.row(p.first), f.social_agg.row(p.second));
    const double margin = terms.z * zhat - 1.0;
    if (std::abs(margin) < options.hinge_margin) continue;
    if (margin < 0.0) {
      const bool near_kink =
          std::any_of(terms.pre_activation.begin(), terms.pre_activation.end(),
                      [&](double h) { return std::abs(h) < options.activation_margin; });
      if (near_kink) continue;
    }
    kept.push_back(p);
  }
  return kept;
}

}  // namespace

Dataset RandomDataset(std::mt19937_64& rng, int num_users, int num_items,
                      double edge_probability, double tie_probability) {
  Dataset ds;
  ds.num_users = num_users;
  ds.num_items = num_items;
  for (int u = 0; u < num_users; ++u) {
    ds.user_ids.push_back("u" + std::to_string(u));
    ds.user_index[ds.user_ids.back()] = u;
  }
  for (int i = 0; i < num_items; ++i) {
    ds.item_ids.push_back("i" + std::to_string(i));
    ds.item_index[ds.item_ids.back()] = i;
  }
  std::bernoulli_distribution edge(edge_probability), tie(tie_probability);
  for (int u = 0; u < num_users; ++u) {
    int count = 0;
    for (int i = 0; i < num_items; ++i) {
      if (count + 1 < num_items && edge(rng)) {
        ds.train.push_back({u, i});
        ++count;
      }
    }
  }
  std::vector<int> friends(num_users, 0);
  for (int a = 0; a < num_users; ++a) {
    for (int b = a + 1; b < num_users; ++b) {
      if (friends[a] + 2 >= num_users || friends[b] + 2 >= num_users) continue;
      if (!tie(rng)) continue;
      ds.social.push_back({a, b});
      ds.social.push_back({b, a});
      ++friends[a];
      ++friends[b];
    }
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.social.begin(), ds.social.end());
  ds.degree.assign(num_users, 0);
  for (const auto& e : ds.train) ++ds.degree[e.user];
  return ds;
}

CheckResult CheckGradients(const GradientCheckOptions& options) {
  CheckResult result;
  result.name = "gradient fidelity";
  std::mt19937_64 rng(options.seed);
  const auto variants = AllVariants();
  double worst = 0.0;
  double worst_loss_gap = 0.0;
  std::size_t coordinates = 0;
  std::size_t dropped_pairs = 0;
  std::ostringstream where;
  int built = 0;
  for (int attempt = 0; built < options.instances; ++attempt) {
    if (attempt > 50 * options.instances) {
      result.detail = "could not build enough instances";
      return result;
    }
    const int users = UniformInt(rng, 3, 8);
    const int items = UniformInt(rng, 3, 8);
    const Dataset ds = RandomDataset(rng, users, items, 0.4, 0.4);
    if (ds.train.empty()) continue;

    TrainConfig cfg;
    cfg.variant = variants[built % variants.size()];
    cfg.layers = built % 3;
    cfg.dim = UniformInt(rng, 2, 4);
    cfg.aggregation = (built / 3) % 2 == 0 ? Aggregation::kSum : Aggregation::kMean;
    cfg.lambda_social = Uniform(rng, 0.2, 1.0);
    cfg.lambda_ssl = Uniform(rng, 0.2, 1.0);
    cfg.lambda_reg = Uniform(rng, 0.01, 0.1);

    ModelState model = InitModel(users, items, cfg.dim, rng(), cfg.ToModelOptions());
    for (double& v : model.user_embeddings.values()) v *= 2.0;
    for (double& v : model.item_embeddings.values()) v *= 2.0;
    for (double& c : model.projection.bias) c = Uniform(rng, -0.5, 0.5);

    const SamplingIndex index(ds);
    Batch batch = SampleBatch(index, 4, rng);
    const std::size_t before = batch.ssl.size();
    batch.ssl = SmoothPairs(ds, model, batch.ssl, options);
    dropped_pairs += before - batch.ssl.size();

    const auto gr = BuildInteractionLaplacian(ds);
    const auto gs = BuildSocialLaplacian(ds);
    Encode(model, gr, gs);
    LossBreakdown production;
    const GradientSet analytic = ComputeGradients(batch, model, cfg, gr, gs, 1, &production);
    const double reference = ReferenceJointLoss(ds, model, batch, cfg);
    worst_loss_gap = std::max(worst_loss_gap, std::abs(production.total - reference) /
                                                  std::max(1.0, std::abs(reference)));

    auto params = ParameterSpans(model);
    const auto grads = analytic.Spans();
    const char* names[] = {"E_u", "E_v", "T", "w", "c"};
    for (std::size_t t = 0; t < params.size(); ++t) {
      const auto numeric = FiniteDifference(
          [&] { return ReferenceJointLoss(ds, model, batch, cfg); }, params[t],
          options.step);
      for (std::size_t k = 0; k < numeric.size(); ++k) {
        const double a = grads[t][k];
        const double n = numeric[k];
        const double err = std::abs(a - n) /
                           std::max({std::abs(a), std::abs(n), options.relative_floor});
        ++coordinates;
        if (err > worst) {
          worst = err;
          where.str("");
          where << VariantName(cfg.variant) << " L=" << cfg.layers << ' ' << names[t]
                << '[' << k << "] analytic " << a << " numeric " << n;
        }
      }
    }
    ++built;
  }
  result.worst = worst;
  result.passed = worst <= options.tolerance && worst_loss_gap <= 1e-10;
  std::ostringstream detail;
  detail << built << " instances, " << coordinates << " coordinates, "
         << dropped_pairs << " kink pairs dropped, max rel err " << worst
         << " (" << where.str() << "), loss gap " << worst_loss_gap;
  result.detail = detail.str();
  return result;
}

CheckResult CheckForwardEquivalence(int graphs, int max_nodes, double tolerance,
                                    std::uint64_t seed) {
  CheckResult result;
  result.name = "forward equivalence";
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int g = 0; g < graphs; ++g) {
    const int users = UniformInt(rng, 1, max_nodes - 1);
    const int items = UniformInt(rng, 1, max_nodes - users);
    const Dataset ds =
        RandomDataset(rng, users, items, Uniform(rng, 0.0, 0.3), Uniform(rng, 0.0, 0.3));
    ModelOptions mo;
    mo.layers = UniformInt(rng, 0, 3);
    mo.aggregation = g % 2 == 0 ? Aggregation::kSum : Aggregation::kMean;
    ModelState model = InitModel(users, items, UniformInt(rng, 1, 6), rng(), mo);
    Encode(model, BuildInteractionLaplacian(ds), BuildSocialLaplacian(ds));
    const auto dense = DenseForwardPass(ds, model.user_embeddings, model.item_embeddings,
                                        mo.layers, mo.aggregation);
    auto compare = [&worst](const Matrix& a, const Matrix& b) {
      if (a.rows() != b.rows() || a.cols() != b.cols()) {
        worst = std::numeric_limits<double>::infinity();
        return;
      }
      for (std::size_t k = 0; k < a.size(); ++k) {
        worst = std::max(worst, std::abs(a.values()[k] - b.values()[k]));
      }
    };
    compare(model.interaction_agg, dense.interaction_agg);
    compare(model.social_agg, dense.social_agg);
    for (int l = 0; l <= mo.layers; ++l) {
      compare(model.interaction_layers[l], dense.interaction_layers[l]);
      compare(model.social_layers[l], dense.social_layers[l]);
    }
  }
  result.worst = worst;
  result.passed = worst <= tolerance;
  std::ostringstream detail;
  detail << graphs << " graphs of at most " << max_nodes << " nodes, max abs diff "
         << worst;
  result.detail = detail.str();
  return result;
}

CheckResult CheckRankingMetrics(int vectors, std::uint64_t seed) {
  CheckResult result;
  result.name = "ranking metrics";
  std::mt19937_64 rng(seed);
  const std::vector<int> cutoffs = {1, 3, 5, 10, 20, 50};
  std::size_t mismatches = 0;
  std::vector<int> ranks, oracle_ranks;
  for (int v = 0; v < vectors; ++v) {
    const int negatives = UniformInt(rng, 0, 150);
    const int levels = UniformInt(rng, 1, 12);
    std::vector<int> items(negatives + 1);
    std::iota(items.begin(), items.end(), 0);
    std::shuffle(items.begin(), items.end(), rng);
    auto score = [&] { return static_cast<double>(UniformInt(rng, 0, levels - 1)) / levels; };
    const double positive = score();
    std::vector<double> scores(negatives);
    for (double& s : scores) s = score();
    const std::vector<int> negative_items(items.begin() + 1, items.end());
    const int rank = HeldOutRank(positive, items[0], scores, negative_items);
    const int expected = BruteForceRank(positive, items[0], scores, negative_items);
    if (rank != expected) ++mismatches;
    ranks.push_back(rank);
    oracle_ranks.push_back(expected);
  }
  std::map<int, double> hr, ndcg;
  AccumulateMetrics(ranks, cutoffs, &hr, &ndcg);
  for (int n : cutoffs) {
    double hits = 0.0, gain = 0.0;
    for (int r : oracle_ranks) {
      if (r < n) {
        hits += 1.0;
        gain += 1.0 / std::log2(r + 2.0);
      }
    }
    if (hr[n] != hits / vectors || ndcg[n] != gain / vectors) ++mismatches;
  }
  const bool rank3 = NdcgAt(3, 10) == 1.0 / std::log2(5.0) &&
                     std::abs(NdcgAt(3, 10) - 0.4307) < 5e-5 && HitAt(3, 10) == 1.0;
  result.worst = static_cast<double>(mismatches);
  result.passed = mismatches == 0 && rank3;
  std::ostringstream detail;
  detail << vectors << " score vectors, " << mismatches << " mismatches, NDCG@10 at rank 3 = "
         << NdcgAt(3, 10);
  result.detail = detail.str();
  return result;
}

}  // namespace dslrec::oracle
