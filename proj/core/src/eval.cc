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

#include "dslrec/eval.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <unordered_set>

#include "dslrec/common.h"

namespace dslrec {

int HeldOutRank(double positive_score, int positive_item,
                std::span<const double> negative_scores,
                std::span<const int> negative_items) {
  int rank = 0;
  for (std::size_t k = 0; k < negative_scores.size(); ++k) {
    const double s = negative_scores[k];
    if (s > positive_score ||
        (s == positive_score && negative_items[k] < positive_item)) {
      ++rank;
    }
  }
  return rank;
}

double HitAt(int rank, int cutoff) { return rank < cutoff ? 1.0 : 0.0; }

double NdcgAt(int rank, int cutoff) {
  return rank < cutoff ? 1.0 / std::log2(static_cast<double>(rank) + 2.0) : 0.0;
}

void AccumulateMetrics(std::span<const int> ranks, const std::vector<int>& cutoffs,
                       std::map<int, double>* hr, std::map<int, double>* ndcg) {
  for (int n : cutoffs) {
    double hits = 0.0;
    double gain = 0.0;
    for (int r : ranks) {
      hits += HitAt(r, n);
      gain += NdcgAt(r, n);
    }
    const double count = ranks.empty() ? 1.0 : static_cast<double>(ranks.size());
    (*hr)[n] = hits / count;
    (*ndcg)[n] = gain / count;
  }
}

namespace {

std::vector<std::vector<int>> ObservedItems(const Dataset& ds) {
  std::vector<std::vector<int>> observed(ds.num_users);
  for (const auto* split : {&ds.train, &ds.val, &ds.test}) {
    for (const auto& e : *split) observed[e.user].push_back(e.item);
  }
  for (auto& items : observed) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  return observed;
}

// Draws `count` distinct items outside `observed` (sorted).
std::vector<int> SampleNegatives(const std::vector<int>& observed, int num_items,
                                 int count, std::mt19937_64& rng) {
  std::vector<int> negatives;
  negatives.reserve(count);
  const int candidates = num_items - static_cast<int>(observed.size());
  auto is_observed = [&observed](int item) {
    return std::binary_search(observed.begin(), observed.end(), item);
  };
  if (count * 2 <= candidates) {
    std::unordered_set<int> chosen;
    std::uniform_int_distribution<int> pick(0, num_items - 1);
    while (static_cast<int>(negatives.size()) < count) {
      const int item = pick(rng);
      if (is_observed(item) || !chosen.insert(item).second) continue;
      negatives.push_back(item);
    }
  } else {
    std::vector<int> pool;
    pool.reserve(candidates);
    for (int item = 0; item < num_items; ++item) {
      if (!is_observed(item)) pool.push_back(item);
    }
    for (int k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
      negatives.push_back(pool[k]);
    }
  }
  return negatives;
}

EvalReport MakeReport(const std::vector<UserRank>& ranked, std::size_t skipped,
                      const EvalOptions& options) {
  EvalReport report;
  report.cutoffs = options.cutoffs;
  std::vector<int> ranks;
  ranks.reserve(ranked.size());
  for (const auto& r : ranked) ranks.push_back(r.rank);
  AccumulateMetrics(ranks, options.cutoffs, &report.hr, &report.ndcg);
  report.users_evaluated = ranked.size();
  report.users_skipped = skipped;
  report.metadata["split"] = options.split == Split::kTest ? "test" : "val";
  report.metadata["negatives"] = std::to_string(options.num_negatives);
  report.metadata["eval_seed"] = std::to_string(options.seed);
  return report;
}

}  // namespace

std::vector<UserRank> RankHeldOutItems(const ModelState& state,
                                       const Dataset& dataset,
                                       const EvalOptions& options,
                                       std::size_t* skipped) {
  if (!state.encoded()) throw Error("model must be encoded before evaluation");
  if (options.num_negatives < 0) throw Error("negative count must be nonnegative");
  const auto& held_out = options.split == Split::kTest ? dataset.test : dataset.val;
  const auto observed = ObservedItems(dataset);

  std::vector<int> ranks(held_out.size(), -1);
  ParallelFor(held_out.size(), options.num_threads,
              [&](std::size_t begin, std::size_t end) {
                std::vector<double> scores;
                for (std::size_t k = begin; k < end; ++k) {
                  const auto& e = held_out[k];
                  const auto& seen = observed[e.user];
                  const int candidates =
                      dataset.num_items - static_cast<int>(seen.size());
                  if (candidates < options.num_negatives) continue;
                  std::mt19937_64 rng(MixSeed(options.seed, e.user));
                  const auto negatives = SampleNegatives(
                      seen, dataset.num_items, options.num_negatives, rng);
                  scores.resize(negatives.size());
                  for (std::size_t n = 0; n < negatives.size(); ++n) {
                    scores[n] = PredictInteraction(state, e.user, negatives[n]);
                  }
                  ranks[k] = HeldOutRank(PredictInteraction(state, e.user, e.item),
                                         e.item, scores, negatives);
                }
              });

  std::vector<UserRank> result;
  result.reserve(held_out.size());
  std::size_t missing = 0;
  for (std::size_t k = 0; k < held_out.size(); ++k) {
    if (ranks[k] < 0) {
      ++missing;
      continue;
    }
    result.push_back({held_out[k].user, ranks[k]});
  }
  if (skipped != nullptr) *skipped = missing;
  return result;
}

EvalReport Evaluate(const ModelState& state, const Dataset& dataset,
                    const EvalOptions& options) {
  std::size_t skipped = 0;
  const auto ranked = RankHeldOutItems(state, dataset, options, &skipped);
  return MakeReport(ranked, skipped, options);
}

EvalReport EvaluateStratified(const ModelState& state, const Dataset& dataset,
                              const DegreeStrata& strata,
                              const EvalOptions& options) {
  std::size_t skipped = 0;
  const auto ranked = RankHeldOutItems(state, dataset, options, &skipped);
  EvalReport report = MakeReport(ranked, skipped, options);
  std::vector<std::vector<int>> by_stratum(strata.intervals.size());
  for (const auto& r : ranked) {
    by_stratum[strata.assignment.at(r.user)].push_back(r.rank);
  }
  for (std::size_t s = 0; s < strata.intervals.size(); ++s) {
    if (by_stratum[s].empty()) continue;
    StratumMetrics m;
    m.label = strata.intervals[s].Label();
    m.users = by_stratum[s].size();
    AccumulateMetrics(by_stratum[s], options.cutoffs, &m.hr, &m.ndcg);
    report.strata.push_back(std::move(m));
  }
  return report;
}

void WriteReportTable(std::ostream& out, const EvalReport& report) {
  out << std::fixed << std::setprecision(4);
  for (const auto& [key, value] : report.metadata) {
    out << "# " << key << ": " << value << '\n';
  }
  out << "# users evaluated: " << report.users_evaluated
      << ", skipped: " << report.users_skipped << '\n';
  out << std::left << std::setw(12) << "group" << std::right << std::setw(8)
      << "users";
  for (int n : report.cutoffs) {
    out << std::setw(10) << ("HR@" + std::to_string(n)) << std::setw(10)
        << ("NDCG@" + std::to_string(n));
  }
  out << '\n';
  auto row = [&](const std::string& label, std::size_t users,
                 const std::map<int, double>& hr, const std::map<int, double>& ndcg) {
    out << std::left << std::setw(12) << label << std::right << std::setw(8) << users;
    for (int n : report.cutoffs) {
      out << std::setw(10) << hr.at(n) << std::setw(10) << ndcg.at(n);
    }
    out << '\n';
  };
  row("all", report.users_evaluated, report.hr, report.ndcg);
  for (const auto& s : report.strata) row(s.label, s.users, s.hr, s.ndcg);
  out.unsetf(std::ios::floatfield);
}

void WriteMetricRows(std::ostream& out, const EvalReport& report) {
  out << std::setprecision(10);
  auto emit = [&](const std::string& stratum, const std::map<int, double>& hr,
                  const std::map<int, double>& ndcg) {
    for (int n : report.cutoffs) out << "hr " << n << ' ' << stratum << ' ' << hr.at(n) << '\n';
    for (int n : report.cutoffs) {
      out << "ndcg " << n << ' ' << stratum << ' ' << ndcg.at(n) << '\n';
    }
  };
  emit("all", report.hr, report.ndcg);
  for (const auto& s : report.strata) emit(s.label, s.hr, s.ndcg);
}

std::vector<RelevanceRow> ExportRelevanceWeights(const ModelState& state,
                                                 const Dataset& dataset,
                                                 std::optional<std::size_t> sample,
                                                 std::uint64_t seed) {
  if (!state.encoded()) throw Error("model must be encoded before exporting weights");
  std::vector<SocialEdge> ties;
  for (const auto& e : dataset.social) {
    if (e.from < e.to) ties.push_back(e);
  }
  if (sample.has_value() && *sample < ties.size()) {
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < *sample; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, ties.size() - 1);
      std::swap(ties[k], ties[pick(rng)]);
    }
    ties.resize(*sample);
  }
  std::vector<RelevanceRow> rows;
  rows.reserve(ties.size());
  for (const auto& t : ties) {
    rows.push_back({t.from, t.to, InteractionSimilarity(state, t.from, t.to),
                    SocialSimilarity(state, t.from, t.to)});
  }
  std::sort(rows.begin(), rows.end(), [](const RelevanceRow& a, const RelevanceRow& b) {
    if (a.z != b.z) return a.z < b.z;
    return std::pair(a.user_a, a.user_b) < std::pair(b.user_a, b.user_b);
  });
  return rows;
}

void WriteRelevanceTable(std::ostream& out, const std::vector<RelevanceRow>& rows,
                         const Dataset& dataset) {
  out << "# user_a user_b z zhat\n" << std::setprecision(8);
  for (const auto& r : rows) {
    out << dataset.user_ids.at(r.user_a) << ' ' << dataset.user_ids.at(r.user_b)
        << ' ' << r.z << ' ' << r.zhat << '\n';
  }
}

}  // namespace dslrec
