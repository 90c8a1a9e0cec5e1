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

// Leave-one-out ranking evaluation. Each evaluated user's held-out item is
// ranked against sampled items the user never interacted with; ties in score
// go to the lower item index. With 0-based rank r:
//
//   HR@N   = mean [r < N]
//   NDCG@N = mean [r < N] / log2(r + 2)

#ifndef DSLREC_EVAL_H_
#define DSLREC_EVAL_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dslrec/data.h"
#include "dslrec/model.h"

namespace dslrec {

enum class Split { kValidation, kTest };

struct EvalOptions {
  Split split = Split::kTest;
  int num_negatives = 99;
  std::vector<int> cutoffs = {5, 10, 20};
  // Negatives for user u come from a generator seeded by (seed, u), so every
  // model evaluated with the same seed sees the same candidates.
  std::uint64_t seed = 0;
  int num_threads = 1;
};

struct StratumMetrics {
  std::string label;
  std::size_t users = 0;
  std::map<int, double> hr;
  std::map<int, double> ndcg;
};

struct EvalReport {
  std::vector<int> cutoffs;
  std::map<int, double> hr;
  std::map<int, double> ndcg;
  std::size_t users_evaluated = 0;
  std::size_t users_skipped = 0;
  // Only non-empty strata are listed.
  std::vector<StratumMetrics> strata;
  std::map<std::string, std::string> metadata;

  double HitRatio(int cutoff) const { return hr.at(cutoff); }
  double Ndcg(int cutoff) const { return ndcg.at(cutoff); }
};

// 0-based position of the held-out item among itself and the negatives.
int HeldOutRank(double positive_score, int positive_item,
                std::span<const double> negative_scores,
                std::span<const int> negative_items);

double HitAt(int rank, int cutoff);
double NdcgAt(int rank, int cutoff);

// Averages HitAt / NdcgAt over `ranks`, in order.
void AccumulateMetrics(std::span<const int> ranks, const std::vector<int>& cutoffs,
                       std::map<int, double>* hr, std::map<int, double>* ndcg);

struct UserRank {
  int user = 0;
  int rank = 0;
};

// Ranks every user holding an item in the chosen split. Users with fewer
// unobserved items than num_negatives are counted in *skipped.
std::vector<UserRank> RankHeldOutItems(const ModelState& state,
                                       const Dataset& dataset,
                                       const EvalOptions& options,
                                       std::size_t* skipped);

EvalReport Evaluate(const ModelState& state, const Dataset& dataset,
                    const EvalOptions& options);

EvalReport EvaluateStratified(const ModelState& state, const Dataset& dataset,
                              const DegreeStrata& strata,
                              const EvalOptions& options);

// Human-readable table.
void WriteReportTable(std::ostream& out, const EvalReport& report);
// One `metric cutoff stratum value` row per number; stratum "all" is overall.
void WriteMetricRows(std::ostream& out, const EvalReport& report);

struct RelevanceRow {
  int user_a = 0;
  int user_b = 0;
  double z = 0.0;
  double zhat = 0.0;
};

// z and zhat for each social tie (each unordered pair once), optionally a
// random subset of `sample` ties, sorted by z ascending.
std::vector<RelevanceRow> ExportRelevanceWeights(const ModelState& state,
                                                 const Dataset& dataset,
                                                 std::optional<std::size_t> sample,
                                                 std::uint64_t seed);

void WriteRelevanceTable(std::ostream& out, const std::vector<RelevanceRow>& rows,
                         const Dataset& dataset);

}  // namespace dslrec

#endif  // DSLREC_EVAL_H_
