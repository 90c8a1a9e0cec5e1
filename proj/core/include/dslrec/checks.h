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

// Randomized self-checks comparing the production code against the dense
// references in oracle.h.

#ifndef DSLREC_CHECKS_H_
#define DSLREC_CHECKS_H_

#include <cstdint>
#include <random>
#include <string>

#include "dslrec/data.h"

namespace dslrec::oracle {

struct CheckResult {
  std::string name;
  bool passed = false;
  // Worst observed discrepancy (meaning depends on the check).
  double worst = 0.0;
  std::string detail;
};

// Train-only dataset with ids "u<k>"/"i<k>". Every user keeps at least one
// non-interacted item and, when it has ties, at least one non-friend, so
// batches can always be sampled.
Dataset RandomDataset(std::mt19937_64& rng, int num_users, int num_items,
                      double edge_probability, double tie_probability);

struct GradientCheckOptions {
  int instances = 24;
  double step = 1e-6;
  double tolerance = 1e-5;
  // Denominator floor of the per-coordinate relative error.
  double relative_floor = 1e-4;
  // Alignment pairs with |z * zhat - 1| below this are dropped.
  double hinge_margin = 1e-3;
  // Active alignment pairs with a projection pre-activation this close to 0
  // are dropped as well (leaky-relu kink).
  double activation_margin = 1e-4;
  std::uint64_t seed = 20240601;
};

// Analytic gradients of the joint objective against central differences of
// the dense reference objective, cycling through every variant and
// L in {0, 1, 2}, at most 8 users and 8 items.
CheckResult CheckGradients(const GradientCheckOptions& options = {});

// Sparse encoder against the dense forward pass on random graphs of at most
// `max_nodes` nodes.
CheckResult CheckForwardEquivalence(int graphs = 100, int max_nodes = 64,
                                    double tolerance = 1e-10,
                                    std::uint64_t seed = 7);

// Production ranks and HR / NDCG against full-sort ranks on random score
// vectors with frequent ties.
CheckResult CheckRankingMetrics(int vectors = 1000, std::uint64_t seed = 11);

}  // namespace dslrec::oracle

#endif  // DSLREC_CHECKS_H_
