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

// Dense, deliberately naive reference computations. Only meant for tiny
// instances in tests and `dslrec check`.

#ifndef DSLREC_ORACLE_H_
#define DSLREC_ORACLE_H_

#include <functional>
#include <span>
#include <vector>

#include "dslrec/common.h"
#include "dslrec/data.h"
#include "dslrec/model.h"
#include "dslrec/objective.h"

namespace dslrec::oracle {

inline constexpr int kMaxDenseNodes = 256;

Matrix Identity(std::size_t n);
Matrix MatMul(const Matrix& a, const Matrix& b);
Matrix Add(const Matrix& a, const Matrix& b);

struct DenseGraphs {
  Matrix interaction_adjacency;  // (I+J) x (I+J), 0/1
  Matrix interaction_laplacian;  // D^-1/2 A D^-1/2
  Matrix social_adjacency;       // I x I
  Matrix social_laplacian;
};

// Throws when I + J exceeds kMaxDenseNodes.
DenseGraphs BuildDenseGraphs(const Dataset& dataset);

struct DenseForward {
  std::vector<Matrix> interaction_layers;
  std::vector<Matrix> social_layers;
  Matrix interaction_agg;
  Matrix social_agg;
};

// Layer l is (L + I)^l applied to the stacked input, with the power formed
// explicitly.
DenseForward DenseForwardPass(const Dataset& dataset, const Matrix& user_embeddings,
                              const Matrix& item_embeddings, int layers,
                              Aggregation aggregation);

// Central differences (f(x + h) - f(x - h)) / 2h for every coordinate of
// `params`, which `loss` must read. Throws on a non-finite probe.
std::vector<double> FiniteDifference(const std::function<double()>& loss,
                                     std::span<double> params, double step);

// sigmoid(w . leaky_relu(T [a; b] + a + b + c)).
double ReferenceSimilarity(const ProjectionParams& projection,
                           std::span<const double> a, std::span<const double> b,
                           double leaky_slope);

// The weighted joint objective recomputed from the raw parameters of `state`
// (its encoded tensors are ignored).
double ReferenceJointLoss(const Dataset& dataset, const ModelState& state,
                          const Batch& batch, const TrainConfig& config);

// Position of the held-out item after fully sorting all candidates by
// (score desc, item asc).
int BruteForceRank(double positive_score, int positive_item,
                   const std::vector<double>& negative_scores,
                   const std::vector<int>& negative_items);

}  // namespace dslrec::oracle

#endif  // DSLREC_ORACLE_H_
