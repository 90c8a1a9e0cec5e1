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

// Trainable parameters and the dual-view forward pass.
//
// The interaction view propagates the stacked [user; item] table over the
// bipartite graph, the social view propagates the user table over the social
// graph, and each view sums (or averages) its layer outputs:
//
//   X_0 = [E_u; E_v],  X_l = (L_r + I) X_{l-1},  agg_r = sum_l X_l
//   S_0 = E_u,         S_l = (L_s + I) S_{l-1},  agg_s = sum_l S_l
//
// A learned projection scores how related two users are from the interaction
// view alone:
//
//   z(i, j) = sigmoid(w . leaky_relu(T [a_i; a_j] + a_i + a_j + c))
//
// with a_* the aggregated interaction-view user rows.

#ifndef DSLREC_MODEL_H_
#define DSLREC_MODEL_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dslrec/common.h"
#include "dslrec/graph.h"

namespace dslrec {

enum class Aggregation { kSum, kMean };

std::string AggregationName(Aggregation agg);
Aggregation ParseAggregation(const std::string& name);

struct ModelOptions {
  int layers = 2;
  Aggregation aggregation = Aggregation::kSum;
  // Adds the social-view embedding to the user side of interaction scores.
  bool fuse_social = false;
  double leaky_slope = 0.01;
};

struct ProjectionParams {
  Matrix transform;             // d x 2d
  std::vector<double> weights;  // d
  std::vector<double> bias;     // d
};

struct ModelState {
  Matrix user_embeddings;  // I x d
  Matrix item_embeddings;  // J x d
  ProjectionParams projection;
  ModelOptions options;

  // Filled by Encode: layer outputs 0..L of each view and their aggregate.
  std::vector<Matrix> interaction_layers;
  std::vector<Matrix> social_layers;
  Matrix interaction_agg;  // (I+J) x d, items start at row I
  Matrix social_agg;       // I x d

  int num_users() const { return static_cast<int>(user_embeddings.rows()); }
  int num_items() const { return static_cast<int>(item_embeddings.rows()); }
  int dim() const { return static_cast<int>(user_embeddings.cols()); }
  bool encoded() const { return !interaction_agg.empty(); }
};

// Embeddings, T and w are drawn from U(-1/sqrt(d), 1/sqrt(d)); c starts at 0.
ModelState InitModel(int num_users, int num_items, int dim, std::uint64_t seed,
                     ModelOptions options = {});

// Mutable views over every trainable tensor, in a fixed order
// (E_u, E_v, T, w, c). Used by the optimizer and by gradient checks.
std::vector<std::span<double>> ParameterSpans(ModelState& state);

void Encode(ModelState& state, const NormalizedGraph& interaction_graph,
            const NormalizedGraph& social_graph, int num_threads = 1);

struct SimilarityTerms {
  std::vector<double> pre_activation;  // T [a_i; a_j] + a_i + a_j + c
  std::vector<double> activation;      // leaky_relu(pre_activation)
  double z = 0.0;
};

SimilarityTerms EvaluateSimilarity(const ProjectionParams& projection,
                                   std::span<const double> first,
                                   std::span<const double> second,
                                   double leaky_slope);

double InteractionSimilarity(const ModelState& state, int user_a, int user_b);
double SocialSimilarity(const ModelState& state, int user_a, int user_b);

std::span<const double> InteractionUserRow(const ModelState& state, int user);
std::span<const double> InteractionItemRow(const ModelState& state, int item);

// Dot-product scores over aggregated embeddings. With fuse_social set, the
// user side is agg_r[u] + agg_s[u].
double PredictInteraction(const ModelState& state, int user, int item);
double PredictSocial(const ModelState& state, int user_a, int user_b);

inline double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace dslrec

#endif  // DSLREC_MODEL_H_
