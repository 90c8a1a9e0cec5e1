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

#include "dslrec/model.h"

#include <random>

namespace dslrec {

std::string AggregationName(Aggregation agg) {
  return agg == Aggregation::kSum ? "sum" : "mean";
}

Aggregation ParseAggregation(const std::string& name) {
  if (name == "sum") return Aggregation::kSum;
  if (name == "mean") return Aggregation::kMean;
  throw Error("unknown aggregation '" + name + "' (expected sum|mean)");
}

ModelState InitModel(int num_users, int num_items, int dim, std::uint64_t seed,
                     ModelOptions options) {
  if (dim <= 0) throw Error("embedding dimension must be positive");
  if (options.layers < 0) throw Error("layer count must be nonnegative");
  ModelState state;
  state.options = options;
  state.user_embeddings.Reset(num_users, dim);
  state.item_embeddings.Reset(num_items, dim);
  state.projection.transform.Reset(dim, 2 * static_cast<std::size_t>(dim));
  state.projection.weights.assign(dim, 0.0);
  state.projection.bias.assign(dim, 0.0);

  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-scale, scale);
  for (auto* values : {&state.user_embeddings, &state.item_embeddings,
                       &state.projection.transform}) {
    for (double& v : values->values()) v = uniform(rng);
  }
  for (double& v : state.projection.weights) v = uniform(rng);
  return state;
}

std::vector<std::span<double>> ParameterSpans(ModelState& state) {
  return {state.user_embeddings.values(), state.item_embeddings.values(),
          state.projection.transform.values(), state.projection.weights,
          state.projection.bias};
}

void Encode(ModelState& state, const NormalizedGraph& interaction_graph,
            const NormalizedGraph& social_graph, int num_threads) {
  const std::size_t num_users = state.user_embeddings.rows();
  const std::size_t num_items = state.item_embeddings.rows();
  const std::size_t dim = state.user_embeddings.cols();
  if (static_cast<std::size_t>(interaction_graph.size()) != num_users + num_items) {
    throw Error("interaction graph size does not match I + J");
  }
  if (static_cast<std::size_t>(social_graph.size()) != num_users) {
    throw Error("social graph size does not match I");
  }
  const int layers = state.options.layers;

  auto& xs = state.interaction_layers;
  auto& ss = state.social_layers;
  xs.resize(layers + 1);
  ss.resize(layers + 1);
  xs[0].Reset(num_users + num_items, dim);
  auto stacked = xs[0].values();
  std::copy(state.user_embeddings.values().begin(),
            state.user_embeddings.values().end(), stacked.begin());
  std::copy(state.item_embeddings.values().begin(),
            state.item_embeddings.values().end(),
            stacked.begin() + static_cast<std::ptrdiff_t>(num_users * dim));
  ss[0] = state.user_embeddings;
  for (int l = 1; l <= layers; ++l) {
    PropagateInto(interaction_graph, xs[l - 1], &xs[l], num_threads);
    PropagateInto(social_graph, ss[l - 1], &ss[l], num_threads);
  }

  const double scale = state.options.aggregation == Aggregation::kMean
                           ? 1.0 / static_cast<double>(layers + 1)
                           : 1.0;
  auto aggregate = [scale](const std::vector<Matrix>& cache, Matrix* agg) {
    *agg = cache[0];
    for (std::size_t l = 1; l < cache.size(); ++l) {
      Axpy(1.0, cache[l].values(), agg->values());
    }
    if (scale != 1.0) {
      for (double& v : agg->values()) v *= scale;
    }
  };
  aggregate(xs, &state.interaction_agg);
  aggregate(ss, &state.social_agg);
}

SimilarityTerms EvaluateSimilarity(const ProjectionParams& projection,
                                   std::span<const double> first,
                                   std::span<const double> second,
                                   double leaky_slope) {
  const std::size_t dim = first.size();
  SimilarityTerms terms;
  terms.pre_activation.resize(dim);
  terms.activation.resize(dim);
  double logit = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const auto t_row = projection.transform.row(k);
    const double h = Dot(t_row.first(dim), first) + Dot(t_row.last(dim), second) +
                     first[k] + second[k] + projection.bias[k];
    terms.pre_activation[k] = h;
    terms.activation[k] = h > 0.0 ? h : leaky_slope * h;
    logit += projection.weights[k] * terms.activation[k];
  }
  terms.z = Sigmoid(logit);
  return terms;
}

std::span<const double> InteractionUserRow(const ModelState& state, int user) {
  if (user < 0 || user >= state.num_users()) throw Error("user index out of range");
  return state.interaction_agg.row(user);
}

std::span<const double> InteractionItemRow(const ModelState& state, int item) {
  if (item < 0 || item >= state.num_items()) throw Error("item index out of range");
  return state.interaction_agg.row(static_cast<std::size_t>(state.num_users()) + item);
}

double InteractionSimilarity(const ModelState& state, int user_a, int user_b) {
  return EvaluateSimilarity(state.projection, InteractionUserRow(state, user_a),
                            InteractionUserRow(state, user_b),
                            state.options.leaky_slope)
      .z;
}

double SocialSimilarity(const ModelState& state, int user_a, int user_b) {
  return PredictSocial(state, user_a, user_b);
}

double PredictInteraction(const ModelState& state, int user, int item) {
  const auto item_row = InteractionItemRow(state, item);
  double score = Dot(InteractionUserRow(state, user), item_row);
  if (state.options.fuse_social) score += Dot(state.social_agg.row(user), item_row);
  return score;
}

double PredictSocial(const ModelState& state, int user_a, int user_b) {
  const int n = state.num_users();
  if (user_a < 0 || user_a >= n || user_b < 0 || user_b >= n) {
    throw Error("user index out of range");
  }
  return Dot(state.social_agg.row(user_a), state.social_agg.row(user_b));
}

}  // namespace dslrec
