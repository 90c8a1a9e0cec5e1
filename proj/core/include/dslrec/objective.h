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

// Training objective. The joint loss of one batch is
//
//   L = L_rec + l1 * L_soc + l2 * L_ssl + l3 * (|E_u|^2 + |E_v|^2)
//
// where L_rec and L_soc are BPR sums over sampled (anchor, positive, negative)
// triples of the interaction and social views, and L_ssl is the denoising
// alignment sum_{(i,j)} max(0, 1 - z(i,j) * zhat(i,j)) over random user
// pairs, zhat being the social-view dot product. Gradients are exact and flow
// back through the projection network and the L propagation layers.

#ifndef DSLREC_OBJECTIVE_H_
#define DSLREC_OBJECTIVE_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dslrec/common.h"
#include "dslrec/data.h"
#include "dslrec/graph.h"
#include "dslrec/model.h"

namespace dslrec {

enum class Variant {
  kFull,
  kNoDenoise,    // dsl_d: alignment loss disabled
  kNoSsl,        // dsl_s: no social losses, social embedding fused into scores
  kContrastive,  // dsl_c: alignment replaced by in-batch InfoNCE
};

std::string VariantName(Variant variant);
Variant ParseVariant(const std::string& name);
std::vector<Variant> AllVariants();

struct TrainConfig {
  int dim = 128;
  int layers = 2;
  double lr = 1e-3;
  double lr_decay = 0.96;
  int batch_size = 2048;
  double lambda_social = 1e-1;
  double lambda_ssl = 1e-5;
  double lambda_reg = 1e-6;
  int epochs = 100;
  int patience = 10;
  Aggregation aggregation = Aggregation::kSum;
  Variant variant = Variant::kFull;
  double infonce_temperature = 0.1;
  double leaky_slope = 0.01;
  std::uint64_t seed = 2023;

  void Validate() const;
  ModelOptions ToModelOptions() const;
};

enum class AlignmentKind { kNone, kHinge, kInfoNce };

// Loss weights after the variant switches are applied.
struct LossWeights {
  double social = 0.0;
  double ssl = 0.0;
  double reg = 0.0;
  AlignmentKind alignment = AlignmentKind::kHinge;
};

LossWeights EffectiveWeights(const TrainConfig& config);

struct Triple {
  int anchor = 0;
  int positive = 0;
  int negative = 0;
};

struct UserPair {
  int first = 0;
  int second = 0;
};

struct Batch {
  std::vector<Triple> rec;     // (user, item+, item-)
  std::vector<Triple> social;  // (user, friend, non-friend)
  std::vector<UserPair> ssl;
};

// Per-user adjacency over the training graph, built once per dataset.
class SamplingIndex {
 public:
  explicit SamplingIndex(const Dataset& dataset);

  int num_users() const { return num_users_; }
  int num_items() const { return num_items_; }
  const std::vector<int>& items_of(int user) const { return items_of_[user]; }
  const std::vector<int>& friends_of(int user) const { return friends_of_[user]; }
  bool Interacted(int user, int item) const;
  bool Tied(int user, int other) const;
  const std::vector<int>& active_users() const { return active_users_; }
  const std::vector<int>& social_users() const { return social_users_; }

 private:
  int num_users_ = 0;
  int num_items_ = 0;
  std::vector<std::vector<int>> items_of_;
  std::vector<std::vector<int>> friends_of_;
  std::vector<int> active_users_;
  std::vector<int> social_users_;
};

// Rec triples draw a user uniformly among users with train items, a positive
// among that user's items and a negative by rejection. Social triples mirror
// this over ties (empty when the dataset has none). SSL pairs are two
// independent uniform users.
Batch SampleBatch(const SamplingIndex& index, int batch_size,
                  std::mt19937_64& rng);

// -ln sigmoid(x), evaluated without overflow.
double NegLogSigmoid(double x);

double BprLoss(std::span<const double> positive_scores,
               std::span<const double> negative_scores);
double SslHingeLoss(std::span<const double> z, std::span<const double> zhat);

// Mean over rows of -ln softmax_k(cos(a_i, p_k) / tau)[i]: row i of
// `positives` is the positive for anchor i, all other rows are negatives.
// When the gradient outputs are non-null they receive dLoss/d(anchors) and
// dLoss/d(positives).
double InfoNceLoss(const Matrix& anchors, const Matrix& positives, double tau,
                   Matrix* anchor_grad = nullptr,
                   Matrix* positive_grad = nullptr);

struct LossBreakdown {
  double rec = 0.0;
  double social = 0.0;  // unweighted
  double ssl = 0.0;     // unweighted
  double reg = 0.0;     // unweighted |E_u|^2 + |E_v|^2
  double total = 0.0;   // weighted sum
};

// `state` must be encoded. Throws naming the component when a term is not
// finite.
LossBreakdown JointLoss(const Batch& batch, const ModelState& state,
                        const TrainConfig& config);

struct GradientSet {
  Matrix user_embeddings;
  Matrix item_embeddings;
  Matrix transform;
  std::vector<double> weights;
  std::vector<double> bias;

  // Same order as ParameterSpans.
  std::vector<std::span<const double>> Spans() const;
};

// Gradients with respect to the aggregated view embeddings plus the projection
// parameters, i.e. everything above the propagation layers. The regularizer
// is not included (it acts on E_u, E_v directly).
struct HeadGradients {
  Matrix interaction_agg;  // (I+J) x d
  Matrix social_agg;       // I x d
  Matrix transform;
  std::vector<double> weights;
  std::vector<double> bias;
};

// Zero-filled head gradients shaped for `state`.
void ResetHeadGradients(const ModelState& state, HeadGradients* grads);

// Unweighted sum_{(i,j)} max(0, 1 - z(i,j) * zhat(i,j)). When `grads` is
// non-null, weight * gradient is accumulated into it. Pairs exactly on the
// hinge (z * zhat == 1) contribute nothing. Cost is O(|pairs| * d^2).
double HingeAlignment(const std::vector<UserPair>& pairs, const ModelState& state,
                      double weight, HeadGradients* grads);

// InfoNCE between interaction-view (anchor) and social-view (positive) rows
// of the first user of every pair, with in-batch negatives. Cost is
// O(|pairs|^2 * d).
double InfoNceAlignment(const std::vector<UserPair>& pairs,
                        const ModelState& state, double weight, double tau,
                        HeadGradients* grads);

LossBreakdown ComputeHeadGradients(const Batch& batch, const ModelState& state,
                                   const TrainConfig& config,
                                   HeadGradients* grads);

// Full analytic gradient of JointLoss with respect to E_u, E_v, T, w, c.
// When `loss` is non-null it receives the batch loss at the current state.
GradientSet ComputeGradients(const Batch& batch, const ModelState& state,
                             const TrainConfig& config,
                             const NormalizedGraph& interaction_graph,
                             const NormalizedGraph& social_graph,
                             int num_threads = 1,
                             LossBreakdown* loss = nullptr);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

AdamState MakeAdamState(ModelState& state);

// One bias-corrected Adam update at learning rate `lr`; advances state.step.
void AdamStep(ModelState& state, const GradientSet& grads, AdamState& adam,
              double lr);

}  // namespace dslrec

#endif  // DSLREC_OBJECTIVE_H_
