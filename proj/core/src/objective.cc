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

#include "dslrec/objective.h"

#include <algorithm>
#include <cmath>

namespace dslrec {

std::string VariantName(Variant variant) {
  switch (variant) {
    case Variant::kFull:
      return "full";
    case Variant::kNoDenoise:
      return "dsl_d";
    case Variant::kNoSsl:
      return "dsl_s";
    case Variant::kContrastive:
      return "dsl_c";
  }
  return "unknown";
}

Variant ParseVariant(const std::string& name) {
  for (Variant v : AllVariants()) {
    if (VariantName(v) == name) return v;
  }
  throw Error("unknown variant '" + name + "' (expected full|dsl_d|dsl_s|dsl_c)");
}

std::vector<Variant> AllVariants() {
  return {Variant::kFull, Variant::kNoDenoise, Variant::kNoSsl,
          Variant::kContrastive};
}

void TrainConfig::Validate() const {
  if (dim <= 0) throw Error("dim must be positive");
  if (layers < 0) throw Error("layers must be nonnegative");
  if (!(lr > 0.0)) throw Error("lr must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw Error("lr_decay must lie in (0, 1]");
  if (batch_size < 1) throw Error("batch_size must be at least 1");
  if (lambda_social < 0.0 || lambda_ssl < 0.0 || lambda_reg < 0.0) {
    throw Error("loss weights must be nonnegative");
  }
  if (epochs < 0) throw Error("epochs must be nonnegative");
  if (patience < 1) throw Error("patience must be at least 1");
  if (!(infonce_temperature > 0.0)) throw Error("infonce temperature must be positive");
}

ModelOptions TrainConfig::ToModelOptions() const {
  ModelOptions options;
  options.layers = layers;
  options.aggregation = aggregation;
  options.fuse_social = variant == Variant::kNoSsl;
  options.leaky_slope = leaky_slope;
  return options;
}

LossWeights EffectiveWeights(const TrainConfig& config) {
  LossWeights w;
  w.social = config.lambda_social;
  w.ssl = config.lambda_ssl;
  w.reg = config.lambda_reg;
  switch (config.variant) {
    case Variant::kFull:
      w.alignment = AlignmentKind::kHinge;
      break;
    case Variant::kNoDenoise:
      w.ssl = 0.0;
      w.alignment = AlignmentKind::kNone;
      break;
    case Variant::kNoSsl:
      w.social = 0.0;
      w.ssl = 0.0;
      w.alignment = AlignmentKind::kNone;
      break;
    case Variant::kContrastive:
      w.alignment = AlignmentKind::kInfoNce;
      break;
  }
  return w;
}

SamplingIndex::SamplingIndex(const Dataset& dataset)
    : num_users_(dataset.num_users),
      num_items_(dataset.num_items),
      items_of_(dataset.num_users),
      friends_of_(dataset.num_users) {
  for (const auto& e : dataset.train) items_of_[e.user].push_back(e.item);
  for (const auto& e : dataset.social) friends_of_[e.from].push_back(e.to);
  for (int u = 0; u < num_users_; ++u) {
    std::sort(items_of_[u].begin(), items_of_[u].end());
    items_of_[u].erase(std::unique(items_of_[u].begin(), items_of_[u].end()),
                       items_of_[u].end());
    std::sort(friends_of_[u].begin(), friends_of_[u].end());
    if (!items_of_[u].empty()) active_users_.push_back(u);
    if (!friends_of_[u].empty()) social_users_.push_back(u);
  }
}

bool SamplingIndex::Interacted(int user, int item) const {
  return std::binary_search(items_of_[user].begin(), items_of_[user].end(), item);
}

bool SamplingIndex::Tied(int user, int other) const {
  return std::binary_search(friends_of_[user].begin(), friends_of_[user].end(),
                            other);
}

Batch SampleBatch(const SamplingIndex& index, int batch_size,
                  std::mt19937_64& rng) {
  if (index.active_users().empty()) throw Error("no training interactions to sample");
  auto uniform = [&rng](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  Batch batch;
  batch.rec.reserve(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const int user = index.active_users()[uniform(index.active_users().size())];
    const auto& items = index.items_of(user);
    if (static_cast<int>(items.size()) >= index.num_items()) {
      throw Error("user " + std::to_string(user) +
                  " interacted with every item; no negative exists");
    }
    const int positive = items[uniform(items.size())];
    int negative = 0;
    do {
      negative = static_cast<int>(uniform(index.num_items()));
    } while (index.Interacted(user, negative));
    batch.rec.push_back({user, positive, negative});
  }
  if (!index.social_users().empty()) {
    batch.social.reserve(batch_size);
    for (int b = 0; b < batch_size; ++b) {
      const int user = index.social_users()[uniform(index.social_users().size())];
      const auto& friends = index.friends_of(user);
      if (static_cast<int>(friends.size()) >= index.num_users() - 1) {
        throw Error("user " + std::to_string(user) +
                    " is tied to every other user; no social negative exists");
      }
      const int positive = friends[uniform(friends.size())];
      int negative = 0;
      do {
        negative = static_cast<int>(uniform(index.num_users()));
      } while (negative == user || index.Tied(user, negative));
      batch.social.push_back({user, positive, negative});
    }
  }
  batch.ssl.reserve(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const int first = static_cast<int>(uniform(index.num_users()));
    const int second = static_cast<int>(uniform(index.num_users()));
    batch.ssl.push_back({first, second});
  }
  return batch;
}

double NegLogSigmoid(double x) {
  // softplus(-x) = max(-x, 0) + log1p(exp(-|x|))
  return std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double BprLoss(std::span<const double> positive_scores,
               std::span<const double> negative_scores) {
  if (positive_scores.size() != negative_scores.size()) {
    throw Error("bpr: score lists differ in length");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < positive_scores.size(); ++k) {
    loss += NegLogSigmoid(positive_scores[k] - negative_scores[k]);
  }
  return loss;
}

double SslHingeLoss(std::span<const double> z, std::span<const double> zhat) {
  if (z.size() != zhat.size()) throw Error("ssl hinge: lists differ in length");
  double loss = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    loss += std::max(0.0, 1.0 - z[k] * zhat[k]);
  }
  return loss;
}

double InfoNceLoss(const Matrix& anchors, const Matrix& positives, double tau,
                   Matrix* anchor_grad, Matrix* positive_grad) {
  const std::size_t n = anchors.rows();
  const std::size_t dim = anchors.cols();
  if (positives.rows() != n || positives.cols() != dim) {
    throw Error("infonce: anchor and positive shapes differ");
  }
  if (!(tau > 0.0)) throw Error("infonce: temperature must be positive");
  std::vector<double> anchor_norm(n), positive_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    anchor_norm[i] = std::sqrt(SquaredNorm(anchors.row(i)));
    positive_norm[i] = std::sqrt(SquaredNorm(positives.row(i)));
    if (anchor_norm[i] == 0.0 || positive_norm[i] == 0.0) {
      throw Error("infonce: zero-norm row " + std::to_string(i));
    }
  }
  const bool want_grad = anchor_grad != nullptr && positive_grad != nullptr;
  if (want_grad) {
    anchor_grad->Reset(n, dim);
    positive_grad->Reset(n, dim);
  }
  double loss = 0.0;
  std::vector<double> cosine(n), prob(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = anchors.row(i);
    double max_logit = -INFINITY;
    for (std::size_t k = 0; k < n; ++k) {
      cosine[k] = Dot(a, positives.row(k)) / (anchor_norm[i] * positive_norm[k]);
      max_logit = std::max(max_logit, cosine[k] / tau);
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      prob[k] = std::exp(cosine[k] / tau - max_logit);
      denom += prob[k];
    }
    loss += max_logit + std::log(denom) - cosine[i] / tau;
    if (!want_grad) continue;
    auto ga = anchor_grad->row(i);
    for (std::size_t k = 0; k < n; ++k) {
      prob[k] /= denom;
      const double ds = (prob[k] - (k == i ? 1.0 : 0.0)) / (tau * static_cast<double>(n));
      if (ds == 0.0) continue;
      const auto p = positives.row(k);
      const double inv = 1.0 / (anchor_norm[i] * positive_norm[k]);
      const double a_scale = cosine[k] / (anchor_norm[i] * anchor_norm[i]);
      const double p_scale = cosine[k] / (positive_norm[k] * positive_norm[k]);
      auto gp = positive_grad->row(k);
      for (std::size_t c = 0; c < dim; ++c) {
        ga[c] += ds * (p[c] * inv - a_scale * a[c]);
        gp[c] += ds * (a[c] * inv - p_scale * p[c]);
      }
    }
  }
  return loss / static_cast<double>(n);
}

namespace {

// Interaction-view user representation used for ranking.
void UserRepresentation(const ModelState& state, int user, std::span<double> out) {
  const auto a = state.interaction_agg.row(user);
  std::copy(a.begin(), a.end(), out.begin());
  if (state.options.fuse_social) Axpy(1.0, state.social_agg.row(user), out);
}

void CheckFinite(double value, const char* component) {
  if (!std::isfinite(value)) {
    throw Error(std::string("non-finite ") + component + " loss");
  }
}

// Rows of `source` picked by the first user of each SSL pair.
Matrix GatherRows(const Matrix& source, const std::vector<UserPair>& pairs) {
  Matrix rows(pairs.size(), source.cols());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto src = source.row(pairs[k].first);
    std::copy(src.begin(), src.end(), rows.row(k).begin());
  }
  return rows;
}

}  // namespace

void ResetHeadGradients(const ModelState& state, HeadGradients* grads) {
  const std::size_t dim = state.dim();
  grads->interaction_agg.Reset(state.interaction_agg.rows(), dim);
  grads->social_agg.Reset(state.num_users(), dim);
  grads->transform.Reset(dim, 2 * dim);
  grads->weights.assign(dim, 0.0);
  grads->bias.assign(dim, 0.0);
}

double HingeAlignment(const std::vector<UserPair>& pairs, const ModelState& state,
                      double weight, HeadGradients* grads) {
  const std::size_t dim = state.dim();
  const double slope = state.options.leaky_slope;
  const auto& proj = state.projection;
  std::vector<double> dh(dim);
  double loss = 0.0;
  for (const auto& p : pairs) {
    const auto a_i = state.interaction_agg.row(p.first);
    const auto a_j = state.interaction_agg.row(p.second);
    const auto s_i = state.social_agg.row(p.first);
    const auto s_j = state.social_agg.row(p.second);
    const SimilarityTerms terms = EvaluateSimilarity(proj, a_i, a_j, slope);
    const double zhat = Dot(s_i, s_j);
    const double margin = 1.0 - terms.z * zhat;
    if (margin <= 0.0) continue;
    loss += margin;
    if (grads == nullptr) continue;
    // d margin / d zhat = -z, d margin / d z = -zhat.
    Axpy(-weight * terms.z, s_j, grads->social_agg.row(p.first));
    Axpy(-weight * terms.z, s_i, grads->social_agg.row(p.second));
    const double d_logit = -weight * zhat * terms.z * (1.0 - terms.z);
    Axpy(d_logit, terms.activation, grads->weights);
    for (std::size_t k = 0; k < dim; ++k) {
      const double slope_k = terms.pre_activation[k] > 0.0 ? 1.0 : slope;
      dh[k] = d_logit * proj.weights[k] * slope_k;
    }
    Axpy(1.0, dh, grads->bias);
    auto ga_i = grads->interaction_agg.row(p.first);
    auto ga_j = grads->interaction_agg.row(p.second);
    for (std::size_t k = 0; k < dim; ++k) {
      if (dh[k] == 0.0) continue;
      auto gt = grads->transform.row(k);
      Axpy(dh[k], a_i, gt.first(dim));
      Axpy(dh[k], a_j, gt.last(dim));
      const auto t_row = proj.transform.row(k);
      Axpy(dh[k], t_row.first(dim), ga_i);
      Axpy(dh[k], t_row.last(dim), ga_j);
    }
    Axpy(1.0, dh, ga_i);
    Axpy(1.0, dh, ga_j);
  }
  return loss;
}

double InfoNceAlignment(const std::vector<UserPair>& pairs,
                        const ModelState& state, double weight, double tau,
                        HeadGradients* grads) {
  const Matrix anchors = GatherRows(state.interaction_agg, pairs);
  const Matrix positives = GatherRows(state.social_agg, pairs);
  Matrix anchor_grad, positive_grad;
  const double loss = InfoNceLoss(anchors, positives, tau,
                                  grads ? &anchor_grad : nullptr,
                                  grads ? &positive_grad : nullptr);
  if (grads != nullptr) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const int u = pairs[k].first;
      Axpy(weight, anchor_grad.row(k), grads->interaction_agg.row(u));
      Axpy(weight, positive_grad.row(k), grads->social_agg.row(u));
    }
  }
  return loss;
}

namespace {

// Shared forward/backward over the batch. With grads == nullptr only the loss
// is computed.
LossBreakdown EvaluateHead(const Batch& batch, const ModelState& state,
                           const TrainConfig& config, HeadGradients* grads) {
  if (!state.encoded()) throw Error("model must be encoded before evaluating the loss");
  const LossWeights weights = EffectiveWeights(config);
  const std::size_t dim = state.dim();
  const std::size_t num_users = state.num_users();
  LossBreakdown loss;
  if (grads != nullptr) ResetHeadGradients(state, grads);

  std::vector<double> user_rep(dim), diff(dim);
  for (const auto& t : batch.rec) {
    UserRepresentation(state, t.anchor, user_rep);
    const auto pos = state.interaction_agg.row(num_users + t.positive);
    const auto neg = state.interaction_agg.row(num_users + t.negative);
    const double x = Dot(user_rep, pos) - Dot(user_rep, neg);
    loss.rec += NegLogSigmoid(x);
    if (grads == nullptr) continue;
    const double g = -Sigmoid(-x);
    for (std::size_t c = 0; c < dim; ++c) diff[c] = pos[c] - neg[c];
    Axpy(g, diff, grads->interaction_agg.row(t.anchor));
    if (state.options.fuse_social) Axpy(g, diff, grads->social_agg.row(t.anchor));
    Axpy(g, user_rep, grads->interaction_agg.row(num_users + t.positive));
    Axpy(-g, user_rep, grads->interaction_agg.row(num_users + t.negative));
  }

  if (weights.social > 0.0) {
    for (const auto& t : batch.social) {
      const auto s = state.social_agg.row(t.anchor);
      const auto sp = state.social_agg.row(t.positive);
      const auto sn = state.social_agg.row(t.negative);
      const double x = Dot(s, sp) - Dot(s, sn);
      loss.social += NegLogSigmoid(x);
      if (grads == nullptr) continue;
      const double g = -weights.social * Sigmoid(-x);
      for (std::size_t c = 0; c < dim; ++c) diff[c] = sp[c] - sn[c];
      Axpy(g, diff, grads->social_agg.row(t.anchor));
      Axpy(g, s, grads->social_agg.row(t.positive));
      Axpy(-g, s, grads->social_agg.row(t.negative));
    }
  }

  if (weights.alignment == AlignmentKind::kHinge && weights.ssl > 0.0) {
    loss.ssl = HingeAlignment(batch.ssl, state, weights.ssl, grads);
  } else if (weights.alignment == AlignmentKind::kInfoNce && weights.ssl > 0.0 &&
             !batch.ssl.empty()) {
    loss.ssl = InfoNceAlignment(batch.ssl, state, weights.ssl,
                                config.infonce_temperature, grads);
  }

  loss.reg = SquaredNorm(state.user_embeddings.values()) +
             SquaredNorm(state.item_embeddings.values());
  CheckFinite(loss.rec, "rec");
  CheckFinite(loss.social, "social");
  CheckFinite(loss.ssl, "ssl");
  CheckFinite(loss.reg, "reg");
  loss.total = loss.rec + weights.social * loss.social + weights.ssl * loss.ssl +
               weights.reg * loss.reg;
  CheckFinite(loss.total, "total");
  return loss;
}

// Sum_{l=0..L} M^l G with M = L + I; M is symmetric so this is also the
// transpose of the forward aggregation.
Matrix BackpropagateView(const NormalizedGraph& graph, const Matrix& grad,
                         int layers, double scale, int num_threads) {
  Matrix acc = grad;
  Matrix current = grad;
  Matrix next;
  for (int l = 1; l <= layers; ++l) {
    PropagateInto(graph, current, &next, num_threads);
    Axpy(1.0, next.values(), acc.values());
    std::swap(current, next);
  }
  if (scale != 1.0) {
    for (double& v : acc.values()) v *= scale;
  }
  return acc;
}

}  // namespace

LossBreakdown JointLoss(const Batch& batch, const ModelState& state,
                        const TrainConfig& config) {
  return EvaluateHead(batch, state, config, nullptr);
}

LossBreakdown ComputeHeadGradients(const Batch& batch, const ModelState& state,
                                   const TrainConfig& config,
                                   HeadGradients* grads) {
  return EvaluateHead(batch, state, config, grads);
}

std::vector<std::span<const double>> GradientSet::Spans() const {
  return {user_embeddings.values(), item_embeddings.values(), transform.values(),
          weights, bias};
}

GradientSet ComputeGradients(const Batch& batch, const ModelState& state,
                             const TrainConfig& config,
                             const NormalizedGraph& interaction_graph,
                             const NormalizedGraph& social_graph,
                             int num_threads, LossBreakdown* loss) {
  HeadGradients head;
  const LossBreakdown value = EvaluateHead(batch, state, config, &head);
  if (loss != nullptr) *loss = value;

  const int layers = state.options.layers;
  const double scale = state.options.aggregation == Aggregation::kMean
                           ? 1.0 / static_cast<double>(layers + 1)
                           : 1.0;
  const Matrix stacked =
      BackpropagateView(interaction_graph, head.interaction_agg, layers, scale,
                        num_threads);
  const Matrix social =
      BackpropagateView(social_graph, head.social_agg, layers, scale, num_threads);

  const std::size_t num_users = state.num_users();
  const std::size_t num_items = state.num_items();
  const std::size_t dim = state.dim();
  GradientSet grads;
  grads.user_embeddings.Reset(num_users, dim);
  grads.item_embeddings.Reset(num_items, dim);
  const auto stacked_values = stacked.values();
  auto gu = grads.user_embeddings.values();
  auto gv = grads.item_embeddings.values();
  std::copy(stacked_values.begin(),
            stacked_values.begin() + static_cast<std::ptrdiff_t>(num_users * dim),
            gu.begin());
  std::copy(stacked_values.begin() + static_cast<std::ptrdiff_t>(num_users * dim),
            stacked_values.end(), gv.begin());
  Axpy(1.0, social.values(), gu);

  const double reg = EffectiveWeights(config).reg;
  if (reg > 0.0) {
    Axpy(2.0 * reg, state.user_embeddings.values(), gu);
    Axpy(2.0 * reg, state.item_embeddings.values(), gv);
  }
  grads.transform = std::move(head.transform);
  grads.weights = std::move(head.weights);
  grads.bias = std::move(head.bias);
  return grads;
}

AdamState MakeAdamState(ModelState& state) {
  AdamState adam;
  for (const auto& span : ParameterSpans(state)) {
    adam.first_moment.emplace_back(span.size(), 0.0);
    adam.second_moment.emplace_back(span.size(), 0.0);
  }
  return adam;
}

void AdamStep(ModelState& state, const GradientSet& grads, AdamState& adam,
              double lr) {
  auto params = ParameterSpans(state);
  const auto gradients = grads.Spans();
  if (params.size() != adam.first_moment.size()) {
    throw Error("adam state does not match model parameters");
  }
  ++adam.step;
  const double t = static_cast<double>(adam.step);
  const double correction1 = 1.0 - std::pow(adam.beta1, t);
  const double correction2 = 1.0 - std::pow(adam.beta2, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& m = adam.first_moment[p];
    auto& v = adam.second_moment[p];
    const auto g = gradients[p];
    auto theta = params[p];
    if (g.size() != theta.size() || m.size() != theta.size()) {
      throw Error("adam: gradient shape mismatch");
    }
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = adam.beta1 * m[k] + (1.0 - adam.beta1) * g[k];
      v[k] = adam.beta2 * v[k] + (1.0 - adam.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      theta[k] -= lr * m_hat / (std::sqrt(v_hat) + adam.epsilon);
    }
  }
}

}  // namespace dslrec
