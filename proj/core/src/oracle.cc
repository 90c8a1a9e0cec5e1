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

#include "dslrec/oracle.h"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace dslrec::oracle {
namespace {

Matrix Normalize(const Matrix& adjacency) {
  const std::size_t n = adjacency.rows();
  std::vector<double> degree(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) degree[r] += adjacency(r, c);
  }
  Matrix inv_sqrt(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    inv_sqrt(r, r) = degree[r] > 0.0 ? 1.0 / std::sqrt(degree[r]) : 0.0;
  }
  return MatMul(MatMul(inv_sqrt, adjacency), inv_sqrt);
}

Matrix Stack(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t r = 0; r < top.rows(); ++r) {
    for (std::size_t c = 0; c < top.cols(); ++c) out(r, c) = top(r, c);
  }
  for (std::size_t r = 0; r < bottom.rows(); ++r) {
    for (std::size_t c = 0; c < bottom.cols(); ++c) out(top.rows() + r, c) = bottom(r, c);
  }
  return out;
}

std::vector<Matrix> Layers(const Matrix& laplacian, const Matrix& input, int layers) {
  const Matrix step = Add(laplacian, Identity(laplacian.rows()));
  std::vector<Matrix> out;
  Matrix power = Identity(laplacian.rows());
  for (int l = 0; l <= layers; ++l) {
    out.push_back(MatMul(power, input));
    power = MatMul(power, step);
  }
  return out;
}

Matrix Aggregate(const std::vector<Matrix>& layers, Aggregation aggregation) {
  Matrix sum = layers.front();
  for (std::size_t l = 1; l < layers.size(); ++l) sum = Add(sum, layers[l]);
  if (aggregation == Aggregation::kMean) {
    for (double& v : sum.values()) v /= static_cast<double>(layers.size());
  }
  return sum;
}

double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

std::vector<double> RowOf(const Matrix& m, std::size_t r) {
  return std::vector<double>(m.row(r).begin(), m.row(r).end());
}

double Cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace

Matrix Identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
  return m;
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error("matmul shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(r, k) * b(k, c);
      out(r, c) = sum;
    }
  }
  return out;
}

Matrix Add(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("add shape mismatch");
  Matrix out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out.values()[k] += b.values()[k];
  return out;
}

DenseGraphs BuildDenseGraphs(const Dataset& dataset) {
  const int nodes = dataset.num_users + dataset.num_items;
  if (nodes > kMaxDenseNodes) {
    throw Error("dense reference limited to " + std::to_string(kMaxDenseNodes) +
                " nodes, got " + std::to_string(nodes));
  }
  DenseGraphs g;
  g.interaction_adjacency = Matrix(nodes, nodes);
  for (const auto& e : dataset.train) {
    const int item_node = dataset.num_users + e.item;
    g.interaction_adjacency(e.user, item_node) = 1.0;
    g.interaction_adjacency(item_node, e.user) = 1.0;
  }
  g.social_adjacency = Matrix(dataset.num_users, dataset.num_users);
  for (const auto& e : dataset.social) g.social_adjacency(e.from, e.to) = 1.0;
  g.interaction_laplacian = Normalize(g.interaction_adjacency);
  g.social_laplacian = Normalize(g.social_adjacency);
  return g;
}

DenseForward DenseForwardPass(const Dataset& dataset, const Matrix& user_embeddings,
                              const Matrix& item_embeddings, int layers,
                              Aggregation aggregation) {
  const DenseGraphs g = BuildDenseGraphs(dataset);
  DenseForward f;
  f.interaction_layers =
      Layers(g.interaction_laplacian, Stack(user_embeddings, item_embeddings), layers);
  f.social_layers = Layers(g.social_laplacian, user_embeddings, layers);
  f.interaction_agg = Aggregate(f.interaction_layers, aggregation);
  f.social_agg = Aggregate(f.social_layers, aggregation);
  return f;
}

std::vector<double> FiniteDifference(const std::function<double()>& loss,
                                     std::span<double> params, double step) {
  std::vector<double> grad(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + step;
    const double up = loss();
    params[k] = saved - step;
    const double down = loss();
    params[k] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw Error("non-finite loss while probing coordinate " + std::to_string(k));
    }
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

double ReferenceSimilarity(const ProjectionParams& p, std::span<const double> a,
                           std::span<const double> b, double leaky_slope) {
  const std::size_t d = a.size();
  double logit = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    double h = a[r] + b[r] + p.bias[r];
    for (std::size_t c = 0; c < d; ++c) {
      h += p.transform(r, c) * a[c] + p.transform(r, d + c) * b[c];
    }
    const double act = h > 0 ? h : leaky_slope * h;
    logit += p.weights[r] * act;
  }
  return 1.0 / (1.0 + std::exp(-logit));
}

double ReferenceJointLoss(const Dataset& dataset, const ModelState& state,
                          const Batch& batch, const TrainConfig& config) {
  const auto f =
      DenseForwardPass(dataset, state.user_embeddings, state.item_embeddings,
                       state.options.layers, state.options.aggregation);
  const int users = dataset.num_users;
  const std::size_t d = state.dim();

  double rec = 0.0;
  for (const auto& t : batch.rec) {
    auto u = RowOf(f.interaction_agg, t.anchor);
    if (state.options.fuse_social) {
      for (std::size_t k = 0; k < d; ++k) u[k] += f.social_agg(t.anchor, k);
    }
    double pos = 0.0, neg = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      pos += u[k] * f.interaction_agg(users + t.positive, k);
      neg += u[k] * f.interaction_agg(users + t.negative, k);
    }
    rec += Softplus(neg - pos);
  }

  double social = 0.0;
  for (const auto& t : batch.social) {
    double pos = 0.0, neg = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      pos += f.social_agg(t.anchor, k) * f.social_agg(t.positive, k);
      neg += f.social_agg(t.anchor, k) * f.social_agg(t.negative, k);
    }
    social += Softplus(neg - pos);
  }

  double hinge = 0.0;
  for (const auto& p : batch.ssl) {
    const double z = ReferenceSimilarity(state.projection,
                                         f.interaction_agg.row(p.first),
                                         f.interaction_agg.row(p.second),
                                         state.options.leaky_slope);
    double zhat = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      zhat += f.social_agg(p.first, k) * f.social_agg(p.second, k);
    }
    hinge += std::max(0.0, 1.0 - z * zhat);
  }

  double infonce = 0.0;
  if (!batch.ssl.empty()) {
    const double tau = config.infonce_temperature;
    for (const auto& anchor_pair : batch.ssl) {
      const auto anchor = RowOf(f.interaction_agg, anchor_pair.first);
      double denom = 0.0;
      for (const auto& other : batch.ssl) {
        denom += std::exp(Cosine(anchor, RowOf(f.social_agg, other.first)) / tau);
      }
      const double numer =
          std::exp(Cosine(anchor, RowOf(f.social_agg, anchor_pair.first)) / tau);
      infonce -= std::log(numer / denom);
    }
    infonce /= static_cast<double>(batch.ssl.size());
  }

  double reg = 0.0;
  for (double v : state.user_embeddings.values()) reg += v * v;
  for (double v : state.item_embeddings.values()) reg += v * v;

  double lambda_social = config.lambda_social;
  double lambda_ssl = config.lambda_ssl;
  double alignment = hinge;
  switch (config.variant) {
    case Variant::kFull:
      break;
    case Variant::kNoDenoise:
      lambda_ssl = 0.0;
      break;
    case Variant::kNoSsl:
      lambda_social = 0.0;
      lambda_ssl = 0.0;
      break;
    case Variant::kContrastive:
      alignment = infonce;
      break;
  }
  return rec + lambda_social * social + lambda_ssl * alignment +
         config.lambda_reg * reg;
}

int BruteForceRank(double positive_score, int positive_item,
                   const std::vector<double>& negative_scores,
                   const std::vector<int>& negative_items) {
  std::vector<std::tuple<double, int>> all;
  all.emplace_back(-positive_score, positive_item);
  for (std::size_t k = 0; k < negative_scores.size(); ++k) {
    all.emplace_back(-negative_scores[k], negative_items[k]);
  }
  std::sort(all.begin(), all.end());
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (std::get<1>(all[k]) == positive_item) return static_cast<int>(k);
  }
  throw Error("positive item lost during sort");
}

}  // namespace dslrec::oracle
