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

#include <cmath>
#include <random>

#include "dslrec/checks.h"
#include "dslrec/oracle.h"
#include "gtest/gtest.h"

namespace dslrec {
namespace {

Dataset Build(int users, int items, std::vector<Interaction> train,
              std::vector<std::pair<int, int>> ties = {}) {
  Dataset ds;
  ds.num_users = users;
  ds.num_items = items;
  ds.train = std::move(train);
  for (auto [a, b] : ties) {
    ds.social.push_back({a, b});
    ds.social.push_back({b, a});
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.social.begin(), ds.social.end());
  ds.degree.assign(users, 0);
  for (const auto& e : ds.train) ++ds.degree[e.user];
  return ds;
}

struct Instance {
  Dataset ds;
  NormalizedGraph gr, gs;
  ModelState state;
};

Instance MakeInstance(std::uint64_t seed, const TrainConfig& cfg, int users = 8,
                      int items = 8) {
  std::mt19937_64 rng(seed);
  Instance in;
  in.ds = oracle::RandomDataset(rng, users, items, 0.4, 0.4);
  in.gr = BuildInteractionLaplacian(in.ds);
  in.gs = BuildSocialLaplacian(in.ds);
  in.state = InitModel(users, items, cfg.dim, seed + 1, cfg.ToModelOptions());
  Encode(in.state, in.gr, in.gs);
  return in;
}

Matrix RandomRows(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(n, d);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

TEST(TrainConfigTest, ValidatesRanges) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(c.Validate(), Error);
  };
  bad([](TrainConfig& c) { c.lambda_social = -1; });
  bad([](TrainConfig& c) { c.lr_decay = 0.0; });
  bad([](TrainConfig& c) { c.lr_decay = 1.5; });
  bad([](TrainConfig& c) { c.batch_size = 0; });
  bad([](TrainConfig& c) { c.infonce_temperature = 0.0; });
}

TEST(VariantTest, EffectiveWeights) {
  TrainConfig cfg;
  cfg.lambda_social = 0.3;
  cfg.lambda_ssl = 0.2;
  cfg.lambda_reg = 0.1;
  cfg.variant = Variant::kFull;
  auto w = EffectiveWeights(cfg);
  EXPECT_EQ(w.social, 0.3);
  EXPECT_EQ(w.ssl, 0.2);
  EXPECT_EQ(w.alignment, AlignmentKind::kHinge);
  cfg.variant = Variant::kNoDenoise;
  w = EffectiveWeights(cfg);
  EXPECT_EQ(w.social, 0.3);
  EXPECT_EQ(w.ssl, 0.0);
  cfg.variant = Variant::kNoSsl;
  w = EffectiveWeights(cfg);
  EXPECT_EQ(w.social, 0.0);
  EXPECT_EQ(w.ssl, 0.0);
  EXPECT_TRUE(cfg.ToModelOptions().fuse_social);
  cfg.variant = Variant::kContrastive;
  w = EffectiveWeights(cfg);
  EXPECT_EQ(w.ssl, 0.2);
  EXPECT_EQ(w.alignment, AlignmentKind::kInfoNce);
  EXPECT_EQ(w.reg, 0.1);
  for (Variant v : AllVariants()) EXPECT_EQ(ParseVariant(VariantName(v)), v);
  EXPECT_THROW(ParseVariant("dsl_x"), Error);
}

TEST(SampleBatchTest, OnlyNegativeIsTheOtherItem) {
  const auto ds = Build(1, 2, {{0, 0}});
  const SamplingIndex index(ds);
  std::mt19937_64 rng(1);
  const Batch batch = SampleBatch(index, 50, rng);
  for (const auto& t : batch.rec) {
    EXPECT_EQ(t.positive, 0);
    EXPECT_EQ(t.negative, 1);
  }
  EXPECT_TRUE(batch.social.empty());
}

TEST(SampleBatchTest, SizesAndValidity) {
  std::mt19937_64 rng(2);
  const auto ds = oracle::RandomDataset(rng, 12, 10, 0.3, 0.3);
  const SamplingIndex index(ds);
  const Batch batch = SampleBatch(index, 4, rng);
  EXPECT_EQ(batch.rec.size(), 4u);
  EXPECT_EQ(batch.social.size(), 4u);
  EXPECT_EQ(batch.ssl.size(), 4u);
  for (int k = 0; k < 500; ++k) {
    const Batch b = SampleBatch(index, 8, rng);
    for (const auto& t : b.rec) {
      EXPECT_TRUE(index.Interacted(t.anchor, t.positive));
      EXPECT_FALSE(index.Interacted(t.anchor, t.negative));
    }
    for (const auto& t : b.social) {
      EXPECT_TRUE(index.Tied(t.anchor, t.positive));
      EXPECT_FALSE(index.Tied(t.anchor, t.negative));
      EXPECT_NE(t.anchor, t.negative);
    }
  }
}

TEST(SampleBatchTest, SaturatedUserIsFatal) {
  const SamplingIndex index(Build(1, 2, {{0, 0}, {0, 1}}));
  std::mt19937_64 rng(3);
  EXPECT_THROW(SampleBatch(index, 1, rng), Error);
  const SamplingIndex empty(Build(2, 2, {}));
  EXPECT_THROW(SampleBatch(empty, 1, rng), Error);
}

TEST(SampleBatchTest, NegativesAreUniform) {
  // User 0 holds items 0..2 of 10, so the 7 others should be equally likely.
  const auto ds = Build(1, 10, {{0, 0}, {0, 1}, {0, 2}});
  const SamplingIndex index(ds);
  std::mt19937_64 rng(4);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  const Batch batch = SampleBatch(index, draws, rng);
  for (const auto& t : batch.rec) ++counts[t.negative];
  for (int i = 0; i < 3; ++i) EXPECT_EQ(counts[i], 0);
  const double expected = draws / 7.0;
  double chi2 = 0.0;
  for (int i = 3; i < 10; ++i) chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
  // 99th percentile of chi-square with 6 degrees of freedom.
  EXPECT_LT(chi2, 16.812);
}

TEST(BprLossTest, KnownValues) {
  const std::vector<double> same = {0.3, -2.0, 5.0};
  EXPECT_NEAR(BprLoss(same, same), 3 * std::log(2.0), 1e-15);
  const double big[] = {40.0}, zero[] = {0.0};
  EXPECT_GE(BprLoss(big, zero), 0.0);
  EXPECT_LT(BprLoss(big, zero), 1e-17);
  const double huge[] = {-1000.0};
  EXPECT_NEAR(BprLoss(huge, zero), 1000.0, 1e-12);
  EXPECT_THROW(BprLoss(same, std::vector<double>{1.0}), Error);
}

TEST(BprLossTest, MatchesNaiveFormula) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double p = u(rng), n = u(rng);
    const double naive = -std::log(1.0 / (1.0 + std::exp(-(p - n))));
    EXPECT_NEAR(BprLoss(std::span(&p, 1), std::span(&n, 1)), naive, 1e-10);
  }
}

TEST(SslHingeLossTest, KnownValues) {
  EXPECT_EQ(SslHingeLoss(std::vector<double>{1.0}, std::vector<double>{1.0}), 0.0);
  EXPECT_EQ(SslHingeLoss(std::vector<double>{0.5}, std::vector<double>{0.0}), 1.0);
  EXPECT_EQ(SslHingeLoss(std::vector<double>{0.8}, std::vector<double>{2.0}), 0.0);
  EXPECT_NEAR(SslHingeLoss(std::vector<double>{0.5, 0.8}, std::vector<double>{1.0, 2.0}),
              0.5, 1e-15);
}

TEST(InfoNceLossTest, ClosedFormAndSingleRow) {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 3.0;
  EXPECT_NEAR(InfoNceLoss(a, a, 1.0), -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0)),
              1e-15);
  EXPECT_NEAR(InfoNceLoss(a, a, 1.0), 0.3133, 5e-5);
  Matrix one(1, 3, 0.7), other(1, 3, -0.2);
  EXPECT_EQ(InfoNceLoss(one, other, 0.1), 0.0);
  Matrix zero_row(2, 2);
  zero_row(0, 0) = 1.0;
  EXPECT_THROW(InfoNceLoss(zero_row, a, 1.0), Error);
}

TEST(InfoNceLossTest, MatchesSoftmaxAndFiniteDifferences) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 5, d = 3;
    Matrix anchors = RandomRows(n, d, rng), positives = RandomRows(n, d, rng);
    const double tau = 0.1 + 0.2 * trial;
    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double denom = 0.0, own = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double cos = Dot(anchors.row(i), positives.row(k)) /
                           std::sqrt(SquaredNorm(anchors.row(i)) * SquaredNorm(positives.row(k)));
        denom += std::exp(cos / tau);
        if (k == i) own = std::exp(cos / tau);
      }
      expected -= std::log(own / denom);
    }
    expected /= static_cast<double>(n);
    Matrix ga, gp;
    EXPECT_NEAR(InfoNceLoss(anchors, positives, tau, &ga, &gp), expected, 1e-10);
    const auto na = oracle::FiniteDifference(
        [&] { return InfoNceLoss(anchors, positives, tau); }, anchors.values(), 1e-6);
    const auto np = oracle::FiniteDifference(
        [&] { return InfoNceLoss(anchors, positives, tau); }, positives.values(), 1e-6);
    for (std::size_t k = 0; k < na.size(); ++k) {
      EXPECT_NEAR(ga.values()[k], na[k], 1e-6 * std::max(1.0, std::abs(na[k])));
      EXPECT_NEAR(gp.values()[k], np[k], 1e-6 * std::max(1.0, std::abs(np[k])));
    }
  }
}

TEST(JointLossTest, WeightsAndRegularizer) {
  TrainConfig cfg;
  cfg.dim = 3;
  cfg.lambda_social = cfg.lambda_ssl = cfg.lambda_reg = 0.0;
  Instance in = MakeInstance(10, cfg);
  std::mt19937_64 rng(1);
  const Batch batch = SampleBatch(SamplingIndex(in.ds), 6, rng);
  const auto loss = JointLoss(batch, in.state, cfg);
  EXPECT_EQ(loss.total, loss.rec);

  cfg.lambda_reg = 1.0;
  in.state.user_embeddings.SetZero();
  in.state.item_embeddings.SetZero();
  Encode(in.state, in.gr, in.gs);
  const auto zero = JointLoss(batch, in.state, cfg);
  EXPECT_EQ(zero.reg, 0.0);
  EXPECT_NEAR(zero.total, 6 * std::log(2.0), 1e-12);
}

TEST(JointLossTest, MatchesReferenceForEveryVariant) {
  for (Variant v : AllVariants()) {
    for (int layers = 0; layers <= 2; ++layers) {
      TrainConfig cfg;
      cfg.dim = 4;
      cfg.layers = layers;
      cfg.variant = v;
      cfg.lambda_social = 0.5;
      cfg.lambda_ssl = 0.7;
      cfg.lambda_reg = 0.05;
      Instance in = MakeInstance(20 + layers, cfg);
      std::mt19937_64 rng(layers);
      const Batch batch = SampleBatch(SamplingIndex(in.ds), 5, rng);
      const double reference = oracle::ReferenceJointLoss(in.ds, in.state, batch, cfg);
      EXPECT_NEAR(JointLoss(batch, in.state, cfg).total, reference,
                  1e-10 * std::max(1.0, std::abs(reference)))
          << VariantName(v) << " L=" << layers;
    }
  }
}

TEST(JointLossTest, RequiresEncodedModel) {
  TrainConfig cfg;
  cfg.dim = 2;
  const ModelState raw = InitModel(3, 3, 2, 1);
  EXPECT_THROW(JointLoss(Batch{}, raw, cfg), Error);
}

TEST(GradientTest, ZeroWeightsAndEmptyBatch) {
  TrainConfig cfg;
  cfg.dim = 3;
  cfg.lambda_social = cfg.lambda_ssl = cfg.lambda_reg = 0.0;
  const Instance in = MakeInstance(30, cfg);
  const GradientSet g = ComputeGradients(Batch{}, in.state, cfg, in.gr, in.gs);
  for (const auto& span : g.Spans()) {
    for (double v : span) EXPECT_EQ(v, 0.0);
  }
}

TEST(GradientTest, SingleTripleWithoutPropagation) {
  TrainConfig cfg;
  cfg.dim = 3;
  cfg.layers = 0;
  cfg.lambda_social = cfg.lambda_ssl = cfg.lambda_reg = 0.0;
  const Instance in = MakeInstance(31, cfg);
  const SamplingIndex index(in.ds);
  std::mt19937_64 rng(7);
  Batch batch = SampleBatch(index, 1, rng);
  const auto [u, vp, vn] = batch.rec[0];
  const auto& s = in.state;
  const double x = Dot(s.user_embeddings.row(u), s.item_embeddings.row(vp)) -
                   Dot(s.user_embeddings.row(u), s.item_embeddings.row(vn));
  const GradientSet g = ComputeGradients(batch, s, cfg, in.gr, in.gs);
  for (int k = 0; k < 3; ++k) {
    const double expected =
        -Sigmoid(-x) * (s.item_embeddings(vp, k) - s.item_embeddings(vn, k));
    EXPECT_NEAR(g.user_embeddings(u, k), expected, 1e-14);
  }
  for (int other = 0; other < s.num_users(); ++other) {
    if (other == u) continue;
    for (int k = 0; k < 3; ++k) EXPECT_EQ(g.user_embeddings(other, k), 0.0);
  }
}

TEST(GradientTest, SatisfiedHingeContributesNothing) {
  TrainConfig cfg;
  cfg.dim = 3;
  ModelState state = MakeInstance(32, cfg).state;
  // Large social rows push z * zhat well above 1 for every pair.
  for (std::size_t r = 0; r < state.social_agg.rows(); ++r) {
    for (double& v : state.social_agg.row(r)) v = 10.0;
  }
  HeadGradients grads;
  ResetHeadGradients(state, &grads);
  const std::vector<UserPair> pairs = {{0, 1}, {2, 3}, {4, 4}};
  EXPECT_EQ(HingeAlignment(pairs, state, 1.0, &grads), 0.0);
  for (double v : grads.social_agg.values()) EXPECT_EQ(v, 0.0);
  for (double v : grads.interaction_agg.values()) EXPECT_EQ(v, 0.0);
  for (double v : grads.transform.values()) EXPECT_EQ(v, 0.0);
  for (double v : grads.weights) EXPECT_EQ(v, 0.0);
}

TEST(GradientTest, SocialSideOfHingeIsWeightedNeighborSum) {
  TrainConfig cfg;
  cfg.dim = 4;
  ModelState state = MakeInstance(33, cfg).state;
  for (double& v : state.social_agg.values()) v *= 0.1;
  const std::vector<UserPair> pairs = {{0, 1}, {0, 2}, {3, 1}};
  HeadGradients grads;
  ResetHeadGradients(state, &grads);
  HingeAlignment(pairs, state, 1.0, &grads);
  Matrix expected(state.num_users(), 4);
  for (const auto& p : pairs) {
    const double z = InteractionSimilarity(state, p.first, p.second);
    ASSERT_LT(z * SocialSimilarity(state, p.first, p.second), 1.0);
    Axpy(-z, state.social_agg.row(p.second), expected.row(p.first));
    Axpy(-z, state.social_agg.row(p.first), expected.row(p.second));
  }
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_NEAR(grads.social_agg.values()[k], expected.values()[k], 1e-14);
  }
}

TEST(GradientTest, AgreesWithFiniteDifferences) {
  oracle::GradientCheckOptions options;
  options.instances = 8;
  options.seed = 99;
  const auto result = oracle::CheckGradients(options);
  EXPECT_TRUE(result.passed) << result.detail;
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  ModelState state = InitModel(2, 3, 2, 4);
  const ModelState before = state;
  GradientSet zero;
  zero.user_embeddings = Matrix(2, 2);
  zero.item_embeddings = Matrix(3, 2);
  zero.transform = Matrix(2, 4);
  zero.weights.assign(2, 0.0);
  zero.bias.assign(2, 0.0);
  AdamState adam = MakeAdamState(state);
  for (int k = 0; k < 5; ++k) AdamStep(state, zero, adam, 0.1);
  EXPECT_EQ(state.user_embeddings, before.user_embeddings);
  EXPECT_EQ(state.projection.transform, before.projection.transform);
  EXPECT_EQ(adam.step, 5);
}

GradientSet Constant(const ModelState& s, double g) {
  GradientSet out;
  out.user_embeddings = Matrix(s.user_embeddings.rows(), s.dim(), g);
  out.item_embeddings = Matrix(s.item_embeddings.rows(), s.dim(), g);
  out.transform = Matrix(s.dim(), 2 * s.dim(), g);
  out.weights.assign(s.dim(), g);
  out.bias.assign(s.dim(), g);
  return out;
}

TEST(AdamTest, ConstantGradientStepsApproachLearningRate) {
  ModelState state = InitModel(1, 1, 2, 5);
  AdamState adam = MakeAdamState(state);
  const double lr = 0.01;
  double previous = state.user_embeddings(0, 0);
  for (int k = 0; k < 200; ++k) {
    AdamStep(state, Constant(state, -3.0), adam, lr);
    const double step = state.user_embeddings(0, 0) - previous;
    previous = state.user_embeddings(0, 0);
    EXPECT_GT(step, 0.0);
    EXPECT_NEAR(step, lr, 1e-7);
  }
}

TEST(AdamTest, MatchesScalarTraceOnQuadratic) {
  ModelState state = InitModel(1, 1, 1, 6);
  state.user_embeddings(0, 0) = 1.5;
  AdamState adam = MakeAdamState(state);
  double x = 1.5, m = 0.0, v = 0.0;
  const double lr = 0.1;
  for (int t = 1; t <= 3; ++t) {
    // f(x) = x^2 on the user coordinate only.
    GradientSet g = Constant(state, 0.0);
    g.user_embeddings(0, 0) = 2.0 * state.user_embeddings(0, 0);
    AdamStep(state, g, adam, lr);
    const double grad = 2.0 * x;
    m = 0.9 * m + 0.1 * grad;
    v = 0.999 * v + 0.001 * grad * grad;
    x -= lr * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    EXPECT_NEAR(state.user_embeddings(0, 0), x, 1e-12) << "step " << t;
  }
}

TEST(AdamTest, TwoHundredStepsHalveTheLoss) {
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.lambda_social = 0.1;
  cfg.lambda_ssl = 0.1;
  cfg.lambda_reg = 1e-4;
  Instance in = MakeInstance(40, cfg);
  std::mt19937_64 rng(8);
  const Batch batch = SampleBatch(SamplingIndex(in.ds), 16, rng);
  const double initial = JointLoss(batch, in.state, cfg).total;
  AdamState adam = MakeAdamState(in.state);
  for (int step = 0; step < 200; ++step) {
    const GradientSet g = ComputeGradients(batch, in.state, cfg, in.gr, in.gs);
    AdamStep(in.state, g, adam, 0.01);
    Encode(in.state, in.gr, in.gs);
  }
  EXPECT_LE(JointLoss(batch, in.state, cfg).total, 0.5 * initial);
}

TEST(GradientTest, ThreadCountDoesNotChangeGradients) {
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.lambda_ssl = 0.5;
  const Instance in = MakeInstance(41, cfg, 30, 25);
  std::mt19937_64 rng(9);
  const Batch batch = SampleBatch(SamplingIndex(in.ds), 32, rng);
  const GradientSet one = ComputeGradients(batch, in.state, cfg, in.gr, in.gs, 1);
  const GradientSet four = ComputeGradients(batch, in.state, cfg, in.gr, in.gs, 4);
  EXPECT_EQ(one.user_embeddings, four.user_embeddings);
  EXPECT_EQ(one.item_embeddings, four.item_embeddings);
  EXPECT_EQ(one.transform, four.transform);
}

}  // namespace
}  // namespace dslrec
