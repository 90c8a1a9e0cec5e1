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

#include "dslrec/common.h"

#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace dslrec {
namespace {

TEST(MatrixTest, StartsZeroAndIndexesRowMajor) {
  Matrix m(2, 3);
  EXPECT_EQ(m.size(), 6u);
  for (double v : m.values()) EXPECT_EQ(v, 0.0);
  m(1, 2) = 5.0;
  EXPECT_EQ(m.values()[5], 5.0);
  EXPECT_EQ(m.row(1)[2], 5.0);
}

TEST(MatrixTest, ResetZeroFills) {
  Matrix m(2, 2, 3.0);
  m.Reset(3, 1);
  EXPECT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.cols(), 1u);
  for (double v : m.values()) EXPECT_EQ(v, 0.0);
}

TEST(VectorOpsTest, DotAxpyNorm) {
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_EQ(Dot(a, b), 32.0);
  EXPECT_EQ(SquaredNorm(a), 14.0);
  Axpy(2.0, a, b);
  EXPECT_EQ(b, (std::vector<double>{6, 9, 12}));
}

TEST(AllFiniteTest, DetectsNanAndInf) {
  std::vector<double> ok{0.0, -1.0, 1e300};
  EXPECT_TRUE(AllFinite(ok));
  ok.push_back(std::numeric_limits<double>::quiet_NaN());
  EXPECT_FALSE(AllFinite(ok));
  EXPECT_FALSE(AllFinite(std::vector<double>{std::numeric_limits<double>::infinity()}));
}

TEST(ParallelForTest, CoversEveryIndexOnce) {
  for (int threads : {1, 2, 3, 8}) {
    std::vector<std::atomic<int>> hits(101);
    ParallelFor(hits.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) ++hits[k];
    });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  bool called = false;
  ParallelFor(0, 4, [&](std::size_t, std::size_t) { called = true; });
  EXPECT_FALSE(called);
}

TEST(MixSeedTest, DeterministicAndSpread) {
  EXPECT_EQ(MixSeed(1, 2), MixSeed(1, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t salt = 0; salt < 1000; ++salt) seen.insert(MixSeed(42, salt));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(MixSeed(1, 2), MixSeed(2, 1));
}

}  // namespace
}  // namespace dslrec
