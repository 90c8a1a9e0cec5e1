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

#include "dslrec/graph.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace dslrec {

double SparseMatrix::At(int r, int c) const {
  const auto begin = col_indices.begin() + row_offsets[r];
  const auto end = col_indices.begin() + row_offsets[r + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

bool SparseMatrix::IsSymmetric() const {
  if (rows != cols) return false;
  for (int r = 0; r < rows; ++r) {
    for (auto k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      if (At(col_indices[k], r) != values[k]) return false;
    }
  }
  return true;
}

SparseMatrix SparseFromTriplets(int rows, int cols,
                                std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.col_indices.reserve(triplets.size());
  m.values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw Error("sparse entry out of range");
    }
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      throw Error("duplicate sparse entry (" + std::to_string(t.row) + ", " +
                  std::to_string(t.col) + ")");
    }
    ++m.row_offsets[static_cast<std::size_t>(t.row) + 1];
    m.col_indices.push_back(t.col);
    m.values.push_back(t.value);
  }
  for (int r = 0; r < rows; ++r) m.row_offsets[r + 1] += m.row_offsets[r];
  return m;
}

namespace {

double NormalizedWeight(int degree_a, int degree_b) {
  return 1.0 / std::sqrt(static_cast<double>(degree_a) *
                         static_cast<double>(degree_b));
}

}  // namespace

NormalizedGraph BuildInteractionLaplacian(const Dataset& dataset) {
  const int num_users = dataset.num_users;
  const int n = num_users + dataset.num_items;
  std::vector<int> degree(n, 0);
  for (const auto& e : dataset.train) {
    ++degree[e.user];
    ++degree[num_users + e.item];
  }
  std::vector<Triplet> triplets;
  triplets.reserve(dataset.train.size() * 2);
  for (const auto& e : dataset.train) {
    const int item_node = num_users + e.item;
    const double w = NormalizedWeight(degree[e.user], degree[item_node]);
    triplets.push_back({e.user, item_node, w});
    triplets.push_back({item_node, e.user, w});
  }
  return {View::kInteraction, SparseFromTriplets(n, n, std::move(triplets))};
}

NormalizedGraph BuildSocialLaplacian(const Dataset& dataset) {
  const int n = dataset.num_users;
  std::vector<int> degree(n, 0);
  for (const auto& e : dataset.social) ++degree[e.from];
  std::vector<Triplet> triplets;
  triplets.reserve(dataset.social.size());
  for (const auto& e : dataset.social) {
    triplets.push_back({e.from, e.to, NormalizedWeight(degree[e.from], degree[e.to])});
  }
  NormalizedGraph graph{View::kSocial, SparseFromTriplets(n, n, std::move(triplets))};
  return graph;
}

void PropagateInto(const NormalizedGraph& graph, const Matrix& in, Matrix* out,
                   int num_threads) {
  const auto& lap = graph.laplacian;
  if (in.rows() != static_cast<std::size_t>(lap.rows)) {
    throw Error("propagate: embedding rows " + std::to_string(in.rows()) +
                " != graph size " + std::to_string(lap.rows));
  }
  const std::size_t dim = in.cols();
  if (out->rows() != in.rows() || out->cols() != dim) out->Reset(in.rows(), dim);
  ParallelFor(in.rows(), num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto dst = out->row(r);
      const auto self = in.row(r);
      std::copy(self.begin(), self.end(), dst.begin());
      for (auto k = lap.row_offsets[r]; k < lap.row_offsets[r + 1]; ++k) {
        Axpy(lap.values[k], in.row(lap.col_indices[k]), dst);
      }
    }
  });
}

Matrix Propagate(const NormalizedGraph& graph, const Matrix& embeddings,
                 int num_threads) {
  Matrix out;
  PropagateInto(graph, embeddings, &out, num_threads);
  return out;
}

}  // namespace dslrec
