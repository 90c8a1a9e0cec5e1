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

#ifndef DSLREC_GRAPH_H_
#define DSLREC_GRAPH_H_

#include <cstdint>
#include <vector>

#include "dslrec/common.h"
#include "dslrec/data.h"

namespace dslrec {

// Compressed sparse rows. Column indices are sorted within each row.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_offsets;  // rows + 1 entries
  std::vector<int> col_indices;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  // Value at (r, c), or 0 when the entry is not stored.
  double At(int r, int c) const;
  bool IsSymmetric() const;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Duplicate (row, col) entries are rejected.
SparseMatrix SparseFromTriplets(int rows, int cols,
                                std::vector<Triplet> triplets);

enum class View { kInteraction, kSocial };

// Symmetric-normalized adjacency D^-1/2 A D^-1/2. The self-loop of the
// propagation rule is applied by Propagate, not stored here.
struct NormalizedGraph {
  View view = View::kInteraction;
  SparseMatrix laplacian;

  int size() const { return laplacian.rows; }
};

// (I+J) x (I+J) bipartite block matrix over train edges; items are offset by
// num_users.
NormalizedGraph BuildInteractionLaplacian(const Dataset& dataset);

// I x I matrix over the (symmetric) social ties.
NormalizedGraph BuildSocialLaplacian(const Dataset& dataset);

// out = (L + I) * in. `out` is resized; it must not alias `in`.
void PropagateInto(const NormalizedGraph& graph, const Matrix& in, Matrix* out,
                   int num_threads = 1);
Matrix Propagate(const NormalizedGraph& graph, const Matrix& embeddings,
                 int num_threads = 1);

}  // namespace dslrec

#endif  // DSLREC_GRAPH_H_
