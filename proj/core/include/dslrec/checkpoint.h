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

// Checkpoint directory:
//   shape    text, "num_users=I", "num_items=J", "dim=d", "layers=L"
//   E_u E_v T w c
//            raw little-endian float64 arrays, row-major
//   config   the training settings the parameters came from

#ifndef DSLREC_CHECKPOINT_H_
#define DSLREC_CHECKPOINT_H_

#include <filesystem>

#include "dslrec/model.h"
#include "dslrec/objective.h"

namespace dslrec {

void SaveCheckpoint(const std::filesystem::path& dir, const ModelState& state,
                    const TrainConfig& config);

struct Checkpoint {
  ModelState state;  // parameters only; call Encode before scoring
  TrainConfig config;
};

Checkpoint LoadCheckpoint(const std::filesystem::path& dir);

}  // namespace dslrec

#endif  // DSLREC_CHECKPOINT_H_
