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

#ifndef DSLREC_TRAINER_H_
#define DSLREC_TRAINER_H_

#include <filesystem>
#include <ostream>
#include <vector>

#include "dslrec/data.h"
#include "dslrec/eval.h"
#include "dslrec/model.h"
#include "dslrec/objective.h"

namespace dslrec {

// Raised when a loss term or a parameter stops being finite. The best
// checkpoint written so far (if any) is left in place.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

struct FitOptions {
  int num_threads = 1;
  // Validation protocol. `split` is forced to kValidation.
  EvalOptions validation;
  int monitor_cutoff = 10;
  // When set, the best parameters are saved here every time they improve.
  std::filesystem::path checkpoint_dir;
  // Optional progress stream, one line per epoch.
  std::ostream* log = nullptr;
};

struct EpochLog {
  int epoch = 0;  // 0 is the untrained model
  double lr = 0.0;
  int batches = 0;
  LossBreakdown loss;  // mean over the epoch's batches
  double val_hr = 0.0;
  double val_ndcg = 0.0;
  double seconds = 0.0;
};

struct FitResult {
  ModelState model;  // best parameters, encoded
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  double best_val_hr = 0.0;
  bool stopped_early = false;
};

// Adam on the joint loss with lr * decay^(epoch-1) in epoch `epoch`, one
// epoch being ceil(|train| / batch_size) sampled batches. Keeps the
// parameters with the best validation HR@monitor_cutoff; stops after
// `patience` epochs without improvement. Without validation users every
// epoch counts as an improvement.
FitResult Fit(const Dataset& dataset, const TrainConfig& config,
              const FitOptions& options);

void WriteEpochTable(std::ostream& out, const std::vector<EpochLog>& epochs);

}  // namespace dslrec

#endif  // DSLREC_TRAINER_H_
