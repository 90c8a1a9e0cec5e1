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

#include "dslrec/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>

#include "dslrec/checkpoint.h"
#include "dslrec/graph.h"

namespace dslrec {
namespace {

struct Snapshot {
  Matrix user_embeddings;
  Matrix item_embeddings;
  ProjectionParams projection;

  static Snapshot Of(const ModelState& s) {
    return {s.user_embeddings, s.item_embeddings, s.projection};
  }
  void RestoreInto(ModelState& s) const {
    s.user_embeddings = user_embeddings;
    s.item_embeddings = item_embeddings;
    s.projection = projection;
  }
};

bool ParametersFinite(ModelState& state) {
  for (auto span : ParameterSpans(state)) {
    if (!AllFinite(span)) return false;
  }
  return true;
}

void LogEpoch(std::ostream* out, const EpochLog& e, int cutoff) {
  if (out == nullptr) return;
  *out << "epoch " << e.epoch << " lr " << e.lr << " loss " << e.loss.total
       << " rec " << e.loss.rec << " social " << e.loss.social << " ssl "
       << e.loss.ssl << " val HR@" << cutoff << ' ' << e.val_hr << " NDCG@"
       << cutoff << ' ' << e.val_ndcg << " (" << e.seconds << "s)" << std::endl;
}

}  // namespace

FitResult Fit(const Dataset& dataset, const TrainConfig& config,
              const FitOptions& options) {
  config.Validate();
  const auto interaction_graph = BuildInteractionLaplacian(dataset);
  const auto social_graph = BuildSocialLaplacian(dataset);
  const SamplingIndex index(dataset);
  const int threads = options.num_threads;

  FitResult result;
  ModelState& model = result.model;
  model = InitModel(dataset.num_users, dataset.num_items, config.dim, config.seed,
                    config.ToModelOptions());
  Encode(model, interaction_graph, social_graph, threads);

  EvalOptions val_options = options.validation;
  val_options.split = Split::kValidation;
  val_options.num_threads = threads;
  if (std::find(val_options.cutoffs.begin(), val_options.cutoffs.end(),
                options.monitor_cutoff) == val_options.cutoffs.end()) {
    val_options.cutoffs.push_back(options.monitor_cutoff);
  }
  const bool has_validation = !dataset.val.empty();
  auto validate = [&](EpochLog& log) {
    if (!has_validation) return;
    const auto report = Evaluate(model, dataset, val_options);
    log.val_hr = report.HitRatio(options.monitor_cutoff);
    log.val_ndcg = report.Ndcg(options.monitor_cutoff);
  };

  using Clock = std::chrono::steady_clock;
  {
    const auto start = Clock::now();
    EpochLog log;
    log.lr = config.lr;
    validate(log);
    log.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.epochs.push_back(log);
    LogEpoch(options.log, log, options.monitor_cutoff);
  }
  result.best_val_hr = result.epochs.back().val_hr;
  Snapshot best = Snapshot::Of(model);
  if (!options.checkpoint_dir.empty()) {
    SaveCheckpoint(options.checkpoint_dir, model, config);
  }

  std::mt19937_64 rng(MixSeed(config.seed, 0x5eed));
  AdamState adam = MakeAdamState(model);
  const std::size_t train_size = dataset.train.size();
  const int batches =
      train_size == 0 ? 0
                      : static_cast<int>((train_size + config.batch_size - 1) /
                                         config.batch_size);
  int epochs_without_gain = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    EpochLog log;
    log.epoch = epoch;
    log.lr = config.lr * std::pow(config.lr_decay, epoch - 1);
    log.batches = batches;
    for (int b = 0; b < batches; ++b) {
      const Batch batch = SampleBatch(index, config.batch_size, rng);
      LossBreakdown loss;
      GradientSet grads;
      try {
        grads = ComputeGradients(batch, model, config, interaction_graph,
                                 social_graph, threads, &loss);
      } catch (const Error& e) {
        throw DivergenceError("epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(b) + ": " + e.what());
      }
      log.loss.rec += loss.rec / batches;
      log.loss.social += loss.social / batches;
      log.loss.ssl += loss.ssl / batches;
      log.loss.reg += loss.reg / batches;
      log.loss.total += loss.total / batches;
      AdamStep(model, grads, adam, log.lr);
      if (!ParametersFinite(model)) {
        throw DivergenceError("epoch " + std::to_string(epoch) +
                              ": parameters became non-finite");
      }
      Encode(model, interaction_graph, social_graph, threads);
    }
    validate(log);
    log.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.epochs.push_back(log);
    LogEpoch(options.log, log, options.monitor_cutoff);

    if (!has_validation || log.val_hr > result.best_val_hr) {
      result.best_val_hr = log.val_hr;
      result.best_epoch = epoch;
      best = Snapshot::Of(model);
      epochs_without_gain = 0;
      if (!options.checkpoint_dir.empty()) {
        SaveCheckpoint(options.checkpoint_dir, model, config);
      }
    } else if (++epochs_without_gain >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }

  best.RestoreInto(model);
  Encode(model, interaction_graph, social_graph, threads);
  return result;
}

void WriteEpochTable(std::ostream& out, const std::vector<EpochLog>& epochs) {
  out << "epoch\tlr\tbatches\tloss\trec\tsocial\tssl\treg\tval_hr\tval_ndcg\tseconds\n";
  out << std::setprecision(10);
  for (const auto& e : epochs) {
    out << e.epoch << '\t' << e.lr << '\t' << e.batches << '\t' << e.loss.total
        << '\t' << e.loss.rec << '\t' << e.loss.social << '\t' << e.loss.ssl
        << '\t' << e.loss.reg << '\t' << e.val_hr << '\t' << e.val_ndcg << '\t'
        << e.seconds << '\n';
  }
}

}  // namespace dslrec
