// seqcritic/trainer.h

// Copyright 2026 The seqcritic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQCRITIC_TRAINER_H_
#define SEQCRITIC_TRAINER_H_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "seqcritic/config.h"
#include "seqcritic/corpus.h"
#include "seqcritic/policy.h"
#include "seqcritic/rlcore.h"
#include "seqcritic/run_record.h"

namespace seqcritic {

struct MetricReport {
  std::string split;
  int num_examples = 0;
  double cider = 0.0;
  std::array<double, 4> bleu{};  // corpus BLEU-1..4
  bool operator==(const MetricReport&) const = default;
};

// Greedy decoding over a split; CIDEr idf comes from that split's own
// references. `max_examples` > 0 keeps the first examples of the split.
// Throws ConfigError naming the split when it is empty.
MetricReport Evaluate(const Policy& policy, const Dataset& dataset, Split split,
                      int max_len, int max_examples = 0, int threads = 1);

// Per-phase operation counts, for checking that the phases stay apart.
struct OpCounters {
  long teacher_forced_passes = 0;  // NLL of ground-truth captions
  long sampled_trajectories = 0;
  long boundary_estimates = 0;
  long policy_gradient_calls = 0;
  long greedy_eval_decodes = 0;
};

// What one RL batch item did; handed to RlHooks::on_item in batch order.
struct RlItemLog {
  long step = 0;
  int item = 0;
  std::size_t example = 0;
  NStepConfig n;
  const Policy* policy = nullptr;  // weights the item was sampled under
  const Trajectory* trajectory = nullptr;
  const QEstimate* q = nullptr;
  const std::vector<double>* advantages = nullptr;
};

struct RlHooks {
  // Builds the reward of one training example; defaults to with-EOS-aware
  // CIDEr against the example's references under the train-split idf.
  std::function<RewardFn(const Example&)> reward;
  std::function<void(const RlItemLog&)> on_item;
};

struct TrainResult {
  Policy policy;       // xent: best validation CIDEr; rl: final weights
  Policy last_policy;  // weights after the last step
  double best_val_cider = 0.0;
  long best_step = 0;
  RunRecord record;
  OpCounters counters;
};

Policy InitialPolicy(const TrainConfig& config, const Dataset& dataset);

// Teacher-forced cross-entropy training from `initial` (or a fresh policy
// seeded from config.seed). Throws DivergenceError on a non-finite loss.
TrainResult TrainXent(const TrainConfig& config, const Dataset& dataset,
                      const Policy* initial = nullptr);

// Self-critical n-step RL fine-tuning of `pretrained`. Throws
// DivergenceError on a non-finite gradient.
TrainResult TrainRl(const TrainConfig& config, const Dataset& dataset,
                    const Policy& pretrained, const RlHooks& hooks = {});

}  // namespace seqcritic

#endif  // SEQCRITIC_TRAINER_H_
