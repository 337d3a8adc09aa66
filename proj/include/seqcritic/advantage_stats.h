// seqcritic/advantage_stats.h

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

#ifndef SEQCRITIC_ADVANTAGE_STATS_H_
#define SEQCRITIC_ADVANTAGE_STATS_H_

// Per-timestep statistics of the n-step advantage under a fixed policy.
//
// For every example one multinomial trajectory is drawn and held fixed. For
// each of its state-action pairs the boundary Q values are re-estimated
// `num_rollouts` times with fresh rollouts, giving num_rollouts draws of
// the advantage at that pair; their mean and (sample) variance are taken
// per pair. The reported value at timestep t is the average over examples
// of |mean| and of the variance. Greedy rollouts are deterministic, so the
// max-probability estimator is evaluated once and has zero variance.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "seqcritic/policy.h"
#include "seqcritic/rlcore.h"

namespace seqcritic {

struct AdvantageStatsConfig {
  std::vector<NStepConfig> n_grid = {NStepConfig::Steps(1), NStepConfig::Steps(2),
                                     NStepConfig::Steps(4), NStepConfig::FullSequence()};
  std::vector<EstimatorConfig> estimators = {
      {Estimator::kMaxProbability, 1, false}, {Estimator::kKRollout, 5, false}};
  int num_rollouts = 100;
  int max_len = 16;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct StatsExample {
  std::span<const double> context;
  const RewardFn* reward = nullptr;
};

struct AdvantageStatsRow {
  std::string estimator;
  std::string n;
  int K = 0;  // 0 for maxpro
  int timestep = 0;
  double abs_mean = 0.0;
  double variance = 0.0;
  int num_samples = 0;
};

// Rows ordered by estimator, then n, then timestep 1..max_len; timesteps no
// trajectory reached have num_samples = 0 and zero statistics.
std::vector<AdvantageStatsRow> AdvantageStats(
    const Policy& policy, std::span<const StatsExample> examples,
    const AdvantageStatsConfig& config);

void WriteAdvantageStatsCsv(std::ostream& out,
                            std::span<const AdvantageStatsRow> rows,
                            const std::string& config_hash);

}  // namespace seqcritic

#endif  // SEQCRITIC_ADVANTAGE_STATS_H_
