// seqcritic/config.h

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

#ifndef SEQCRITIC_CONFIG_H_
#define SEQCRITIC_CONFIG_H_

// Flat key=value configuration.
//
//   # comment
//   include base.conf        (path relative to the including file)
//   xent_lr = 4e-4
//
// Later assignments win, so a file can include a base and override it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "seqcritic/rlcore.h"

namespace seqcritic {

using ConfigMap = std::map<std::string, std::string>;

ConfigMap LoadConfigFile(const std::filesystem::path& path);
ConfigMap ParseConfigText(const std::string& text,
                          const std::filesystem::path& base_dir = {});
std::string FormatConfig(const ConfigMap& config);
// FNV-1a 64 of FormatConfig(config), as 16 hex digits.
std::string ConfigHash(const ConfigMap& config);

// One entry of an n-schedule: use chunk length `n` until RL epoch
// `epoch_end` (exclusive, counted from the start of RL).
struct NScheduleEntry {
  NStepConfig n;
  int epoch_end = 0;
  bool operator==(const NScheduleEntry&) const = default;
};

// "1:5,2:10,2:15" means n=1 for epochs [0,5), n=2 for [5,10) and [10,15).
// Throws ConfigError naming the offending token.
std::vector<NScheduleEntry> ParseNSchedule(const std::string& text);
std::string FormatNSchedule(const std::vector<NScheduleEntry>& schedule);
NStepConfig ActiveNStep(const std::vector<NScheduleEntry>& schedule, int epoch);

struct TrainConfig {
  std::string preset = "paper";
  std::uint64_t seed = 1;

  // Model.
  int embed_dim = 512;
  int hidden_dim = 512;
  double init_scale = 0.08;
  int max_len = 16;

  // Cross-entropy phase.
  double xent_lr = 4e-4;
  int xent_batch = 80;
  int xent_epochs = 30;
  double dropout = 0.5;

  // RL phase.
  double rl_lr = 5e-5;
  int rl_batch = 32;
  EstimatorConfig estimator{Estimator::kMaxProbability, 5, false};
  std::vector<NScheduleEntry> n_schedule = {{NStepConfig::Steps(1), 30}};
  Normalization normalization = Normalization::kPerToken;

  // Evaluation, in optimizer steps; 0 evaluates once per epoch.
  int eval_interval = 0;
  int eval_max_examples = 0;  // 0 = whole split

  int threads = 1;

  int rl_epochs() const { return n_schedule.empty() ? 0 : n_schedule.back().epoch_end; }
};

// The documented presets: "paper" (published hyperparameters) and "desk"
// (small enough for a laptop CPU).
TrainConfig PresetConfig(const std::string& name);
// Applies `overrides` on top of the preset named by overrides["preset"]
// (default "paper"). Unknown keys are a ConfigError.
TrainConfig TrainConfigFromMap(const ConfigMap& overrides);
ConfigMap TrainConfigToMap(const TrainConfig& config);

}  // namespace seqcritic

#endif  // SEQCRITIC_CONFIG_H_
