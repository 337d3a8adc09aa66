// seqcritic/rlcore.h

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

#ifndef SEQCRITIC_RLCORE_H_
#define SEQCRITIC_RLCORE_H_

// Self-critical n-step policy gradient for sequence generation.
//
// Captioning is an MDP with deterministic transitions (appending a token)
// and a single terminal reward, so with gamma = 1 the value of a state
// equals the value of the state-action pair that produced it:
//     V(s_t) = Q(s_{t-1}, a_{t-1}).
// The advantage of a_t can therefore be written as a difference of
// state-action values. With chunks of n tokens, every token t in the chunk
// (tau, tau + n] shares
//     A(t) = Q(s_{tau+n}, a_{tau+n}) - Q(s_tau, a_tau),
//     tau  = floor((t - 1) / n) * n,
// where the last chunk's upper end is clamped to T. Q at a boundary b is the
// reward of the prefix a_1..a_b completed either by K multinomial rollouts
// (averaged) or by one greedy rollout. Q at b = T is the trajectory's own
// reward, scored with EOS as a token; every other boundary is scored
// without EOS. n = T with greedy rollouts reproduces SCST.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqcritic/policy.h"
#include "seqcritic/tapegrad.h"
#include "seqcritic/token.h"

namespace seqcritic {

// R(a_1..a_T). `tokens` may end with EOS; `with_eos` selects whether that
// EOS is scored as a token.
using RewardFn = std::function<double(std::span<const Token>, bool with_eos)>;

// Chunk length for the n-step advantage, or the whole sequence ("T").
struct NStepConfig {
  int n = 1;
  bool full_sequence = false;

  static NStepConfig Steps(int n);
  static NStepConfig FullSequence();
  static NStepConfig Parse(const std::string& text);  // "2" or "T"

  int Resolve(int T) const;
  std::string ToString() const;
  bool operator==(const NStepConfig&) const = default;
};

// tau for token t (1-based) under chunk length n.
int ChunkStart(int t, int n);
// {0, n, 2n, ..., T}; T is always included.
std::vector<int> ChunkBoundaries(int T, int n);

enum class Estimator { kMaxProbability, kKRollout };

const char* EstimatorName(Estimator e);  // "maxpro" / "krollout"
Estimator ParseEstimator(const std::string& name);

struct EstimatorConfig {
  Estimator kind = Estimator::kMaxProbability;
  int K = 5;
  // Re-estimate every interior boundary separately for the chunk below and
  // the chunk above it instead of sharing one estimate.
  bool fresh_per_chunk = false;
};

// Everything a rollout needs besides the trajectory.
struct RolloutContext {
  const Policy* policy = nullptr;
  std::span<const double> context;
  const RewardFn* reward = nullptr;
  int max_len = 16;
};

// Q estimates at boundaries 0..T. `upper[b]` is used where b ends a chunk,
// `lower[b]` where it starts one; they are the same value unless
// fresh_per_chunk is set.
struct QEstimate {
  Estimator estimator = Estimator::kMaxProbability;
  int K = 1;
  std::vector<std::optional<double>> lower;
  std::vector<std::optional<double>> upper;
};

// Mean reward of K multinomial completions of a_1..a_b, each completion
// seeded by (seed, b, k). b = T returns the trajectory's own with-EOS reward.
double EstimateQKRollout(const RolloutContext& ctx, const Trajectory& traj,
                         int boundary, int K, std::uint64_t seed);
// Reward of the greedy completion of a_1..a_b.
double EstimateQMaxpro(const RolloutContext& ctx, const Trajectory& traj,
                       int boundary);

// Variants that reuse the decoding state after the prefix a_1..a_b.
double EstimateQKRollout(const RolloutContext& ctx, const Trajectory& traj,
                         const DecodingState& prefix_state, int boundary,
                         int K, std::uint64_t seed);
double EstimateQMaxpro(const RolloutContext& ctx, const Trajectory& traj,
                       const DecodingState& prefix_state, int boundary);

// Fills the boundaries needed for chunk length `nstep`, each evaluated once
// (or twice with fresh_per_chunk). `states`, if given, holds the decoding
// states after each prefix (Policy::PrefixStates).
QEstimate EstimateBoundaries(const RolloutContext& ctx, const Trajectory& traj,
                             const NStepConfig& nstep,
                             const EstimatorConfig& estimator,
                             std::uint64_t seed,
                             const std::vector<DecodingState>* states = nullptr);
// Same, for an explicit boundary list.
QEstimate EstimateAtBoundaries(const RolloutContext& ctx,
                               const Trajectory& traj,
                               std::span<const int> boundaries,
                               const EstimatorConfig& estimator,
                               std::uint64_t seed,
                               const std::vector<DecodingState>* states = nullptr);

// Per-token advantages for t = 1..T. Throws std::logic_error if a needed
// boundary is missing from `q`.
std::vector<double> NStepAdvantages(const QEstimate& q, int T,
                                    const NStepConfig& nstep);

enum class Normalization {
  kPerToken,  // (1/T) sum_t, the per-trajectory Monte Carlo estimate
  kSum,       // sum_t; unbiased for grad E[r] with variable-length T
};

// Accumulates the gradient of the surrogate loss
//     (scale) * sum_t A_t * -log pi(a_t | s_t)
// with the advantages held constant, into `sink` (or into the policy's own
// gradient buffers). Returns the surrogate value. Throws UsageError when
// advantages.size() != T.
double PolicyGradient(Policy& policy, std::span<const double> context,
                      const Trajectory& traj,
                      std::span<const double> advantages,
                      GradientBuffer* sink = nullptr,
                      Normalization norm = Normalization::kPerToken);

}  // namespace seqcritic

#endif  // SEQCRITIC_RLCORE_H_
