// rlcore.cc

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

#include "seqcritic/rlcore.h"

#include <algorithm>
#include <stdexcept>

#include "seqcritic/errors.h"

namespace seqcritic {

NStepConfig NStepConfig::Steps(int n) {
  if (n < 1) throw ConfigError("n-step: n must be >= 1, got " + std::to_string(n));
  return NStepConfig{n, false};
}

NStepConfig NStepConfig::FullSequence() { return NStepConfig{0, true}; }

NStepConfig NStepConfig::Parse(const std::string& text) {
  if (text == "T" || text == "t") return FullSequence();
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || n < 1)
    throw ConfigError("n-step: expected a positive integer or 'T', got '" + text + "'");
  return Steps(n);
}

int NStepConfig::Resolve(int T) const {
  return full_sequence ? std::max(T, 1) : std::min(n, std::max(T, 1));
}

std::string NStepConfig::ToString() const {
  return full_sequence ? "T" : std::to_string(n);
}

int ChunkStart(int t, int n) { return ((t - 1) / n) * n; }

std::vector<int> ChunkBoundaries(int T, int n) {
  std::vector<int> b;
  for (int t = 0; t < T; t += n) b.push_back(t);
  b.push_back(T);
  return b;
}

const char* EstimatorName(Estimator e) {
  return e == Estimator::kMaxProbability ? "maxpro" : "krollout";
}

Estimator ParseEstimator(const std::string& name) {
  if (name == "maxpro") return Estimator::kMaxProbability;
  if (name == "krollout") return Estimator::kKRollout;
  throw ConfigError("unknown estimator '" + name + "' (expected maxpro|krollout)");
}

namespace {

void CheckBoundary(const Trajectory& traj, int boundary) {
  if (boundary < 0 || boundary > traj.length())
    throw UsageError("boundary " + std::to_string(boundary) + " outside [0, " +
                     std::to_string(traj.length()) + "]");
}

double CompletedReward(const RolloutContext& ctx, const Trajectory& traj,
                       int boundary, std::span<const Token> completion) {
  std::vector<Token> full(traj.tokens.begin(), traj.tokens.begin() + boundary);
  full.insert(full.end(), completion.begin(), completion.end());
  return (*ctx.reward)(full, /*with_eos=*/false);
}

double TerminalReward(const RolloutContext& ctx, const Trajectory& traj) {
  return (*ctx.reward)(traj.tokens, /*with_eos=*/true);
}

}  // namespace

double EstimateQKRollout(const RolloutContext& ctx, const Trajectory& traj,
                         const DecodingState& prefix_state, int boundary,
                         int K, std::uint64_t seed) {
  CheckBoundary(traj, boundary);
  if (K < 1) throw UsageError("K-rollout: K must be >= 1");
  if (boundary == traj.length()) return TerminalReward(ctx, traj);
  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    auto completion = ctx.policy->ContinueFrom(
        prefix_state, Strategy::kMultinomial,
        MixSeed(seed, static_cast<std::uint64_t>(boundary), static_cast<std::uint64_t>(k)),
        ctx.max_len);
    sum += CompletedReward(ctx, traj, boundary, completion);
  }
  return sum / K;
}

double EstimateQMaxpro(const RolloutContext& ctx, const Trajectory& traj,
                       const DecodingState& prefix_state, int boundary) {
  CheckBoundary(traj, boundary);
  if (boundary == traj.length()) return TerminalReward(ctx, traj);
  auto completion = ctx.policy->ContinueFrom(prefix_state, Strategy::kMaxProbability,
                                             0, ctx.max_len);
  return CompletedReward(ctx, traj, boundary, completion);
}

namespace {

DecodingState StateAfter(const RolloutContext& ctx, const Trajectory& traj,
                         int boundary) {
  CheckBoundary(traj, boundary);
  DecodingState s = ctx.policy->InitState(ctx.context);
  for (int t = 0; t < boundary; ++t) ctx.policy->Advance(s, traj.tokens[t]);
  return s;
}

}  // namespace

double EstimateQKRollout(const RolloutContext& ctx, const Trajectory& traj,
                         int boundary, int K, std::uint64_t seed) {
  if (boundary == traj.length()) return TerminalReward(ctx, traj);
  return EstimateQKRollout(ctx, traj, StateAfter(ctx, traj, boundary), boundary, K, seed);
}

double EstimateQMaxpro(const RolloutContext& ctx, const Trajectory& traj,
                       int boundary) {
  if (boundary == traj.length()) return TerminalReward(ctx, traj);
  return EstimateQMaxpro(ctx, traj, StateAfter(ctx, traj, boundary), boundary);
}

QEstimate EstimateAtBoundaries(const RolloutContext& ctx,
                               const Trajectory& traj,
                               std::span<const int> boundaries,
                               const EstimatorConfig& estimator,
                               std::uint64_t seed,
                               const std::vector<DecodingState>* states) {
  const int T = traj.length();
  QEstimate q;
  q.estimator = estimator.kind;
  q.K = estimator.kind == Estimator::kKRollout ? estimator.K : 1;
  q.lower.assign(T + 1, std::nullopt);
  q.upper.assign(T + 1, std::nullopt);

  std::vector<DecodingState> local;
  if (!states) {
    local = ctx.policy->PrefixStates(ctx.context, traj.tokens);
    states = &local;
  }
  // Independent draws for the second (upper) use of a boundary.
  const std::uint64_t upper_seed = MixSeed(seed, 0x75707065ULL);
  for (int b : boundaries) {
    CheckBoundary(traj, b);
    const DecodingState& s = (*states)[b];
    double v;
    if (estimator.kind == Estimator::kMaxProbability) {
      v = EstimateQMaxpro(ctx, traj, s, b);
      q.lower[b] = q.upper[b] = v;
    } else {
      v = EstimateQKRollout(ctx, traj, s, b, estimator.K, seed);
      q.lower[b] = v;
      q.upper[b] = estimator.fresh_per_chunk && b > 0 && b < T
                       ? EstimateQKRollout(ctx, traj, s, b, estimator.K, upper_seed)
                       : v;
    }
  }
  return q;
}

QEstimate EstimateBoundaries(const RolloutContext& ctx, const Trajectory& traj,
                             const NStepConfig& nstep,
                             const EstimatorConfig& estimator,
                             std::uint64_t seed,
                             const std::vector<DecodingState>* states) {
  const int T = traj.length();
  auto b = ChunkBoundaries(T, nstep.Resolve(T));
  return EstimateAtBoundaries(ctx, traj, b, estimator, seed, states);
}

std::vector<double> NStepAdvantages(const QEstimate& q, int T,
                                    const NStepConfig& nstep) {
  if (static_cast<int>(q.lower.size()) < T + 1 || static_cast<int>(q.upper.size()) < T + 1)
    throw std::logic_error("NStepAdvantages: Q estimate shorter than trajectory");
  const int n = nstep.Resolve(T);
  std::vector<double> adv(T);
  for (int t = 1; t <= T; ++t) {
    const int lo = ChunkStart(t, n);
    const int hi = std::min(lo + n, T);
    if (!q.lower[lo] || !q.upper[hi])
      throw std::logic_error("NStepAdvantages: missing Q at boundary " +
                             std::to_string(q.lower[lo] ? hi : lo));
    adv[t - 1] = *q.upper[hi] - *q.lower[lo];
  }
  return adv;
}

double PolicyGradient(Policy& policy, std::span<const double> context,
                      const Trajectory& traj,
                      std::span<const double> advantages,
                      GradientBuffer* sink, Normalization norm) {
  const int T = traj.length();
  if (static_cast<int>(advantages.size()) != T)
    throw UsageError("PolicyGradient: " + std::to_string(advantages.size()) +
                     " advantages for a trajectory of length " + std::to_string(T));
  if (T == 0) return 0.0;
  const double scale = norm == Normalization::kPerToken ? 1.0 / T : 1.0;
  std::vector<double> weights(advantages.begin(), advantages.end());
  bool all_zero = true;
  for (auto& w : weights) {
    all_zero = all_zero && w == 0.0;
    w *= scale;
  }
  if (all_zero) return 0.0;
  Tape tape(/*training=*/false);
  Var loss = policy.TeacherForcedNll(tape, context, traj.tokens, weights);
  tape.Backward(loss, sink);
  return loss.scalar();
}

}  // namespace seqcritic
