// seqcritic/policy.h

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

#ifndef SEQCRITIC_POLICY_H_
#define SEQCRITIC_POLICY_H_

// The caption decoder pi(a_t | a_1..a_{t-1}, context): token embedding into
// a single-layer LSTM, with the context projected into the gate
// pre-activations at every step and into the initial hidden state, followed
// by a softmax over the vocabulary. BOS is masked out of the softmax, so it
// is never sampled and has probability exactly zero.
//
// Two forward paths share the weights: a tape path for training
// (TeacherForcedNll) and a tape-free inference path (states, sampling,
// rollouts). Inference only reads the weights and is safe to call from
// many threads at once.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "seqcritic/tapegrad.h"
#include "seqcritic/token.h"

namespace seqcritic {

struct PolicyConfig {
  int vocab_size = 0;
  int context_dim = 32;
  int embed_dim = 512;
  int hidden_dim = 512;
  double init_scale = 0.08;  // uniform(-s, s) initialization
};

enum class Strategy { kMultinomial, kMaxProbability };

const char* StrategyName(Strategy s);

// The decoding state s_t = {context, a_0 = BOS, a_1, ..., a_{t-1}} together
// with the LSTM state after consuming every token in it.
class DecodingState {
 public:
  // Tokens consumed so far, BOS first.
  std::span<const Token> tokens() const { return tokens_; }
  // Generated tokens after BOS.
  std::span<const Token> generated() const {
    return std::span<const Token>(tokens_).subspan(1);
  }
  int num_generated() const { return static_cast<int>(tokens_.size()) - 1; }
  bool terminal() const { return tokens_.back() == kEos; }
  const RowVector& hidden() const { return h_; }
  const RowVector& cell() const { return c_; }

 private:
  friend class Policy;
  std::vector<Token> tokens_;
  RowVector h_;
  RowVector c_;
  RowVector context_gates_;  // context * W_ctx + b, constant over a sequence
};

struct Trajectory {
  std::vector<Token> tokens;     // a_1..a_T; a_T is EOS unless truncated
  std::vector<double> log_probs; // log pi(a_t | s_t), one per token
  Strategy strategy = Strategy::kMultinomial;
  std::uint64_t seed = 0;
  bool truncated = false;        // hit max_len words without EOS

  int length() const { return static_cast<int>(tokens.size()); }
};

// Draws from a probability row by inverse CDF. Entries with zero
// probability are never returned.
Token SampleCategorical(const RowVector& probs, std::mt19937_64& rng);
// Argmax, lowest id on ties, skipping BOS.
Token ArgmaxToken(const RowVector& probs);

class Policy {
 public:
  Policy() = default;
  // Random uniform(-init_scale, init_scale) weights.
  Policy(const PolicyConfig& config, std::uint64_t seed);

  const PolicyConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  DecodingState InitState(std::span<const double> context) const;
  RowVector StepDistribution(const DecodingState& state) const;
  DecodingState Append(const DecodingState& state, Token token) const;
  void Advance(DecodingState& state, Token token) const;

  // States after each prefix a_1..a_t of `tokens`, t = 0..tokens.size().
  std::vector<DecodingState> PrefixStates(std::span<const double> context,
                                          std::span<const Token> tokens) const;

  // Decodes from the initial state until EOS or max_len generated words.
  Trajectory SampleTrajectory(std::span<const double> context,
                              Strategy strategy, std::uint64_t seed,
                              int max_len) const;
  // Same rules as SampleTrajectory, starting after `state`'s prefix; the
  // prefix counts toward max_len. Empty if `state` is terminal.
  std::vector<Token> ContinueFrom(const DecodingState& state,
                                  Strategy strategy, std::uint64_t seed,
                                  int max_len) const;

  // sum_t w_t * -log pi(targets_t | BOS, targets_1..targets_{t-1}) on the
  // tape. `targets` are a_1..a_T; empty weights means all ones. Dropout (on
  // the embeddings and on the LSTM output) is active only if the tape is in
  // training mode.
  Var TeacherForcedNll(Tape& tape, std::span<const double> context,
                       std::span<const Token> targets,
                       std::span<const double> weights = {},
                       double dropout = 0.0, std::mt19937_64* rng = nullptr);

  void Save(const std::filesystem::path& path,
            std::map<std::string, std::string> meta = {}) const;
  static Policy Load(const std::filesystem::path& path);

 private:
  void Register();
  RowVector ContextGates(std::span<const double> context) const;
  void Step(DecodingState& state, Token token) const;
  std::vector<Token> Decode(DecodingState state, Strategy strategy,
                            std::mt19937_64& rng, int max_len,
                            std::vector<double>* log_probs) const;

  PolicyConfig config_;
  ParameterSet params_;
  // Indices into params_.
  std::size_t embed_ = 0, w_emb_ = 0, w_ctx_ = 0, w_hid_ = 0, b_gates_ = 0;
  std::size_t w_init_ = 0, b_init_ = 0, w_out_ = 0, b_out_ = 0;
};

}  // namespace seqcritic

#endif  // SEQCRITIC_POLICY_H_
