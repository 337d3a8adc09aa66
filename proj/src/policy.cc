// policy.cc

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

#include "seqcritic/policy.h"

#include <cmath>

#include "seqcritic/checkpoint.h"
#include "seqcritic/errors.h"

namespace seqcritic {

const char* StrategyName(Strategy s) {
  return s == Strategy::kMultinomial ? "multinomial" : "max-probability";
}

Token SampleCategorical(const RowVector& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double target = u(rng) * probs.sum();
  double acc = 0.0;
  Token last = -1;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    acc += probs[j];
    last = static_cast<Token>(j);
    if (target < acc) return last;
  }
  return last;  // rounding left target just above the running sum
}

Token ArgmaxToken(const RowVector& probs) {
  Token best = -1;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (j == kBos) continue;
    if (best < 0 || probs[j] > probs[best]) best = static_cast<Token>(j);
  }
  return best;
}

namespace {

double SigmoidScalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Policy::Policy(const PolicyConfig& config, std::uint64_t seed) : config_(config) {
  if (config.vocab_size <= kFirstWordToken || config.context_dim <= 0 ||
      config.embed_dim <= 0 || config.hidden_dim <= 0)
    throw ConfigError("Policy: invalid dimensions");
  Register();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-config.init_scale, config.init_scale);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Matrix& w = params_.at(i).value;
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = u(rng);
  }
}

void Policy::Register() {
  const int V = config_.vocab_size, C = config_.context_dim;
  const int E = config_.embed_dim, H = config_.hidden_dim;
  params_ = ParameterSet();
  embed_ = params_.size();   params_.Add("embed", V, E);
  w_emb_ = params_.size();   params_.Add("gates.w_emb", E, 4 * H);
  w_ctx_ = params_.size();   params_.Add("gates.w_ctx", C, 4 * H);
  w_hid_ = params_.size();   params_.Add("gates.w_hid", H, 4 * H);
  b_gates_ = params_.size(); params_.Add("gates.b", 1, 4 * H);
  w_init_ = params_.size();  params_.Add("init.w", C, H);
  b_init_ = params_.size();  params_.Add("init.b", 1, H);
  w_out_ = params_.size();   params_.Add("out.w", H, V);
  b_out_ = params_.size();   params_.Add("out.b", 1, V);
}

RowVector Policy::ContextGates(std::span<const double> context) const {
  if (static_cast<int>(context.size()) != config_.context_dim)
    throw DimensionError("policy: context has " + std::to_string(context.size()) +
                         " dims, expected " + std::to_string(config_.context_dim));
  Eigen::Map<const RowVector> ctx(context.data(), static_cast<Eigen::Index>(context.size()));
  RowVector g = ctx * params_.at(w_ctx_).value;
  g += params_.at(b_gates_).value.row(0);
  return g;
}

void Policy::Step(DecodingState& state, Token token) const {
  const int H = config_.hidden_dim;
  if (token < 0 || token >= config_.vocab_size)
    throw UsageError("policy: token id " + std::to_string(token) + " out of range");
  RowVector gates = params_.at(embed_).value.row(token) * params_.at(w_emb_).value;
  gates += state.context_gates_;
  gates.noalias() += state.h_ * params_.at(w_hid_).value;
  for (int k = 0; k < H; ++k) {
    const double i = SigmoidScalar(gates[k]);
    const double f = SigmoidScalar(gates[H + k]);
    const double g = std::tanh(gates[2 * H + k]);
    const double o = SigmoidScalar(gates[3 * H + k]);
    state.c_[k] = f * state.c_[k] + i * g;
    state.h_[k] = o * std::tanh(state.c_[k]);
  }
  state.tokens_.push_back(token);
}

DecodingState Policy::InitState(std::span<const double> context) const {
  DecodingState s;
  s.context_gates_ = ContextGates(context);
  Eigen::Map<const RowVector> ctx(context.data(), static_cast<Eigen::Index>(context.size()));
  s.h_ = ctx * params_.at(w_init_).value;
  s.h_ += params_.at(b_init_).value.row(0);
  s.h_ = s.h_.array().tanh().matrix();
  s.c_ = RowVector::Zero(config_.hidden_dim);
  Step(s, kBos);
  return s;
}

RowVector Policy::StepDistribution(const DecodingState& state) const {
  if (state.terminal()) throw UsageError("StepDistribution: state is terminal");
  RowVector logits = state.h_ * params_.at(w_out_).value;
  logits += params_.at(b_out_).value.row(0);
  logits[kBos] = -std::numeric_limits<double>::infinity();
  const double mx = logits.maxCoeff();
  RowVector p = (logits.array() - mx).exp().matrix();
  // Vectorized exp clamps -inf to a denormal; BOS must be exactly impossible.
  p[kBos] = 0.0;
  p /= p.sum();
  return p;
}

DecodingState Policy::Append(const DecodingState& state, Token token) const {
  DecodingState next = state;
  Advance(next, token);
  return next;
}

void Policy::Advance(DecodingState& state, Token token) const {
  if (state.terminal()) throw UsageError("Append: state is terminal");
  Step(state, token);
}

std::vector<DecodingState> Policy::PrefixStates(std::span<const double> context,
                                                std::span<const Token> tokens) const {
  std::vector<DecodingState> out;
  out.reserve(tokens.size() + 1);
  out.push_back(InitState(context));
  for (Token t : tokens) out.push_back(Append(out.back(), t));
  return out;
}

std::vector<Token> Policy::Decode(DecodingState state, Strategy strategy,
                                  std::mt19937_64& rng, int max_len,
                                  std::vector<double>* log_probs) const {
  std::vector<Token> out;
  while (!state.terminal() && state.num_generated() < max_len) {
    RowVector p = StepDistribution(state);
    Token a = strategy == Strategy::kMaxProbability ? ArgmaxToken(p)
                                                    : SampleCategorical(p, rng);
    if (log_probs) log_probs->push_back(std::log(p[a]));
    out.push_back(a);
    if (a == kEos) break;
    Step(state, a);
  }
  return out;
}

Trajectory Policy::SampleTrajectory(std::span<const double> context,
                                    Strategy strategy, std::uint64_t seed,
                                    int max_len) const {
  Trajectory traj;
  traj.strategy = strategy;
  traj.seed = seed;
  std::mt19937_64 rng(seed);
  traj.tokens = Decode(InitState(context), strategy, rng, max_len, &traj.log_probs);
  traj.truncated = traj.tokens.empty() || traj.tokens.back() != kEos;
  return traj;
}

std::vector<Token> Policy::ContinueFrom(const DecodingState& state,
                                        Strategy strategy, std::uint64_t seed,
                                        int max_len) const {
  std::mt19937_64 rng(seed);
  return Decode(state, strategy, rng, max_len, nullptr);
}

Var Policy::TeacherForcedNll(Tape& tape, std::span<const double> context,
                             std::span<const Token> targets,
                             std::span<const double> weights, double dropout,
                             std::mt19937_64* rng) {
  const int H = config_.hidden_dim;
  const int T = static_cast<int>(targets.size());
  if (T == 0) throw UsageError("TeacherForcedNll: empty target sequence");
  if (static_cast<int>(context.size()) != config_.context_dim)
    throw DimensionError("policy: context has " + std::to_string(context.size()) +
                         " dims, expected " + std::to_string(config_.context_dim));
  std::mt19937_64 local_rng(0);
  std::mt19937_64& drng = rng ? *rng : local_rng;

  Matrix ctx_row = Eigen::Map<const Matrix>(context.data(), 1, config_.context_dim);
  Var ctx = tape.Constant(std::move(ctx_row));
  Var context_gates = tape.Add(tape.MatMul(ctx, tape.Param(params_, w_ctx_)),
                               tape.Param(params_, b_gates_));
  Var h = tape.Tanh(tape.Add(tape.MatMul(ctx, tape.Param(params_, w_init_)),
                             tape.Param(params_, b_init_)));
  Var c = tape.Constant(Matrix::Zero(1, H));

  std::vector<Token> inputs;
  inputs.push_back(kBos);
  inputs.insert(inputs.end(), targets.begin(), targets.end() - 1);
  Var emb = tape.Dropout(tape.Embed(tape.Param(params_, embed_), inputs), dropout, drng);
  Var emb_gates = tape.MatMul(emb, tape.Param(params_, w_emb_));
  Var w_hid = tape.Param(params_, w_hid_);

  std::vector<Var> outputs;
  outputs.reserve(T);
  for (int t = 0; t < T; ++t) {
    Var gates = tape.Add(tape.Add(tape.SliceRows(emb_gates, t, 1), context_gates),
                         tape.MatMul(h, w_hid));
    Var i = tape.Sigmoid(tape.SliceCols(gates, 0, H));
    Var f = tape.Sigmoid(tape.SliceCols(gates, H, H));
    Var g = tape.Tanh(tape.SliceCols(gates, 2 * H, H));
    Var o = tape.Sigmoid(tape.SliceCols(gates, 3 * H, H));
    c = tape.Add(tape.Mul(f, c), tape.Mul(i, g));
    h = tape.Mul(o, tape.Tanh(c));
    outputs.push_back(h);
  }
  Var hs = tape.Dropout(tape.StackRows(outputs), dropout, drng);
  Var logits = tape.Add(tape.MatMul(hs, tape.Param(params_, w_out_)),
                        tape.Param(params_, b_out_));
  return tape.SoftmaxXent(logits, targets, weights, kBos);
}

void Policy::Save(const std::filesystem::path& path,
                  std::map<std::string, std::string> meta) const {
  meta["vocab_size"] = std::to_string(config_.vocab_size);
  meta["context_dim"] = std::to_string(config_.context_dim);
  meta["embed_dim"] = std::to_string(config_.embed_dim);
  meta["hidden_dim"] = std::to_string(config_.hidden_dim);
  SaveCheckpoint(path, params_, meta);
}

Policy Policy::Load(const std::filesystem::path& path) {
  Checkpoint ckpt = LoadCheckpoint(path);
  auto get = [&](const char* key) {
    auto it = ckpt.meta.find(key);
    if (it == ckpt.meta.end())
      throw ConfigError(path.string() + ": checkpoint meta lacks " + key);
    return std::stoi(it->second);
  };
  Policy p;
  p.config_.vocab_size = get("vocab_size");
  p.config_.context_dim = get("context_dim");
  p.config_.embed_dim = get("embed_dim");
  p.config_.hidden_dim = get("hidden_dim");
  p.Register();
  AssignWeights(p.params_, ckpt.params);
  return p;
}

}  // namespace seqcritic
