// trainer.cc

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

#include "seqcritic/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "seqcritic/errors.h"
#include "seqcritic/metrics.h"
#include "seqcritic/parallel.h"
#include "seqcritic/tapegrad.h"

namespace seqcritic {

namespace {

constexpr std::uint64_t kXentStream = 0x78656e74;
constexpr std::uint64_t kRlStream = 0x726c;
constexpr std::uint64_t kQStream = 0x71;
constexpr std::uint64_t kInitStream = 0x696e6974;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void ScaleGrad(ParameterSet& params, double c) {
  for (std::size_t i = 0; i < params.size(); ++i) params.at(i).grad *= c;
}

std::vector<std::vector<std::size_t>> Batches(std::vector<std::size_t> order,
                                              int batch) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t b = 0; b < order.size(); b += batch) {
    const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(batch));
    out.emplace_back(order.begin() + b, order.begin() + e);
  }
  return out;
}

bool EvalDue(int interval, long step, bool epoch_end) {
  return interval > 0 ? step % interval == 0 : epoch_end;
}

}  // namespace

MetricReport Evaluate(const Policy& policy, const Dataset& dataset, Split split,
                      int max_len, int max_examples, int threads) {
  auto examples = dataset.Select(split);
  if (max_examples > 0 && static_cast<int>(examples.size()) > max_examples)
    examples.resize(max_examples);
  if (examples.empty())
    throw ConfigError(std::string("evaluate: split '") + SplitName(split) + "' is empty");

  std::vector<std::vector<TokenSequence>> refs(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i)
    for (const auto& r : examples[i]->references) refs[i].emplace_back(r);
  const CorpusIdf idf = FitIdf(refs);

  std::vector<std::vector<Token>> hyps(examples.size());
  ParallelFor(examples.size(), threads, [&](std::size_t i) {
    hyps[i] = policy.SampleTrajectory(examples[i]->context, Strategy::kMaxProbability,
                                      0, max_len).tokens;
  });

  MetricReport report;
  report.split = SplitName(split);
  report.num_examples = static_cast<int>(examples.size());
  BleuAccumulator bleu;
  double cider = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const TokenSequence cand(hyps[i]);
    cider += CiderReferences(refs[i], idf).Score(cand);
    bleu.Add(cand, refs[i]);
  }
  report.cider = cider / static_cast<double>(examples.size());
  const auto b = bleu.Scores();
  std::copy(b.begin(), b.end(), report.bleu.begin());
  return report;
}

Policy InitialPolicy(const TrainConfig& config, const Dataset& dataset) {
  PolicyConfig pc;
  pc.vocab_size = dataset.vocab.size();
  pc.context_dim = dataset.context_dim;
  pc.embed_dim = config.embed_dim;
  pc.hidden_dim = config.hidden_dim;
  pc.init_scale = config.init_scale;
  return Policy(pc, MixSeed(config.seed, kInitStream));
}

TrainResult TrainXent(const TrainConfig& config, const Dataset& dataset,
                      const Policy* initial) {
  Stopwatch clock;
  TrainResult result;
  result.record = RunRecord(ConfigHash(TrainConfigToMap(config)));
  Policy policy = initial ? *initial : InitialPolicy(config, dataset);
  result.policy = policy;
  result.best_val_cider = -1.0;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t e : dataset.Splits().train)
    for (std::size_t r = 0; r < dataset.examples[e].references.size(); ++r)
      pairs.emplace_back(e, r);
  if (pairs.empty()) throw ConfigError("train_xent: train split is empty");

  AdamState adam(policy.params());
  std::vector<GradientBuffer> buffers;
  long step = 0;
  for (int epoch = 0; epoch < config.xent_epochs; ++epoch) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(MixSeed(config.seed, kXentStream, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const auto batches = Batches(order, config.xent_batch);
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const auto& batch = batches[bi];
      ++step;
      while (buffers.size() < batch.size()) buffers.push_back(policy.params().MakeGradientBuffer());
      std::vector<double> nll(batch.size());
      std::vector<int> tokens(batch.size());
      ParallelFor(batch.size(), config.threads, [&](std::size_t j) {
        const auto [e, r] = pairs[batch[j]];
        std::vector<Token> target = dataset.examples[e].references[r];
        target.push_back(kEos);
        std::mt19937_64 rng(MixSeed(config.seed, kXentStream + 1, MixSeed(step, j)));
        Tape tape(/*training=*/true);
        Var loss = policy.TeacherForcedNll(tape, dataset.examples[e].context, target,
                                           {}, config.dropout, &rng);
        nll[j] = loss.scalar();
        tokens[j] = static_cast<int>(target.size());
        buffers[j].SetZero();
        tape.Backward(loss, &buffers[j]);
      });
      result.counters.teacher_forced_passes += static_cast<long>(batch.size());

      double total = 0.0;
      int total_tokens = 0;
      for (std::size_t j = 0; j < batch.size(); ++j) {
        total += nll[j];
        total_tokens += tokens[j];
        policy.params().AccumulateGrad(buffers[j]);
      }
      const double per_token = total / total_tokens;
      if (!std::isfinite(per_token) || !policy.params().GradFinite())
        throw DivergenceError("train_xent: non-finite loss or gradient at step " +
                              std::to_string(step) + " (epoch " + std::to_string(epoch) +
                              ", loss " + std::to_string(per_token) + ")");
      ScaleGrad(policy.params(), 1.0 / static_cast<double>(batch.size()));
      adam.Step(policy.params(), config.xent_lr);

      RunRow row;
      row.step = step;
      row.phase = "xent";
      row.loss = per_token;
      const bool epoch_end = bi + 1 == batches.size();
      const bool last = epoch + 1 == config.xent_epochs && epoch_end;
      if (EvalDue(config.eval_interval, step, epoch_end) || last) {
        const MetricReport m = Evaluate(policy, dataset, Split::kVal, config.max_len,
                                        config.eval_max_examples, config.threads);
        result.counters.greedy_eval_decodes += m.num_examples;
        row.val_cider = m.cider;
        row.val_bleu = m.bleu;
        if (m.cider > result.best_val_cider) {
          result.best_val_cider = m.cider;
          result.best_step = step;
          result.policy = policy;
        }
      }
      row.wallclock_s = clock.seconds();
      result.record.Append(std::move(row));
    }
  }
  result.last_policy = std::move(policy);
  if (result.best_val_cider < 0) result.policy = result.last_policy;
  return result;
}

TrainResult TrainRl(const TrainConfig& config, const Dataset& dataset,
                    const Policy& pretrained, const RlHooks& hooks) {
  Stopwatch clock;
  TrainResult result;
  result.record = RunRecord(ConfigHash(TrainConfigToMap(config)));
  Policy policy = pretrained;
  if (policy.config().vocab_size != dataset.vocab.size() ||
      policy.config().context_dim != dataset.context_dim)
    throw ConfigError("train_rl: checkpoint dimensions do not match the dataset");

  const auto train = dataset.Splits().train;
  if (train.empty()) throw ConfigError("train_rl: train split is empty");

  std::vector<RewardFn> rewards(dataset.examples.size());
  std::shared_ptr<const CorpusIdf> idf;
  if (!hooks.reward) idf = std::make_shared<const CorpusIdf>(FitRewardIdf(dataset, Split::kTrain));
  for (std::size_t e : train) {
    const Example& ex = dataset.examples[e];
    if (hooks.reward) {
      rewards[e] = hooks.reward(ex);
    } else {
      auto cider = std::make_shared<const CiderReward>(ex.references, *idf);
      rewards[e] = [cider, idf](std::span<const Token> t, bool with_eos) {
        return (*cider)(t, with_eos);
      };
    }
  }

  auto evaluate = [&](RunRow& row) {
    const MetricReport m = Evaluate(policy, dataset, Split::kVal, config.max_len,
                                    config.eval_max_examples, config.threads);
    result.counters.greedy_eval_decodes += m.num_examples;
    row.val_cider = m.cider;
    row.val_bleu = m.bleu;
    if (m.cider > result.best_val_cider || result.best_step < 0) {
      result.best_val_cider = m.cider;
      result.best_step = row.step;
    }
  };

  result.best_step = -1;
  {
    RunRow row;
    row.step = 0;
    row.phase = "rl";
    row.n = ActiveNStep(config.n_schedule, 0).ToString();
    row.estimator = EstimatorName(config.estimator.kind);
    evaluate(row);
    row.wallclock_s = clock.seconds();
    result.record.Append(std::move(row));
  }

  AdamState adam(policy.params());
  std::vector<GradientBuffer> buffers;
  long step = 0;
  for (int epoch = 0; epoch < config.rl_epochs(); ++epoch) {
    const NStepConfig nstep = ActiveNStep(config.n_schedule, epoch);
    std::vector<std::size_t> order = train;
    std::mt19937_64 shuffle_rng(MixSeed(config.seed, kRlStream, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const auto batches = Batches(order, config.rl_batch);
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const auto& batch = batches[bi];
      ++step;
      while (buffers.size() < batch.size()) buffers.push_back(policy.params().MakeGradientBuffer());
      std::vector<Trajectory> trajs(batch.size());
      std::vector<QEstimate> qs(batch.size());
      std::vector<std::vector<double>> advs(batch.size());
      std::vector<double> sample_reward(batch.size());
      std::vector<int> boundaries(batch.size());
      ParallelFor(batch.size(), config.threads, [&](std::size_t j) {
        const Example& ex = dataset.examples[batch[j]];
        const RewardFn& reward = rewards[batch[j]];
        trajs[j] = policy.SampleTrajectory(ex.context, Strategy::kMultinomial,
                                           MixSeed(config.seed, kRlStream + 1, MixSeed(step, j)),
                                           config.max_len);
        const Trajectory& traj = trajs[j];
        const RolloutContext rc{&policy, ex.context, &reward, config.max_len};
        qs[j] = EstimateBoundaries(rc, traj, nstep, config.estimator,
                                   MixSeed(config.seed, kQStream, MixSeed(step, j)));
        advs[j] = NStepAdvantages(qs[j], traj.length(), nstep);
        sample_reward[j] = reward(traj.tokens, /*with_eos=*/true);
        boundaries[j] = static_cast<int>(
            ChunkBoundaries(traj.length(), nstep.Resolve(traj.length())).size());
        buffers[j].SetZero();
        PolicyGradient(policy, ex.context, traj, advs[j], &buffers[j], config.normalization);
      });

      double mean_reward = 0.0;
      for (std::size_t j = 0; j < batch.size(); ++j) {
        mean_reward += sample_reward[j];
        result.counters.boundary_estimates += boundaries[j];
        policy.params().AccumulateGrad(buffers[j]);
        if (hooks.on_item) {
          RlItemLog log{step, static_cast<int>(j), batch[j], nstep, &policy, &trajs[j], &qs[j], &advs[j]};
          hooks.on_item(log);
        }
      }
      result.counters.sampled_trajectories += static_cast<long>(batch.size());
      result.counters.policy_gradient_calls += static_cast<long>(batch.size());
      mean_reward /= static_cast<double>(batch.size());
      if (!policy.params().GradFinite())
        throw DivergenceError("train_rl: non-finite gradient at step " + std::to_string(step) +
                              " (epoch " + std::to_string(epoch) + ", n=" + nstep.ToString() + ")");
      ScaleGrad(policy.params(), 1.0 / static_cast<double>(batch.size()));
      adam.Step(policy.params(), config.rl_lr);

      RunRow row;
      row.step = step;
      row.phase = "rl";
      row.n = nstep.ToString();
      row.estimator = EstimatorName(config.estimator.kind);
      row.loss = -mean_reward;
      const bool last = epoch + 1 == config.rl_epochs() && bi + 1 == batches.size();
      if (EvalDue(config.eval_interval, step, bi + 1 == batches.size()) || last) evaluate(row);
      row.wallclock_s = clock.seconds();
      result.record.Append(std::move(row));
    }
  }
  result.policy = policy;
  result.last_policy = std::move(policy);
  return result;
}

}  // namespace seqcritic
