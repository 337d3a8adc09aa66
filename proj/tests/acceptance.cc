// acceptance.cc

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

// Acceptance suite: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Exits 1 if any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradcheck.h"
#include "metric_fixtures.h"
#include "seqcritic/advantage_stats.h"
#include "seqcritic/cli.h"
#include "seqcritic/config.h"
#include "seqcritic/corpus.h"
#include "seqcritic/metrics.h"
#include "seqcritic/rlcore.h"
#include "seqcritic/trainer.h"
#include "toy_mdp.h"

namespace seqcritic {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Report {
 public:
  void Add(int id, const std::string& name, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name
              << "): " << o.detail << std::endl;
    failures_ += !o.pass;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

// P(X >= k) for X ~ Binomial(n, 1/2).
double SignTestP(int k, int n) {
  double p = 0.0, c = 1.0;
  for (int i = 0; i <= n; ++i) {
    if (i >= k) p += c;
    c = c * (n - i) / (i + 1);
  }
  return p / std::pow(2.0, n);
}

// ---- criteria 1-5: exact checks -------------------------------------------

Outcome MetricOracle() {
  const auto start = Clock::now();
  auto cider = testing::CiderFixtures();
  auto bleu = testing::BleuFixtures();
  double worst = 0.0;
  std::string worst_name;
  for (const auto* set : {&cider, &bleu})
    for (const auto& f : *set) {
      const double e = testing::RelativeError(f.got, f.want);
      if (e >= worst) worst = e, worst_name = f.name;
    }
  const double secs = Seconds(start);
  return {worst < 1e-9 && secs < 1.0 && cider.size() >= 5 && bleu.size() >= 5 * 4,
          Fmt("%zu CIDEr + %zu BLEU fixtures (incl. zero-idf), max rel err %.2e (%s), %.3f s",
              cider.size(), bleu.size() / 4, worst, worst_name.c_str(), secs)};
}

Outcome GradientCheck() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::size_t ops = 0;
  for (const auto& [name, err] : testing::OpGradientErrors()) {
    ++ops;
    if (err >= worst) worst = err, worst_name = name;
  }
  for (bool training : {false, true}) {
    const double err = testing::DecoderGradientError(training);
    if (err >= worst) worst = err, worst_name = training ? "decoder (dropout)" : "decoder";
  }
  const double secs = Seconds(start);
  return {worst < 1e-3 && secs < 60.0,
          Fmt("%zu op checks + decoder step, max rel err %.2e (%s), %.2f s", ops, worst,
              worst_name.c_str(), secs)};
}

Outcome BellmanIdentity() {
  testing::ToyMdp mdp;
  const double gap = testing::MaxBellmanGap(mdp);
  return {gap < 1e-12, Fmt("%zu trajectories over 3 actions, T<=3, max |V(s_t)-Q(s_t-1,a_t-1)| = %.2e",
                           mdp.trajectories.size(), gap)};
}

Outcome Unbiasedness() {
  const auto start = Clock::now();
  testing::ToyMdp mdp;
  double worst = 0.0;
  for (NStepConfig n : {NStepConfig::Steps(1), NStepConfig::Steps(2), NStepConfig::FullSequence()})
    worst = std::max(worst, testing::MaxGradientGap(mdp, n));
  const double secs = Seconds(start);
  return {worst < 1e-6 && secs < 60.0,
          Fmt("n in {1,2,T}, max |E[grad] - grad E[r]| = %.2e per component, %.2f s", worst, secs)};
}

// Greedy decode written out longhand: first maximum wins.
std::vector<Token> GreedyLonghand(const Policy& p, std::span<const double> context, int max_len) {
  std::vector<Token> out;
  DecodingState s = p.InitState(context);
  while (static_cast<int>(out.size()) < max_len) {
    const RowVector probs = p.StepDistribution(s);
    const Token a = static_cast<Token>(std::max_element(probs.data(), probs.data() + probs.size()) -
                                       probs.data());
    out.push_back(a);
    if (a == kEos) break;
    p.Advance(s, a);
  }
  return out;
}

Outcome ScstIdentity(const Dataset& ds) {
  PolicyConfig pc;
  pc.vocab_size = ds.vocab.size();
  pc.context_dim = ds.context_dim;
  pc.embed_dim = 16;
  pc.hidden_dim = 24;
  pc.init_scale = 0.3;
  const Policy policy(pc, 17);
  const CorpusIdf idf = FitRewardIdf(ds);
  const auto train = ds.Select(Split::kTrain);
  const int max_len = 16;
  int mismatches = 0, tokens = 0;
  for (int i = 0; i < 200; ++i) {
    const Example& ex = *train[i % train.size()];
    const CiderReward scorer(ex.references, idf);
    const RewardFn reward = [&](std::span<const Token> t, bool e) { return scorer(t, e); };
    const Trajectory traj =
        policy.SampleTrajectory(ex.context, Strategy::kMultinomial, MixSeed(99, i), max_len);
    const RolloutContext ctx{&policy, ex.context, &reward, max_len};
    const QEstimate q = EstimateBoundaries(ctx, traj, NStepConfig::FullSequence(),
                                           {Estimator::kMaxProbability, 1, false}, MixSeed(7, i));
    const auto adv = NStepAdvantages(q, traj.length(), NStepConfig::FullSequence());
    const double scst = scorer(traj.tokens, true) - scorer(GreedyLonghand(policy, ex.context, max_len), false);
    for (double a : adv) {
      mismatches += std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(scst);
      ++tokens;
    }
  }
  return {mismatches == 0, Fmt("200 trajectories, %d tokens, %d bitwise mismatches", tokens, mismatches)};
}

// ---- criteria 6-8: desk-scale runs ----------------------------------------

struct SeedRun {
  std::uint64_t seed = 0;
  Policy xent;
  double xent_val = 0.0;
  double maxpro_val = 0.0;
  double krollout_val = 0.0;
  double xent_s = 0.0, maxpro_s = 0.0, krollout_s = 0.0;
};

double FinalValCider(const TrainResult& r) { return *r.record.Evaluations().back().val_cider; }

struct StatsInputs {
  std::shared_ptr<CorpusIdf> idf;
  std::vector<std::unique_ptr<CiderReward>> scorers;
  std::vector<RewardFn> rewards;
  std::vector<StatsExample> items;
};

std::unique_ptr<StatsInputs> MakeStatsInputs(const Dataset& ds, int count) {
  auto in = std::make_unique<StatsInputs>();
  in->idf = std::make_shared<CorpusIdf>(FitRewardIdf(ds));
  auto chosen = ds.Select(Split::kTrain);
  chosen.resize(std::min<std::size_t>(chosen.size(), count));
  in->rewards.reserve(chosen.size());
  for (const Example* ex : chosen) {
    in->scorers.push_back(std::make_unique<CiderReward>(ex->references, *in->idf));
    const CiderReward* s = in->scorers.back().get();
    in->rewards.push_back([s](std::span<const Token> t, bool e) { return (*s)(t, e); });
  }
  for (std::size_t i = 0; i < chosen.size(); ++i)
    in->items.push_back({chosen[i]->context, &in->rewards[i]});
  return in;
}

struct TrendResult {
  int eligible = 0;
  int mean_ok = 0;  // |mean| nondecreasing across the n grid
  int var_ok = 0;   // variance nonincreasing across the n grid
  double mean_frac() const { return eligible ? double(mean_ok) / eligible : 0.0; }
  double var_frac() const { return eligible ? double(var_ok) / eligible : 0.0; }
};

constexpr int kMinSamples = 30;

// Rows are ordered n-major for a single estimator.
TrendResult Trend(const std::vector<AdvantageStatsRow>& rows, int num_n, int max_len) {
  TrendResult r;
  for (int t = 1; t <= max_len; ++t) {
    std::vector<const AdvantageStatsRow*> col(num_n);
    for (int k = 0; k < num_n; ++k) col[k] = &rows[k * max_len + (t - 1)];
    if (col[0]->num_samples < kMinSamples) continue;
    ++r.eligible;
    bool up = true, down = true;
    for (int k = 1; k < num_n; ++k) {
      const double tol = 1e-12 * std::max(1.0, std::abs(col[k - 1]->abs_mean));
      up = up && col[k]->abs_mean >= col[k - 1]->abs_mean - tol;
      down = down && col[k]->variance <= col[k - 1]->variance + 1e-12;
    }
    r.mean_ok += up;
    r.var_ok += down;
  }
  return r;
}

void WriteStats(const fs::path& path, const std::vector<AdvantageStatsRow>& rows,
                const std::string& tag) {
  std::ofstream out(path);
  WriteAdvantageStatsCsv(out, rows, tag);
}

}  // namespace
}  // namespace seqcritic

int main(int argc, char** argv) {
  using namespace seqcritic;
  CLI::App app{"seqcritic acceptance suite"};
  std::string work = (fs::temp_directory_path() / "seqcritic_acceptance").string();
  int num_seeds = 5;
  int stats_examples = 500;
  int rollouts = 100;
  std::vector<int> only;
  app.add_option("--work", work, "Directory for intermediate artifacts");
  app.add_option("--seeds", num_seeds, "Seeds for criteria 6-8")->check(CLI::Range(1, 20));
  app.add_option("--stats-examples", stats_examples, "Examples for advantage statistics");
  app.add_option("--rollouts", rollouts, "Repeated estimates per trajectory");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  auto want = [&](int id) { return only.empty() || std::count(only.begin(), only.end(), id) > 0; };

  fs::create_directories(work);
  Report report;
  const auto suite_start = Clock::now();

  if (want(1)) report.Add(1, "metric oracle", MetricOracle());
  if (want(2)) report.Add(2, "gradient correctness", GradientCheck());
  if (want(3)) report.Add(3, "value and action-value identity", BellmanIdentity());
  if (want(4)) report.Add(4, "estimator unbiasedness", Unbiasedness());

  SyntheticConfig synth;  // 2000 examples, 4 attributes, seed 7
  const Dataset ds = GenerateSynthetic(synth);
  if (want(5)) report.Add(5, "SCST identity", ScstIdentity(ds));

  const TrainConfig desk = PresetConfig("desk");
  std::vector<SeedRun> runs;
  if (want(6) || want(7) || want(8)) {
    for (int s = 1; s <= num_seeds; ++s) {
      SeedRun run;
      run.seed = s;
      TrainConfig c = desk;
      c.seed = s;
      auto t0 = Clock::now();
      TrainResult x = TrainXent(c, ds);
      run.xent_s = Seconds(t0);
      run.xent = x.policy;
      run.xent_val = x.best_val_cider;
      x.record.WriteCsv(fs::path(work) / Fmt("xent_seed%d.csv", s));
      std::cerr << Fmt("seed %d: xent val CIDEr %.5f (%.0f s)\n", s, run.xent_val, run.xent_s);
      runs.push_back(std::move(run));
    }
  }

  if (want(6) || want(8)) {
    const auto inputs = MakeStatsInputs(ds, stats_examples);
    AdvantageStatsConfig base;
    base.num_rollouts = rollouts;
    base.max_len = desk.max_len;
    const int num_n = static_cast<int>(base.n_grid.size());

    if (want(6)) {
      const auto start = Clock::now();
      int seeds_ok = 0;
      std::string per_seed;
      for (const SeedRun& run : runs) {
        AdvantageStatsConfig cfg = base;
        cfg.seed = run.seed;
        cfg.estimators = {{Estimator::kMaxProbability, 1, false}};
        const auto rows = AdvantageStats(run.xent, inputs->items, cfg);
        WriteStats(fs::path(work) / Fmt("advstats_maxpro_seed%d.csv", int(run.seed)), rows, "maxpro");
        const TrendResult tr = Trend(rows, num_n, cfg.max_len);
        const bool ok = tr.mean_frac() >= 0.6 && tr.var_frac() >= 0.6;
        seeds_ok += ok;
        per_seed += Fmt(" %.2f/%.2f", tr.mean_frac(), tr.var_frac());
      }
      const double p = SignTestP(seeds_ok, num_seeds);
      const double secs = Seconds(start);
      report.Add(6, "advantage trend, maxpro",
                 {p < 0.05 && secs < 900.0 && stats_examples >= 500,
                  Fmt("%d examples, %d/%d seeds with |mean| up and variance down at >=60%% of "
                      "timesteps (fractions:%s), sign test p = %.4f, %.0f s",
                      int(inputs->items.size()), seeds_ok, num_seeds, per_seed.c_str(), p, secs)});
    }

    if (want(8)) {
      const auto start = Clock::now();
      int seeds_up = 0;
      std::string per_seed;
      for (const SeedRun& run : runs) {
        AdvantageStatsConfig cfg = base;
        cfg.seed = run.seed;
        cfg.estimators = {{Estimator::kKRollout, 1, false}};
        const auto rows = AdvantageStats(run.xent, inputs->items, cfg);
        WriteStats(fs::path(work) / Fmt("advstats_k1_seed%d.csv", int(run.seed)), rows, "krollout K=1");
        const TrendResult tr = Trend(rows, num_n, cfg.max_len);
        seeds_up += tr.mean_frac() >= 0.6;
        per_seed += Fmt(" %.2f", tr.mean_frac());
      }
      const double p = SignTestP(seeds_up, num_seeds);
      report.Add(8, "K=1 degeneracy",
                 {p >= 0.05,
                  Fmt("%d/%d seeds with |mean| nondecreasing in n at >=60%% of timesteps "
                      "(fractions:%s), sign test p = %.4f (pass needs p >= 0.05), %.0f s",
                      seeds_up, num_seeds, per_seed.c_str(), p, Seconds(start))});
    }
  }

  if (want(7)) {
    const auto start = Clock::now();
    double train_s = 0.0;
    std::ofstream table(fs::path(work) / "rl_comparison.csv");
    table << "seed,xent_val_cider,maxpro_val_cider,krollout_val_cider\n";
    int improved = 0, k_ge = 0, ties = 0;
    for (SeedRun& run : runs) {
      train_s += run.xent_s;
      TrainConfig c = desk;
      c.seed = run.seed;
      c.estimator = {Estimator::kMaxProbability, 1, false};
      auto t0 = Clock::now();
      const TrainResult m = TrainRl(c, ds, run.xent);
      run.maxpro_s = Seconds(t0);
      m.record.WriteCsv(fs::path(work) / Fmt("rl_maxpro_seed%d.csv", int(run.seed)));
      c.estimator = {Estimator::kKRollout, 5, false};
      t0 = Clock::now();
      const TrainResult k = TrainRl(c, ds, run.xent);
      run.krollout_s = Seconds(t0);
      k.record.WriteCsv(fs::path(work) / Fmt("rl_krollout_seed%d.csv", int(run.seed)));
      run.maxpro_val = FinalValCider(m);
      run.krollout_val = FinalValCider(k);
      improved += run.maxpro_val > run.xent_val;
      k_ge += run.krollout_val >= run.maxpro_val;
      ties += run.krollout_val == run.maxpro_val;
      table << run.seed << ',' << Fmt("%.17g,%.17g,%.17g", run.xent_val, run.maxpro_val, run.krollout_val)
            << '\n';
      std::cerr << Fmt("seed %d: maxpro %.5f (%.0f s), krollout %.5f (%.0f s)\n", int(run.seed),
                       run.maxpro_val, run.maxpro_s, run.krollout_val, run.krollout_s);
    }
    const double secs = Seconds(start) + train_s;
    const int n = static_cast<int>(runs.size());
    report.Add(7, "directional RL improvement",
               {improved == n && n == 5 && 5 * k_ge >= 3 * n && secs < 7200.0,
                Fmt("1-step-maxpro > XENT in %d/%d seeds; krollout(K=5) >= maxpro in %d/%d "
                    "(%d exact ties); %.0f s including XENT",
                    improved, n, k_ge, n, ties, secs)});
  }

  if (want(9)) {
    const fs::path dir = fs::path(work) / "repro";
    fs::remove_all(dir);
    std::ostringstream out, err;
    auto cli = [&](std::vector<std::string> args) { return RunCli(args, out, err); };
    bool ok = cli({"gen", "--examples", "400", "--seed", "11", "--out", (dir / "data").string()}) == 0;
    ok = ok && cli({"train", "--data", (dir / "data").string(), "--preset", "desk", "--estimator",
                    "krollout", "--K", "3", "--n-schedule", "1:1,2:2", "--set", "xent_epochs=2",
                    "--set", "eval_interval=5", "--out", (dir / "a").string()}) == 0;
    ok = ok && cli({"train", "--manifest", (dir / "a" / kManifestFile).string(), "--out",
                    (dir / "b").string()}) == 0;
    int same = 0, total = 0;
    for (const char* f : {kXentCsv, kRlCsv}) {
      ++total;
      if (ok && RunRecord::ReadCsv(dir / "a" / f).ToCsv(false) == RunRecord::ReadCsv(dir / "b" / f).ToCsv(false))
        ++same;
    }
    const std::string failure = ok ? "" : "; a CLI step failed: " + err.str();
    report.Add(9, "reproducibility",
               {ok && same == total,
                Fmt("rerun from manifest: %d/%d RunRecord CSVs identical (wallclock column excluded)%s",
                    same, total, failure.c_str())});
  }

  std::cerr << Fmt("acceptance finished in %.0f s\n", Seconds(suite_start));
  return report.failures() == 0 ? 0 : 1;
}
