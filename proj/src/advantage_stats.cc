// advantage_stats.cc

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

#include "seqcritic/advantage_stats.h"

#include <cmath>
#include <iomanip>
#include <numeric>

#include "seqcritic/parallel.h"

namespace seqcritic {

namespace {

// Per-example contribution: for each (estimator, n, t) the mean and
// variance of the advantage over repeated estimation.
struct ExampleStats {
  // [estimator][n][t-1]
  std::vector<std::vector<std::vector<double>>> mean, var;
  int T = 0;
};

}  // namespace

std::vector<AdvantageStatsRow> AdvantageStats(
    const Policy& policy, std::span<const StatsExample> examples,
    const AdvantageStatsConfig& config) {
  const std::size_t num_est = config.estimators.size();
  const std::size_t num_n = config.n_grid.size();
  std::vector<ExampleStats> per_example(examples.size());

  ParallelFor(examples.size(), config.threads, [&](std::size_t i) {
    const StatsExample& ex = examples[i];
    RolloutContext ctx{&policy, ex.context, ex.reward, config.max_len};
    Trajectory traj = policy.SampleTrajectory(ex.context, Strategy::kMultinomial,
                                              MixSeed(config.seed, i), config.max_len);
    const int T = traj.length();
    auto states = policy.PrefixStates(ex.context, traj.tokens);
    std::vector<int> all_boundaries(T + 1);
    std::iota(all_boundaries.begin(), all_boundaries.end(), 0);

    ExampleStats& out = per_example[i];
    out.T = T;
    out.mean.assign(num_est, std::vector<std::vector<double>>(num_n, std::vector<double>(T, 0.0)));
    out.var = out.mean;
    for (std::size_t e = 0; e < num_est; ++e) {
      const EstimatorConfig& est = config.estimators[e];
      const int reps = est.kind == Estimator::kMaxProbability ? 1 : config.num_rollouts;
      // samples[k][t][r]
      std::vector<std::vector<std::vector<double>>> samples(
          num_n, std::vector<std::vector<double>>(T, std::vector<double>(reps)));
      for (int r = 0; r < reps; ++r) {
        // Every boundary 0..T at once; each n then reads the subset it needs.
        QEstimate q = EstimateAtBoundaries(ctx, traj, all_boundaries, est,
                                           MixSeed(config.seed, i, e * 1000003ULL + r),
                                           &states);
        for (std::size_t k = 0; k < num_n; ++k) {
          auto adv = NStepAdvantages(q, T, config.n_grid[k]);
          for (int t = 0; t < T; ++t) samples[k][t][r] = adv[t];
        }
      }
      for (std::size_t k = 0; k < num_n; ++k) {
        for (int t = 0; t < T; ++t) {
          const auto& x = samples[k][t];
          double m = 0.0;
          for (double v : x) m += v;
          m /= reps;
          double ss = 0.0;
          for (double v : x) ss += (v - m) * (v - m);
          out.mean[e][k][t] = m;
          out.var[e][k][t] = reps > 1 ? ss / (reps - 1) : 0.0;
        }
      }
    }
  });

  std::vector<AdvantageStatsRow> rows;
  for (std::size_t e = 0; e < num_est; ++e) {
    const EstimatorConfig& est = config.estimators[e];
    for (std::size_t k = 0; k < num_n; ++k) {
      for (int t = 1; t <= config.max_len; ++t) {
        AdvantageStatsRow row;
        row.estimator = EstimatorName(est.kind);
        row.n = config.n_grid[k].ToString();
        row.K = est.kind == Estimator::kKRollout ? est.K : 0;
        row.timestep = t;
        double abs_mean = 0.0, var = 0.0;
        int count = 0;
        for (const auto& ex : per_example) {
          if (ex.T < t) continue;
          abs_mean += std::abs(ex.mean[e][k][t - 1]);
          var += ex.var[e][k][t - 1];
          ++count;
        }
        row.num_samples = count;
        if (count > 0) {
          row.abs_mean = abs_mean / count;
          row.variance = var / count;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void WriteAdvantageStatsCsv(std::ostream& out,
                            std::span<const AdvantageStatsRow> rows,
                            const std::string& config_hash) {
  out << "# config_hash=" << config_hash << '\n';
  out << "estimator,n,K,timestep,abs_mean,variance,num_samples\n";
  out << std::setprecision(10);
  for (const auto& r : rows)
    out << r.estimator << ',' << r.n << ',' << r.K << ',' << r.timestep << ','
        << r.abs_mean << ',' << r.variance << ',' << r.num_samples << '\n';
}

}  // namespace seqcritic
