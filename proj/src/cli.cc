// cli.cc

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

#include "seqcritic/cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqcritic/advantage_stats.h"
#include "seqcritic/config.h"
#include "seqcritic/corpus.h"
#include "seqcritic/errors.h"
#include "seqcritic/metrics.h"
#include "seqcritic/policy.h"
#include "seqcritic/run_record.h"
#include "seqcritic/trainer.h"

#ifndef SEQCRITIC_BUILD_ID
#define SEQCRITIC_BUILD_ID "unknown"
#endif

namespace seqcritic {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char* BuildId() { return SEQCRITIC_BUILD_ID; }

fs::path ResolveOutputPath(const fs::path& path) {
  if (path.is_absolute()) return path;
  const char* root = std::getenv("SEQCRITIC_OUT");
  if (root == nullptr || *root == '\0') return path;
  return fs::path(root) / path;
}

namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory " + dir.string() + ": " + ec.message());
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("short write on " + path.string());
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte == 0 ? 0 : e.byte - 1);
  }
}

Dataset LoadDatasetDir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("dataset directory not found: " + dir.string());
  return LoadJsonLines(dir / kDatasetFile, dir / kVocabFile);
}

void SaveDatasetDir(const Dataset& ds, const fs::path& dir) {
  EnsureDir(dir);
  SaveJsonLines(ds, dir / kDatasetFile, dir / kVocabFile);
}

json DatasetSummary(const Dataset& ds, const fs::path& dir) {
  const SplitSpec s = ds.Splits();
  return {{"output", dir.string()},
          {"examples", ds.examples.size()},
          {"vocab_size", ds.vocab.size()},
          {"context_dim", ds.context_dim},
          {"train", s.train.size()},
          {"val", s.val.size()},
          {"test", s.test.size()}};
}

json ReportJson(const MetricReport& r) {
  return {{"split", r.split},
          {"num_examples", r.num_examples},
          {"cider", r.cider},
          {"bleu", {r.bleu[0], r.bleu[1], r.bleu[2], r.bleu[3]}}};
}

// ---- gen / ingest ---------------------------------------------------------

struct GenArgs {
  SyntheticConfig synth;
  std::string out = "data";
};

int CmdGen(const GenArgs& a, std::ostream& out) {
  const Dataset ds = GenerateSynthetic(a.synth);
  const fs::path dir = ResolveOutputPath(a.out);
  SaveDatasetDir(ds, dir);
  out << DatasetSummary(ds, dir).dump() << '\n';
  return kExitOk;
}

struct IngestArgs {
  std::string coco;
  CocoLoadOptions options;
  std::string out = "data";
};

int CmdIngest(const IngestArgs& a, std::ostream& out) {
  if (!fs::exists(a.coco)) throw ConfigError("input file not found: " + a.coco);
  const Dataset ds = LoadCocoJson(a.coco, a.options);
  const fs::path dir = ResolveOutputPath(a.out);
  SaveDatasetDir(ds, dir);
  out << DatasetSummary(ds, dir).dump() << '\n';
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string config_file;
  std::string manifest;
  std::string data;
  std::string out;
  std::string phase = "both";
  std::string init;
  std::optional<std::string> preset, estimator, n_schedule;
  std::optional<int> K, threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

json ManifestJson(const std::string& config_path, const ConfigMap& snapshot,
                  const fs::path& out_dir, const TrainConfig& config,
                  const std::string& data, const std::string& phase,
                  const std::string& init) {
  json snap = json::object();
  for (const auto& [k, v] : snapshot) snap[k] = v;
  return {{"config_path", config_path},
          {"config_snapshot", snap},
          {"config_hash", ConfigHash(snapshot)},
          {"output_dir", out_dir.string()},
          {"build_id", BuildId()},
          {"seed", config.seed},
          {"data", data},
          {"phase", phase},
          {"init", init}};
}

json SummaryJson(const char* phase, const TrainResult& r, const MetricReport& final_val) {
  return {{"phase", phase},
          {"best_val_cider", r.best_val_cider},
          {"best_step", r.best_step},
          {"final", ReportJson(final_val)},
          {"steps", r.record.rows().empty() ? 0 : r.record.rows().back().step}};
}

int CmdTrain(TrainArgs a, std::ostream& out, std::ostream& err) {
  ConfigMap map;
  std::string config_path = a.config_file;
  if (!a.manifest.empty()) {
    const json m = ReadJson(a.manifest);
    try {
      for (const auto& [k, v] : m.at("config_snapshot").items()) map[k] = v.get<std::string>();
      if (a.data.empty()) a.data = m.at("data").get<std::string>();
      if (a.phase == "both") a.phase = m.at("phase").get<std::string>();
      if (a.init.empty()) a.init = m.at("init").get<std::string>();
      config_path = m.at("config_path").get<std::string>();
    } catch (const json::exception& e) {
      throw SchemaError(a.manifest + ": malformed manifest: " + e.what(), "manifest");
    }
  }
  if (!a.config_file.empty()) {
    for (const auto& [k, v] : LoadConfigFile(a.config_file)) map[k] = v;
  }
  if (a.preset) map["preset"] = *a.preset;
  if (a.estimator) map["estimator"] = *a.estimator;
  if (a.K) map["K"] = std::to_string(*a.K);
  if (a.threads) map["threads"] = std::to_string(*a.threads);
  if (a.seed) map["seed"] = std::to_string(*a.seed);
  if (a.n_schedule) {
    try {
      ParseNSchedule(*a.n_schedule);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    map["n_schedule"] = *a.n_schedule;
  }
  for (const std::string& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("--set expects key=value, got '" + kv + "'");
    map[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (a.phase != "xent" && a.phase != "rl" && a.phase != "both")
    throw UsageError("--phase expects xent|rl|both, got '" + a.phase + "'");
  if (a.data.empty()) throw UsageError("train needs --data (or --manifest)");
  if (a.phase == "rl" && a.init.empty())
    throw ConfigError("rl phase needs a pretrained checkpoint (--init)");

  const TrainConfig config = TrainConfigFromMap(map);
  if (config.estimator.kind == Estimator::kMaxProbability && a.K)
    err << "warning: --K is ignored with estimator maxpro\n";

  // The snapshot is the fully resolved config, so a rerun does not depend
  // on preset defaults.
  const ConfigMap snapshot = TrainConfigToMap(config);
  const std::string hash = ConfigHash(snapshot);
  const fs::path dir = ResolveOutputPath(a.out.empty() ? "runs/" + hash : a.out);
  if (!a.config_file.empty()) config_path = fs::absolute(a.config_file).string();
  a.data = fs::absolute(a.data).string();
  if (!a.init.empty()) a.init = fs::absolute(a.init).string();
  const Dataset ds = LoadDatasetDir(a.data);
  std::optional<Policy> init;
  if (!a.init.empty()) init = Policy::Load(a.init);

  EnsureDir(dir);
  WriteText(dir / kSnapshotFile, FormatConfig(snapshot));
  WriteText(dir / kManifestFile,
            ManifestJson(config_path, snapshot, dir, config, a.data, a.phase, a.init).dump(2) +
                "\n");

  json summary = {{"output_dir", dir.string()}, {"config_hash", hash}};
  std::optional<Policy> start;
  if (a.phase != "rl") {
    err << "xent: " << config.xent_epochs << " epochs\n";
    TrainResult x = TrainXent(config, ds, init ? &*init : nullptr);
    x.record.WriteCsv(dir / kXentCsv);
    x.policy.Save(dir / kXentCheckpoint, {{"config_hash", hash}, {"phase", "xent"}});
    const MetricReport val = Evaluate(x.policy, ds, Split::kVal, config.max_len,
                                      config.eval_max_examples, config.threads);
    summary["xent"] = SummaryJson("xent", x, val);
    start = std::move(x.policy);
  } else {
    start = std::move(*init);
  }
  if (a.phase != "xent") {
    err << "rl: " << config.rl_epochs() << " epochs, n-schedule "
        << FormatNSchedule(config.n_schedule) << '\n';
    const TrainResult r = TrainRl(config, ds, *start);
    r.record.WriteCsv(dir / kRlCsv);
    r.policy.Save(dir / kRlCheckpoint, {{"config_hash", hash}, {"phase", "rl"}});
    const MetricReport val = Evaluate(r.policy, ds, Split::kVal, config.max_len,
                                      config.eval_max_examples, config.threads);
    summary["rl"] = SummaryJson("rl", r, val);
  }
  WriteText(dir / kSummaryFile, summary.dump(2) + "\n");
  out << summary.dump() << '\n';
  return kExitOk;
}

// ---- eval / decode --------------------------------------------------------

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string split = "val";
  int max_len = 16;
  int max_examples = 0;
  int threads = 1;
  int limit = 0;
};

int CmdEval(const EvalArgs& a, std::ostream& out) {
  const Dataset ds = LoadDatasetDir(a.data);
  const Policy p = Policy::Load(a.ckpt);
  json j = ReportJson(Evaluate(p, ds, ParseSplit(a.split), a.max_len, a.max_examples, a.threads));
  j["checkpoint"] = a.ckpt;
  out << j.dump() << '\n';
  return kExitOk;
}

int CmdDecode(const EvalArgs& a, std::ostream& out) {
  const Dataset ds = LoadDatasetDir(a.data);
  const Policy p = Policy::Load(a.ckpt);
  int n = 0;
  for (const Example* ex : ds.Select(ParseSplit(a.split))) {
    if (a.limit > 0 && n++ >= a.limit) break;
    const Trajectory t = p.SampleTrajectory(ex->context, Strategy::kMaxProbability, 0, a.max_len);
    std::vector<Token> words = t.tokens;
    if (!words.empty() && words.back() == kEos) words.pop_back();
    out << json{{"id", ex->id}, {"caption", ds.vocab.DecodeText(words)}}.dump() << '\n';
  }
  return kExitOk;
}

// ---- advstats -------------------------------------------------------------

struct AdvstatsArgs {
  std::string ckpt;
  std::string data;
  std::string split = "train";
  int examples = 500;
  int rollouts = 100;
  std::vector<std::string> estimators = {"maxpro", "krollout"};
  int K = 5;
  std::string n_grid = "1,2,4,T";
  int max_len = 16;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
};

int CmdAdvstats(const AdvstatsArgs& a, std::ostream& out) {
  AdvantageStatsConfig cfg;
  cfg.num_rollouts = a.rollouts;
  cfg.max_len = a.max_len;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.n_grid.clear();
  std::stringstream grid(a.n_grid);
  for (std::string tok; std::getline(grid, tok, ',');) {
    try {
      cfg.n_grid.push_back(NStepConfig::Parse(tok));
    } catch (const std::exception&) {
      throw UsageError("--n-grid: bad entry '" + tok + "'");
    }
  }
  cfg.estimators.clear();
  for (const std::string& name : a.estimators) {
    const Estimator kind = ParseEstimator(name);
    cfg.estimators.push_back({kind, kind == Estimator::kKRollout ? a.K : 1, false});
  }
  if (cfg.n_grid.empty() || cfg.estimators.empty())
    throw UsageError("advstats needs a non-empty n grid and estimator list");
  if (a.rollouts < 1 || a.K < 1) throw UsageError("--rollouts and --K must be >= 1");

  const Dataset ds = LoadDatasetDir(a.data);
  const Policy p = Policy::Load(a.ckpt);
  const auto idf = std::make_shared<CorpusIdf>(FitRewardIdf(ds));
  std::vector<const Example*> chosen = ds.Select(ParseSplit(a.split));
  if (a.examples > 0 && static_cast<int>(chosen.size()) > a.examples) chosen.resize(a.examples);
  if (chosen.empty()) throw ConfigError("no examples in split '" + a.split + "'");
  std::vector<std::unique_ptr<CiderReward>> scorers;
  std::vector<RewardFn> rewards;
  std::vector<StatsExample> items;
  scorers.reserve(chosen.size());
  rewards.reserve(chosen.size());
  for (const Example* ex : chosen) {
    scorers.push_back(std::make_unique<CiderReward>(ex->references, *idf));
    const CiderReward* s = scorers.back().get();
    rewards.push_back([s](std::span<const Token> t, bool eos) { return (*s)(t, eos); });
  }
  for (std::size_t i = 0; i < chosen.size(); ++i) items.push_back({chosen[i]->context, &rewards[i]});

  const auto rows = AdvantageStats(p, items, cfg);
  std::string names;
  for (const auto& n : a.estimators) names += n + ";";
  const ConfigMap params = {{"checkpoint", a.ckpt}, {"data", a.data}, {"split", a.split},
                            {"examples", std::to_string(chosen.size())},
                            {"rollouts", std::to_string(a.rollouts)}, {"estimators", names},
                            {"K", std::to_string(a.K)}, {"n_grid", a.n_grid},
                            {"max_len", std::to_string(a.max_len)},
                            {"seed", std::to_string(a.seed)}};
  if (a.out.empty()) {
    WriteAdvantageStatsCsv(out, rows, ConfigHash(params));
  } else {
    const fs::path path = ResolveOutputPath(a.out);
    if (path.has_parent_path()) EnsureDir(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    WriteAdvantageStatsCsv(f, rows, ConfigHash(params));
    out << json{{"output", path.string()}, {"rows", rows.size()}}.dump() << '\n';
  }
  return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> positional;
  std::vector<std::string> baseline;
  std::vector<std::string> candidate;
  std::string curves;
};

struct Curve {
  std::string dir;
  std::vector<std::pair<long, double>> points;  // (step, val_cider)
};

Curve LoadCurve(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("run directory not found: " + dir);
  fs::path csv = fs::path(dir) / kRlCsv;
  if (!fs::exists(csv)) csv = fs::path(dir) / kXentCsv;
  if (!fs::exists(csv)) throw ConfigError("no run record in " + dir);
  Curve c{dir, {}};
  for (const RunRow& row : RunRecord::ReadCsv(csv).Evaluations())
    c.points.emplace_back(row.step, *row.val_cider);
  if (c.points.empty()) throw ConfigError("run record in " + dir + " has no evaluations");
  return c;
}

// Value at the last evaluation at or before `step`.
double ValueAt(const Curve& c, long step) {
  double v = c.points.front().second;
  for (const auto& [s, x] : c.points) {
    if (s > step) break;
    v = x;
  }
  return v;
}

int CmdCompare(CompareArgs a, std::ostream& out, std::ostream& err) {
  if (a.baseline.empty() && a.candidate.empty()) {
    if (a.positional.size() != 2)
      throw UsageError("compare needs two run directories or --baseline/--candidate lists");
    a.baseline = {a.positional[0]};
    a.candidate = {a.positional[1]};
  } else if (!a.positional.empty()) {
    throw UsageError("compare: give either positional directories or --baseline/--candidate");
  }
  if (a.baseline.size() != a.candidate.size() || a.baseline.empty())
    throw UsageError("compare: --baseline and --candidate need the same number of runs");

  std::vector<Curve> base, cand;
  for (const auto& d : a.baseline) base.push_back(LoadCurve(d));
  for (const auto& d : a.candidate) cand.push_back(LoadCurve(d));

  // Common grid: the coarsest eval grid among all runs.
  const Curve* coarsest = &base.front();
  bool same = true;
  auto steps = [](const Curve& c) {
    std::vector<long> s;
    for (const auto& p : c.points) s.push_back(p.first);
    return s;
  };
  for (const auto* set : {&base, &cand}) {
    for (const Curve& c : *set) {
      if (steps(c) != steps(*coarsest)) same = false;
      if (c.points.size() < coarsest->points.size()) coarsest = &c;
    }
  }
  if (!same)
    err << "warning: eval intervals differ; resampling to the coarsest grid ("
        << coarsest->points.size() << " points, from " << coarsest->dir << ")\n";
  const std::vector<long> grid = steps(*coarsest);

  std::ostringstream csv;
  ConfigMap ids;
  for (std::size_t i = 0; i < base.size(); ++i) {
    ids["baseline" + std::to_string(i)] = base[i].dir;
    ids["candidate" + std::to_string(i)] = cand[i].dir;
  }
  csv << "# config_hash=" << ConfigHash(ids) << '\n'
      << "pair,step,baseline_cider,candidate_cider,delta\n";
  json pairs = json::array();
  double sum = 0.0;
  int better = 0, worse = 0, ties = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    for (long s : grid) {
      const double b = ValueAt(base[i], s), c = ValueAt(cand[i], s);
      csv << i << ',' << s << ',' << FormatDouble(b) << ',' << FormatDouble(c) << ','
          << FormatDouble(c - b) << '\n';
    }
    const double b = base[i].points.back().second, c = cand[i].points.back().second;
    const double d = c - b;
    sum += d;
    better += d > 0;
    worse += d < 0;
    ties += d == 0;
    pairs.push_back({{"baseline", base[i].dir},
                     {"candidate", cand[i].dir},
                     {"baseline_final_cider", b},
                     {"candidate_final_cider", c},
                     {"delta", d}});
  }
  if (!a.curves.empty()) {
    const fs::path path = ResolveOutputPath(a.curves);
    if (path.has_parent_path()) EnsureDir(path.parent_path());
    WriteText(path, csv.str());
  }
  out << json{{"pairs", pairs},
              {"mean_delta", sum / static_cast<double>(base.size())},
              {"candidate_better", better},
              {"baseline_better", worse},
              {"ties", ties},
              {"resampled", !same}}
             .dump()
      << '\n';
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence-level RL fine-tuning experiments"};
  app.name("seqcritic");
  app.require_subcommand(1, 1);

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate the synthetic captioning corpus");
  gen->add_option("--examples", gen_args.synth.num_examples, "Number of examples")
      ->check(CLI::PositiveNumber);
  gen->add_option("--attrs", gen_args.synth.num_attributes, "Attributes per example (3..5)")
      ->check(CLI::Range(3, 5));
  gen->add_option("--refs", gen_args.synth.refs_per_example, "References per example")
      ->check(CLI::PositiveNumber);
  gen->add_option("--context-dim", gen_args.synth.context_dim, "Context vector width");
  gen->add_option("--seed", gen_args.synth.seed, "Generator seed");
  gen->add_option("--out", gen_args.out, "Output dataset directory");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Convert COCO-style caption JSON");
  ingest->add_option("--coco", ingest_args.coco, "Caption JSON file")->required();
  ingest->add_option("--min-count", ingest_args.options.min_word_count,
                     "Words seen fewer times become <unk>");
  ingest->add_option("--max-len", ingest_args.options.max_len, "Caption truncation length")
      ->check(CLI::PositiveNumber);
  ingest->add_option("--context-dim", ingest_args.options.context_dim,
                     "Width of images without a feature vector");
  ingest->add_option("--out", ingest_args.out, "Output dataset directory");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Run XENT pretraining and/or RL fine-tuning");
  train->add_option("--config", train_args.config_file, "key = value config file");
  train->add_option("--manifest", train_args.manifest, "Rerun from a run's manifest.json");
  train->add_option("--data", train_args.data, "Dataset directory");
  train->add_option("--out", train_args.out, "Run directory (default runs/<config hash>)");
  train->add_option("--phase", train_args.phase, "xent, rl or both");
  train->add_option("--init", train_args.init, "Starting checkpoint (required for --phase rl)");
  train->add_option("--preset", train_args.preset, "desk or paper");
  train->add_option("--estimator", train_args.estimator, "maxpro or krollout");
  train->add_option("--K", train_args.K, "Rollouts per boundary for krollout");
  train->add_option("--n-schedule", train_args.n_schedule, "n:epoch_end pairs, e.g. 1:5,2:10");
  train->add_option("--threads", train_args.threads, "Worker threads");
  train->add_option("--seed", train_args.seed, "Training seed");
  train->add_option("--set", train_args.sets, "Extra key=value overrides");
  for (CLI::Option* opt : train->get_options())
    if (opt->get_name() != "--set" && opt->get_name() != "--help")
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Greedy-decode a split and score it");
  auto* decode = app.add_subcommand("decode", "Print greedy captions as JSON lines");
  for (auto* sub : {eval, decode}) {
    sub->add_option("--ckpt", eval_args.ckpt, "Checkpoint")->required();
    sub->add_option("--data", eval_args.data, "Dataset directory")->required();
    sub->add_option("--split", eval_args.split, "train, val or test");
    sub->add_option("--max-len", eval_args.max_len, "Decoding length limit");
  }
  eval->add_option("--max-examples", eval_args.max_examples, "Evaluate at most this many");
  eval->add_option("--threads", eval_args.threads, "Worker threads");
  decode->add_option("--limit", eval_args.limit, "Decode at most this many");

  AdvstatsArgs adv_args;
  auto* adv = app.add_subcommand("advstats", "Mean and variance of the n-step advantage");
  adv->add_option("--ckpt", adv_args.ckpt, "Checkpoint")->required();
  adv->add_option("--data", adv_args.data, "Dataset directory")->required();
  adv->add_option("--split", adv_args.split, "Split to draw examples from");
  adv->add_option("--examples", adv_args.examples, "Number of examples (0 = all)");
  adv->add_option("--rollouts", adv_args.rollouts, "Repeated estimates per trajectory");
  adv->add_option("--estimators", adv_args.estimators, "maxpro and/or krollout")->delimiter(',');
  adv->add_option("--K", adv_args.K, "Rollouts per boundary for krollout");
  adv->add_option("--n-grid", adv_args.n_grid, "Chunk lengths, e.g. 1,2,4,T");
  adv->add_option("--max-len", adv_args.max_len, "Trajectory length limit");
  adv->add_option("--seed", adv_args.seed, "Sampling seed");
  adv->add_option("--threads", adv_args.threads, "Worker threads");
  adv->add_option("--out", adv_args.out, "CSV path (default stdout)");

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "Paired comparison of run directories");
  cmp->add_option("runs", cmp_args.positional, "Baseline and candidate run directories");
  cmp->add_option("--baseline", cmp_args.baseline, "Baseline runs, one per seed");
  cmp->add_option("--candidate", cmp_args.candidate, "Candidate runs, paired by position");
  cmp->add_option("--curves", cmp_args.curves, "Write the aligned curves CSV here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return CmdGen(gen_args, out);
    if (*ingest) return CmdIngest(ingest_args, out);
    if (*train) return CmdTrain(train_args, out, err);
    if (*eval) return CmdEval(eval_args, out);
    if (*decode) return CmdDecode(eval_args, out);
    if (*adv) return CmdAdvstats(adv_args, out);
    if (*cmp) return CmdCompare(cmp_args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error at byte " << e.offset() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "schema error (" << e.field() << "): " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace seqcritic
