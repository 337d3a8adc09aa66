// config.cc

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

#include "seqcritic/config.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "seqcritic/errors.h"

namespace seqcritic {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void ParseInto(ConfigMap& out, const std::string& text,
               const std::filesystem::path& base_dir,
               std::set<std::filesystem::path>& stack);

void LoadInto(ConfigMap& out, const std::filesystem::path& path,
              std::set<std::filesystem::path>& stack) {
  auto canon = std::filesystem::weakly_canonical(path);
  if (stack.count(canon)) throw ConfigError("config include cycle at " + path.string());
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  stack.insert(canon);
  ParseInto(out, ss.str(), path.parent_path(), stack);
  stack.erase(canon);
}

void ParseInto(ConfigMap& out, const std::string& text,
               const std::filesystem::path& base_dir,
               std::set<std::filesystem::path>& stack) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.rfind("include ", 0) == 0) {
      std::filesystem::path inc = Trim(line.substr(8));
      LoadInto(out, inc.is_absolute() ? inc : base_dir / inc, stack);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    out[Trim(line.substr(0, eq))] = Trim(line.substr(eq + 1));
  }
}

}  // namespace

ConfigMap LoadConfigFile(const std::filesystem::path& path) {
  ConfigMap out;
  std::set<std::filesystem::path> stack;
  LoadInto(out, path, stack);
  return out;
}

ConfigMap ParseConfigText(const std::string& text,
                          const std::filesystem::path& base_dir) {
  ConfigMap out;
  std::set<std::filesystem::path> stack;
  ParseInto(out, text, base_dir, stack);
  return out;
}

std::string FormatConfig(const ConfigMap& config) {
  std::string out;
  for (const auto& [k, v] : config) out += k + " = " + v + "\n";
  return out;
}

std::string ConfigHash(const ConfigMap& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : FormatConfig(config)) h = (h ^ c) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<NScheduleEntry> ParseNSchedule(const std::string& text) {
  std::vector<NScheduleEntry> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const std::string t = Trim(token);
    const auto colon = t.find(':');
    if (t.empty() || colon == std::string::npos)
      throw ConfigError("n-schedule: bad entry '" + t + "' (expected n:epoch_end)");
    NScheduleEntry e;
    try {
      e.n = NStepConfig::Parse(Trim(t.substr(0, colon)));
    } catch (const ConfigError&) {
      throw ConfigError("n-schedule: bad n in entry '" + t + "'");
    }
    const std::string end = Trim(t.substr(colon + 1));
    std::size_t used = 0;
    try {
      e.epoch_end = std::stoi(end, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (end.empty() || used != end.size() || e.epoch_end < 1)
      throw ConfigError("n-schedule: bad epoch end in entry '" + t + "'");
    if (!out.empty() && e.epoch_end <= out.back().epoch_end)
      throw ConfigError("n-schedule: epoch ends must increase, entry '" + t + "'");
    out.push_back(e);
  }
  if (out.empty()) throw ConfigError("n-schedule: empty schedule");
  if (Trim(text).back() == ',') throw ConfigError("n-schedule: trailing ',' after '" + text + "'");
  return out;
}

std::string FormatNSchedule(const std::vector<NScheduleEntry>& schedule) {
  std::string out;
  for (const auto& e : schedule) {
    if (!out.empty()) out += ',';
    out += e.n.ToString() + ":" + std::to_string(e.epoch_end);
  }
  return out;
}

NStepConfig ActiveNStep(const std::vector<NScheduleEntry>& schedule, int epoch) {
  for (const auto& e : schedule)
    if (epoch < e.epoch_end) return e.n;
  throw UsageError("n-schedule: epoch " + std::to_string(epoch) + " past the schedule");
}

TrainConfig PresetConfig(const std::string& name) {
  TrainConfig c;
  if (name == "paper") {
    c.preset = "paper";
    return c;
  }
  if (name == "desk") {
    c.preset = "desk";
    c.embed_dim = 32;
    c.hidden_dim = 64;
    c.init_scale = 0.1;
    c.xent_lr = 4e-3;
    c.xent_batch = 16;
    c.xent_epochs = 4;
    c.dropout = 0.1;
    c.rl_lr = 5e-4;
    c.rl_batch = 16;
    c.n_schedule = {{NStepConfig::Steps(1), 10}};
    c.eval_interval = 50;
    c.eval_max_examples = 0;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "' (expected desk|paper)");
}

namespace {

double ToDouble(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  return d;
}

long long ToInt(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long d = 0;
  try {
    d = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
  return d;
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + " expects true|false, got '" + v + "'");
}

std::string FormatDouble(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

}  // namespace

TrainConfig TrainConfigFromMap(const ConfigMap& overrides) {
  auto it = overrides.find("preset");
  TrainConfig c = PresetConfig(it == overrides.end() ? "paper" : it->second);
  for (const auto& [k, v] : overrides) {
    if (k == "preset") continue;
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(ToInt(k, v));
    else if (k == "embed_dim") c.embed_dim = static_cast<int>(ToInt(k, v));
    else if (k == "hidden_dim") c.hidden_dim = static_cast<int>(ToInt(k, v));
    else if (k == "init_scale") c.init_scale = ToDouble(k, v);
    else if (k == "max_len") c.max_len = static_cast<int>(ToInt(k, v));
    else if (k == "xent_lr") c.xent_lr = ToDouble(k, v);
    else if (k == "xent_batch") c.xent_batch = static_cast<int>(ToInt(k, v));
    else if (k == "xent_epochs") c.xent_epochs = static_cast<int>(ToInt(k, v));
    else if (k == "dropout") c.dropout = ToDouble(k, v);
    else if (k == "rl_lr") c.rl_lr = ToDouble(k, v);
    else if (k == "rl_batch") c.rl_batch = static_cast<int>(ToInt(k, v));
    else if (k == "estimator") c.estimator.kind = ParseEstimator(v);
    else if (k == "K") c.estimator.K = static_cast<int>(ToInt(k, v));
    else if (k == "fresh_per_chunk") c.estimator.fresh_per_chunk = ToBool(k, v);
    else if (k == "n_schedule") c.n_schedule = ParseNSchedule(v);
    else if (k == "normalization") {
      if (v == "per_token") c.normalization = Normalization::kPerToken;
      else if (v == "sum") c.normalization = Normalization::kSum;
      else throw ConfigError("config: normalization expects per_token|sum, got '" + v + "'");
    }
    else if (k == "eval_interval") c.eval_interval = static_cast<int>(ToInt(k, v));
    else if (k == "eval_max_examples") c.eval_max_examples = static_cast<int>(ToInt(k, v));
    else if (k == "threads") c.threads = static_cast<int>(ToInt(k, v));
    else throw ConfigError("config: unknown key '" + k + "'");
  }
  if (c.xent_lr <= 0 || c.rl_lr <= 0) throw ConfigError("config: learning rates must be positive");
  if (c.xent_batch < 1 || c.rl_batch < 1) throw ConfigError("config: batch sizes must be >= 1");
  if (c.estimator.K < 1) throw ConfigError("config: K must be >= 1");
  if (c.dropout < 0 || c.dropout >= 1)
    throw ConfigError("config: dropout must be in [0, 1)");
  for (const auto& e : c.n_schedule)
    if (!e.n.full_sequence && e.n.n > c.max_len)
      throw ConfigError("config: n-schedule entry n=" + e.n.ToString() +
                        " exceeds max_len " + std::to_string(c.max_len));
  return c;
}

ConfigMap TrainConfigToMap(const TrainConfig& c) {
  ConfigMap m;
  m["preset"] = c.preset;
  m["seed"] = std::to_string(c.seed);
  m["embed_dim"] = std::to_string(c.embed_dim);
  m["hidden_dim"] = std::to_string(c.hidden_dim);
  m["init_scale"] = FormatDouble(c.init_scale);
  m["max_len"] = std::to_string(c.max_len);
  m["xent_lr"] = FormatDouble(c.xent_lr);
  m["xent_batch"] = std::to_string(c.xent_batch);
  m["xent_epochs"] = std::to_string(c.xent_epochs);
  m["dropout"] = FormatDouble(c.dropout);
  m["rl_lr"] = FormatDouble(c.rl_lr);
  m["rl_batch"] = std::to_string(c.rl_batch);
  m["estimator"] = EstimatorName(c.estimator.kind);
  m["K"] = std::to_string(c.estimator.K);
  m["fresh_per_chunk"] = c.estimator.fresh_per_chunk ? "true" : "false";
  m["n_schedule"] = FormatNSchedule(c.n_schedule);
  m["normalization"] = c.normalization == Normalization::kPerToken ? "per_token" : "sum";
  m["eval_interval"] = std::to_string(c.eval_interval);
  m["eval_max_examples"] = std::to_string(c.eval_max_examples);
  m["threads"] = std::to_string(c.threads);
  return m;
}

}  // namespace seqcritic
