// config_test.cc

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

#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "seqcritic/config.h"
#include "seqcritic/errors.h"

namespace seqcritic {
namespace {

std::string ErrorOf(const std::string& schedule) {
  try {
    ParseNSchedule(schedule);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_SUITE("config") {

TEST_CASE("n-schedule grammar") {
  const auto s = ParseNSchedule("1:5,2:10,2:15");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == NScheduleEntry{NStepConfig::Steps(1), 5});
  CHECK(s[2] == NScheduleEntry{NStepConfig::Steps(2), 15});
  CHECK(FormatNSchedule(s) == "1:5,2:10,2:15");
  CHECK(ParseNSchedule("T:30")[0].n == NStepConfig::FullSequence());
  CHECK(ParseNSchedule(" 4 : 3 ")[0].epoch_end == 3);
}

TEST_CASE("n-schedule errors name the offending token") {
  CHECK(ErrorOf("1:5,x:10").find("'x:10'") != std::string::npos);
  CHECK(ErrorOf("1:5,2").find("'2'") != std::string::npos);
  CHECK(ErrorOf("1:5,2:5").find("'2:5'") != std::string::npos);
  CHECK(ErrorOf("1:0").find("'1:0'") != std::string::npos);
  CHECK(ErrorOf("1:5,,2:9").find("''") != std::string::npos);
  CHECK(ErrorOf("1:5a").find("'1:5a'") != std::string::npos);
  CHECK_FALSE(ErrorOf("").empty());
}

TEST_CASE("active n follows the piecewise schedule") {
  const auto s = ParseNSchedule("1:2,2:4,T:5");
  CHECK(ActiveNStep(s, 0) == NStepConfig::Steps(1));
  CHECK(ActiveNStep(s, 1) == NStepConfig::Steps(1));
  CHECK(ActiveNStep(s, 2) == NStepConfig::Steps(2));
  CHECK(ActiveNStep(s, 3) == NStepConfig::Steps(2));
  CHECK(ActiveNStep(s, 4) == NStepConfig::FullSequence());
  CHECK_THROWS_AS(ActiveNStep(s, 5), UsageError);
}

TEST_CASE("paper preset carries the published hyperparameters") {
  const TrainConfig c = PresetConfig("paper");
  CHECK(c.xent_lr == 4e-4);
  CHECK(c.rl_lr == 5e-5);
  CHECK(c.xent_batch == 80);
  CHECK(c.rl_batch == 32);
  CHECK(c.dropout == 0.5);
  CHECK(c.xent_epochs == 30);
  CHECK(c.estimator.K == 5);
  CHECK(c.max_len == 16);
  CHECK(c.embed_dim == 512);
  CHECK_THROWS_AS(PresetConfig("huge"), ConfigError);
}

TEST_CASE("overrides apply on top of the named preset") {
  const TrainConfig c = TrainConfigFromMap(
      {{"preset", "desk"}, {"estimator", "krollout"}, {"K", "3"}, {"n_schedule", "16:4"}});
  CHECK(c.preset == "desk");
  CHECK(c.embed_dim == PresetConfig("desk").embed_dim);
  CHECK(c.estimator.kind == Estimator::kKRollout);
  CHECK(c.estimator.K == 3);
  CHECK(c.rl_epochs() == 4);
}

TEST_CASE("invalid values are rejected") {
  CHECK_THROWS_AS(TrainConfigFromMap({{"xent_lr", "-1"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromMap({{"rl_lr", "0"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromMap({{"K", "0"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromMap({{"n_schedule", "17:3"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromMap({{"rl_batch", "two"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromMap({{"colour", "red"}}), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromMap({{"estimator", "beam"}}), ConfigError);
}

TEST_CASE("config map round-trips") {
  TrainConfig c = PresetConfig("desk");
  c.seed = 42;
  c.n_schedule = ParseNSchedule("1:3,2:6");
  c.xent_lr = 1.0 / 3.0;
  const ConfigMap m = TrainConfigToMap(c);
  CHECK(TrainConfigToMap(TrainConfigFromMap(m)) == m);
  CHECK(ConfigHash(m) == ConfigHash(TrainConfigToMap(TrainConfigFromMap(m))));
  c.seed = 43;
  CHECK(ConfigHash(TrainConfigToMap(c)) != ConfigHash(m));
  CHECK(ConfigHash(m).size() == 16);
}

TEST_CASE("config files support comments, includes and overrides") {
  const auto dir = std::filesystem::temp_directory_path() / "seqcritic_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "base.conf") << "# base\npreset = desk\nseed = 3\nK = 4\n";
  std::ofstream(dir / "run.conf") << "include base.conf\nseed = 9   # override\n\n";
  const ConfigMap m = LoadConfigFile(dir / "run.conf");
  CHECK(m.at("preset") == "desk");
  CHECK(m.at("seed") == "9");
  CHECK(m.at("K") == "4");

  std::ofstream(dir / "loop.conf") << "include loop.conf\n";
  CHECK_THROWS_AS(LoadConfigFile(dir / "loop.conf"), ConfigError);
  std::ofstream(dir / "bad.conf") << "just words\n";
  CHECK_THROWS_AS(LoadConfigFile(dir / "bad.conf"), ConfigError);
  CHECK_THROWS_AS(LoadConfigFile(dir / "absent.conf"), ConfigError);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE

}  // namespace
}  // namespace seqcritic
