// cli.h

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

#ifndef SEQCRITIC_CLI_H_
#define SEQCRITIC_CLI_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace seqcritic {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line (args excludes the program name). Machine-readable
// results go to `out`, diagnostics and warnings to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Relative output paths are resolved against $SEQCRITIC_OUT when set.
std::filesystem::path ResolveOutputPath(const std::filesystem::path& path);

// File names inside a dataset directory.
inline constexpr const char* kDatasetFile = "dataset.jsonl";
inline constexpr const char* kVocabFile = "vocab.txt";

// File names inside a training run directory.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSnapshotFile = "config.snapshot";
inline constexpr const char* kXentCsv = "xent.csv";
inline constexpr const char* kRlCsv = "rl.csv";
inline constexpr const char* kXentCheckpoint = "xent_best.ckpt";
inline constexpr const char* kRlCheckpoint = "rl_final.ckpt";
inline constexpr const char* kSummaryFile = "summary.json";

const char* BuildId();

}  // namespace seqcritic

#endif  // SEQCRITIC_CLI_H_
