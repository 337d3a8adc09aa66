// seqcritic/run_record.h

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

#ifndef SEQCRITIC_RUN_RECORD_H_
#define SEQCRITIC_RUN_RECORD_H_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace seqcritic {

struct RunRow {
  long step = 0;
  std::string phase;      // "xent" or "rl"
  std::string n;          // active chunk length ("" during xent)
  std::string estimator;  // "" during xent
  std::optional<double> loss;
  std::optional<double> val_cider;
  std::optional<std::array<double, 4>> val_bleu;  // BLEU-1..4
  double wallclock_s = 0.0;
};

// Append-only training log. The CSV carries one comment line with the
// config hash, then
//   step,phase,n,estimator,loss,val_cider,val_bleu4,wallclock_s
// with empty cells for values not measured at that step.
class RunRecord {
 public:
  RunRecord() = default;
  explicit RunRecord(std::string config_hash) : config_hash_(std::move(config_hash)) {}

  void Append(RunRow row) { rows_.push_back(std::move(row)); }
  const std::vector<RunRow>& rows() const { return rows_; }
  const std::string& config_hash() const { return config_hash_; }

  // Rows that carry a validation measurement.
  std::vector<RunRow> Evaluations() const;

  std::string ToCsv(bool with_wallclock = true) const;
  void WriteCsv(const std::filesystem::path& path) const;
  // Reads back what WriteCsv wrote. BLEU-1..3 are not stored in the CSV.
  static RunRecord ReadCsv(const std::filesystem::path& path);

 private:
  std::string config_hash_;
  std::vector<RunRow> rows_;
};

inline constexpr const char* kRunRecordHeader =
    "step,phase,n,estimator,loss,val_cider,val_bleu4,wallclock_s";

}  // namespace seqcritic

#endif  // SEQCRITIC_RUN_RECORD_H_
