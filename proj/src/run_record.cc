// run_record.cc

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

#include "seqcritic/run_record.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "seqcritic/errors.h"

namespace seqcritic {

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Opt(const std::optional<double>& v) { return v ? Num(*v) : ""; }

std::optional<double> ParseOpt(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return std::stod(cell);
}

}  // namespace

std::vector<RunRow> RunRecord::Evaluations() const {
  std::vector<RunRow> out;
  for (const auto& r : rows_)
    if (r.val_cider) out.push_back(r);
  return out;
}

std::string RunRecord::ToCsv(bool with_wallclock) const {
  std::ostringstream out;
  out << "# config_hash=" << config_hash_ << "\n";
  std::string header = kRunRecordHeader;
  if (!with_wallclock) header = header.substr(0, header.rfind(','));
  out << header << "\n";
  for (const auto& r : rows_) {
    out << r.step << ',' << r.phase << ',' << r.n << ',' << r.estimator << ','
        << Opt(r.loss) << ',' << Opt(r.val_cider) << ','
        << (r.val_bleu ? Num((*r.val_bleu)[3]) : "");
    if (with_wallclock) out << ',' << Num(r.wallclock_s);
    out << "\n";
  }
  return out.str();
}

void RunRecord::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ToCsv();
}

RunRecord RunRecord::ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run record " + path.string());
  RunRecord record;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config_hash=";
      if (line.rfind(key, 0) == 0) record.config_hash_ = line.substr(key.size());
      continue;
    }
    if (!header_seen) {
      if (line != kRunRecordHeader)
        throw ConfigError(path.string() + ": unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 8)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 8 columns");
    RunRow r;
    try {
      r.step = std::stol(cells[0]);
      r.phase = cells[1];
      r.n = cells[2];
      r.estimator = cells[3];
      r.loss = ParseOpt(cells[4]);
      r.val_cider = ParseOpt(cells[5]);
      if (auto b4 = ParseOpt(cells[6])) r.val_bleu = std::array<double, 4>{0, 0, 0, *b4};
      r.wallclock_s = std::stod(cells[7]);
    } catch (const std::invalid_argument&) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
    record.rows_.push_back(std::move(r));
  }
  if (!header_seen) throw ConfigError(path.string() + ": missing header");
  return record;
}

}  // namespace seqcritic
