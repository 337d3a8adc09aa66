// checkpoint.cc

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

#include "seqcritic/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "seqcritic/errors.h"

namespace seqcritic {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void SaveCheckpoint(const std::filesystem::path& path,
                    const ParameterSet& params,
                    const std::map<std::string, std::string>& meta) {
  std::ostringstream header;
  header << kCheckpointMagic << '\n';
  for (const auto& [k, v] : meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos)
      throw UsageError("checkpoint meta key/value contains a separator: " + k);
    header << "meta " << k << ' ' << v << '\n';
  }
  std::size_t offset = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params.at(i);
    header << "tensor " << p.name << ' ' << p.value.rows() << ' ' << p.value.cols()
           << " f64 " << offset << '\n';
    offset += static_cast<std::size_t>(p.value.size()) * sizeof(double);
  }
  header << "end\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.at(i).value;
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw ConfigError("short write on checkpoint " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic)
    throw ParseError(path.string() + ": not a " + std::string(kCheckpointMagic) + " file", 0);

  struct Entry {
    std::string name;
    int rows, cols;
    std::size_t offset;
  };
  Checkpoint ckpt;
  std::vector<Entry> entries;
  while (true) {
    if (!std::getline(in, line))
      throw ParseError(path.string() + ": manifest not terminated", static_cast<std::size_t>(in.tellg()));
    if (line == "end") break;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "meta") {
      std::string key, value;
      ls >> key;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ckpt.meta[key] = value;
    } else if (kind == "tensor") {
      Entry e;
      std::string dtype;
      ls >> e.name >> e.rows >> e.cols >> dtype >> e.offset;
      if (!ls || dtype != "f64")
        throw ParseError(path.string() + ": bad tensor line '" + line + "'", 0);
      entries.push_back(e);
    } else {
      throw ParseError(path.string() + ": unknown manifest line '" + line + "'", 0);
    }
  }
  const std::streampos data_start = in.tellg();
  for (const auto& e : entries) {
    Parameter& p = ckpt.params.Add(e.name, e.rows, e.cols);
    in.seekg(data_start + static_cast<std::streamoff>(e.offset));
    in.read(reinterpret_cast<char*>(p.value.data()),
            static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    if (!in) throw ParseError(path.string() + ": truncated tensor " + e.name, e.offset);
  }
  return ckpt;
}

void AssignWeights(ParameterSet& dst, const ParameterSet& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) {
    Parameter& p = dst.at(i);
    if (!src.Contains(p.name))
      throw ConfigError("checkpoint lacks parameter " + p.name);
    const Parameter& q = src.Get(p.name);
    if (q.value.rows() != p.value.rows() || q.value.cols() != p.value.cols())
      throw ConfigError("checkpoint parameter " + p.name + " has wrong shape");
    p.value = q.value;
  }
}

}  // namespace seqcritic
