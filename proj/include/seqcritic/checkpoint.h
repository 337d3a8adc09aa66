// seqcritic/checkpoint.h

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

#ifndef SEQCRITIC_CHECKPOINT_H_
#define SEQCRITIC_CHECKPOINT_H_

// Checkpoint file layout (all text lines end in '\n'):
//
//   SEQCRITIC-CKPT-1
//   meta <key> <value>                 zero or more
//   tensor <name> <rows> <cols> f64 <byte_offset>
//   ...
//   end
//   <raw little-endian float64 arrays, row-major, back to back>
//
// byte_offset is relative to the first byte after the "end" line.

#include <filesystem>
#include <map>
#include <string>

#include "seqcritic/tapegrad.h"

namespace seqcritic {

inline constexpr const char* kCheckpointMagic = "SEQCRITIC-CKPT-1";

struct Checkpoint {
  std::map<std::string, std::string> meta;
  ParameterSet params;
};

void SaveCheckpoint(const std::filesystem::path& path,
                    const ParameterSet& params,
                    const std::map<std::string, std::string>& meta);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Copies weights by name into an existing set; every name in `dst` must be
// present in `src` with the same shape.
void AssignWeights(ParameterSet& dst, const ParameterSet& src);

}  // namespace seqcritic

#endif  // SEQCRITIC_CHECKPOINT_H_
