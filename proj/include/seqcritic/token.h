// seqcritic/token.h

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

#ifndef SEQCRITIC_TOKEN_H_
#define SEQCRITIC_TOKEN_H_

#include <cstdint>

namespace seqcritic {

using Token = std::int32_t;

inline constexpr Token kBos = 0;
inline constexpr Token kEos = 1;
inline constexpr Token kUnk = 2;
inline constexpr Token kFirstWordToken = 3;

// splitmix64 finalizer; used to derive independent per-item RNG seeds.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  return MixSeed(MixSeed(a) ^ (b + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b,
                             std::uint64_t c) {
  return MixSeed(MixSeed(a, b), c);
}

}  // namespace seqcritic

#endif  // SEQCRITIC_TOKEN_H_
