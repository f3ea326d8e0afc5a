// Copyright 2026 The netcpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace netcpd {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent substream from a root seed and a counter path,
/// e.g. {trial} or {trial, purpose}. The result depends only on the inputs,
/// never on how many other streams were drawn before.
inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
  std::uint64_t state = mix64(seed);
  for (std::uint64_t c : counters) state = mix64(state ^ mix64(c + 0x632be59bd9b4e019ULL));
  return Rng(state);
}

}  // namespace netcpd
