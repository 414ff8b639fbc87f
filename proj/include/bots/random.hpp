// Copyright 2026 The BOTS Authors. All rights reserved.
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

#ifndef BOTS_RANDOM_HPP_
#define BOTS_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bots {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive hash of a small tuple of integers.
inline std::uint64_t HashIndices(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (std::uint64_t p : parts) h = Mix64(h ^ Mix64(p));
  return h;
}

// Seed for one episode: base xor hash(rep, phase, index). Phase 0 is the
// micro-randomized trial, phase i + 1 is optimization round i.
inline std::uint64_t EpisodeSeed(std::uint64_t base, std::uint64_t rep,
                                 std::uint64_t phase, std::uint64_t index) {
  return base ^ HashIndices({rep, phase, index});
}

// Seed for per-round model fitting and acquisition in one repetition.
inline std::uint64_t RoundSeed(std::uint64_t base, std::uint64_t rep,
                               std::uint64_t round) {
  return base ^ HashIndices({0xb0b0ULL, rep, round});
}

}  // namespace bots

#endif  // BOTS_RANDOM_HPP_
