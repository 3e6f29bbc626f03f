// Copyright 2026 The suscept-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUSCEPT_RNG_HPP_
#define SUSCEPT_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace suscept {

// Every chain owns one of these; never share an engine across threads.
using Rng = std::mt19937_64;

// Deterministically derives the seed of a named sub-stream, so that a single
// run seed fans out into independent per-chain streams regardless of the
// order (or thread) in which the chains are executed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                          std::uint64_t index = 0);

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// 64-bit FNV-1a; used for fingerprints, not for anything adversarial.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace suscept

#endif  // SUSCEPT_RNG_HPP_
