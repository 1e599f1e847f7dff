/*
 * Copyright 2026 The tvdepth authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TVDEPTH_RNG_HPP
#define TVDEPTH_RNG_HPP

#include <cstdint>
#include <random>

namespace tvdepth {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014). Bijective on uint64.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/**
 * Counter-based seed splitting: stream k of a base seed. Substreams of
 * distinct counters are decorrelated, so repetitions and curves can be
 * generated in parallel while staying reproducible.
 */
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter) {
  return splitmix64(base + counter * 0x9E3779B97F4A7C15ULL);
}

/// Engine for substream `counter` of `base`.
inline std::mt19937_64 make_engine(std::uint64_t base, std::uint64_t counter) {
  return std::mt19937_64(derive_seed(base, counter));
}

}  // namespace tvdepth

#endif  // TVDEPTH_RNG_HPP
