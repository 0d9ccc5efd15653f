// Copyright 2026 The AFETM Authors
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

#ifndef AFETM_COMMON_HPP_
#define AFETM_COMMON_HPP_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace afetm {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad JSON, missing or mistyped fields.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

using FunctionId = std::string;
using FunctionSet = std::set<FunctionId>;

// ---------------------------------------------------------------------------
// Hashing and seed derivation.
//
// Every randomized component derives its own stream from one global seed:
//   stream = substream(seed, {tag, index, ...})
// where tags are small constants owned by each module. Streams are
// independent of scheduling, so parallel and serial runs agree.
// ---------------------------------------------------------------------------

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

// FNV-1a, 64 bit.
constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t substream(std::uint64_t seed,
                               std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = hash_combine(h, t);
  return h;
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return to_unit(rng()); }

// Unbiased integer in [0, bound).
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index is
// processed exactly once; callers write results into per-index slots.
void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

unsigned default_jobs();

}  // namespace afetm

#endif  // AFETM_COMMON_HPP_
