// Copyright 2026 The qroute Authors
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
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qroute {

/// Base error for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad arguments or violated domain invariants (CLI exit code 3).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Unparseable or mis-schemaed input files (CLI exit code 4).
class DataFormatError : public Error {
 public:
  explicit DataFormatError(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// Deterministic randomness.
//
// std::mt19937_64 is bit-exact across platforms but the standard
// distributions are not, so all draws go through the helpers below.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// splitmix64 step; used to derive per-stream seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Modulo bias is irrelevant at the sizes used here (n << 2^64).
  return rng() % n;
}

/// One categorical draw by inverse CDF over `probs` (need not be normalized
/// exactly; the last bucket absorbs rounding).
inline std::size_t categorical(Rng& rng, const std::vector<double>& probs) {
  double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.empty() ? 0 : probs.size() - 1;
}

// ---------------------------------------------------------------------------
// Basis-index bit utilities.
//
// Convention used everywhere in this library: register (qubit) 0 is the
// least-significant bit of a basis index, and for a register pair the first
// element of the pair is the less-significant bit, j = j1 + 2*j2.
// ---------------------------------------------------------------------------

/// Two-bit pair index from the bits of the first and second pair element.
inline int pair_index(int j1, int j2) { return j1 + 2 * j2; }

/// Bit of the first pair element.
inline int pair_bit1(int j) { return j & 1; }

/// Bit of the second pair element.
inline int pair_bit2(int j) { return (j >> 1) & 1; }

inline int bit_of(std::uint64_t index, int position) {
  return static_cast<int>((index >> position) & 1ULL);
}

inline int popcount2(int j) { return (j & 1) + ((j >> 1) & 1); }

/// Render a basis index as a bitstring where character i is register i.
inline std::string index_to_bits(std::uint64_t index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if (bit_of(index, q)) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

/// Parse a bitstring (character i is register i) back to a basis index.
inline std::uint64_t bits_to_index(const std::string& bits) {
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    char c = bits[i];
    if (c != '0' && c != '1')
      throw ValidationError("bitstring may contain only '0'/'1', got: " + bits);
    if (c == '1') index |= 1ULL << i;
  }
  return index;
}

}  // namespace qroute
