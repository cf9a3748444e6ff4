// Copyright 2026 The uhlmann-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded randomness. The engine is std::mt19937_64, whose output sequence is
// fixed by the C++ standard; uniform and normal variates are derived here by
// hand so results do not depend on the standard library's distributions.

#ifndef ULAB_RANDOM_HPP
#define ULAB_RANDOM_HPP

#include <random>
#include <string_view>

#include "ulab/circuit.hpp"
#include "ulab/core.hpp"

namespace ulab {

using Seed = std::uint64_t;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Child seed for operation `tag`, trial `index`.
Seed child_seed(Seed parent, std::string_view tag, std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(Seed seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (eng_() >> 63) != 0; }
  double normal();
  /// Standard complex Gaussian (E|z|^2 = 1).
  cplx cnormal();

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Vec haar_state(std::size_t d, Rng& rng);
Vec real_random_state(std::size_t d, Rng& rng);
/// Haar unitary from the QR decomposition of a Ginibre matrix with phase fix.
Mat haar_unitary(std::size_t d, Rng& rng);
/// Random density matrix of the given rank (Ginibre construction).
Mat random_density(std::size_t d, std::size_t rank, Rng& rng);
/// Random circuit of `gates` gates drawn uniformly from the gate set.
Circuit random_circuit(unsigned n, std::size_t gates, Rng& rng);

/// Clifford group element as a stabilizer tableau. Row j < n is the image of
/// X_j, row n + j the image of Z_j; each row holds x bits, z bits and a sign.
struct CliffordTableau {
  unsigned n = 0;
  std::vector<std::vector<std::uint8_t>> x, z;
  std::vector<std::uint8_t> sign;
};

/// Uniformly random Clifford tableau.
CliffordTableau random_clifford_tableau(unsigned n, Rng& rng);
/// Dense unitary of a tableau with the global phase fixed so that the first
/// nonzero entry of column 0 is real and positive.
Mat clifford_unitary(const CliffordTableau& t);
inline Mat random_clifford(unsigned n, Rng& rng) { return clifford_unitary(random_clifford_tableau(n, rng)); }
Mat random_clifford(unsigned n, Seed seed);

/// Dense Hermitian Pauli i^{x.z} X^x Z^z (times -1 if sign).
Mat pauli_matrix(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& z, bool sign);

}  // namespace ulab

#endif  // ULAB_RANDOM_HPP
