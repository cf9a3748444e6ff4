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

// Black-hole radiation decoding and interference detection.

#ifndef ULAB_PHYSICS_HPP
#define ULAB_PHYSICS_HPP

#include <optional>

#include "ulab/channel.hpp"
#include "ulab/circuit.hpp"
#include "ulab/io.hpp"
#include "ulab/random.hpp"

namespace ulab {

class PromiseViolation : public Error {
 public:
  using Error::Error;
};

/// P on n qubits maps A (qubit 0) and G (the rest, starting in |0>) to
/// H (the first n - r qubits) and R (the last r).
struct BlackHoleInstance {
  unsigned n = 0;
  unsigned r = 0;
  Mat P;
  std::optional<Circuit> circuit;

  static BlackHoleInstance from_circuit(const Circuit& c, unsigned r);
  static BlackHoleInstance from_unitary(const Mat& p, unsigned r);
  void validate() const;
  /// (id_B (x) P)(|EPR>_BA |0>_G) on B H R.
  Vec state() const;
};

/// The channel A -> R that P induces, with H as environment.
ChannelDesc black_hole_channel(const BlackHoleInstance& bh);

struct BlackHoleDecoding {
  ChannelDesc decoder;  // R -> A'
  double epr_fidelity = 0.0;
  double channel_fidelity = 0.0;  // decoder_from_uhlmann on the induced channel
  double decoupling = 0.0;
};

BlackHoleDecoding bh_decode(const BlackHoleInstance& bh);

/// Orthogonal states |C>, |D> on n qubits with preparation unitaries.
struct OrthPair {
  unsigned n = 0;
  std::optional<Circuit> C_circuit, D_circuit;
  Mat C_prep, D_prep;
  Vec C, D;

  static OrthPair from_circuits(const Circuit& c, const Circuit& d);
  static OrthPair from_unitaries(const Mat& c, const Mat& d);
  /// Preparations complete each state to a unitary.
  static OrthPair from_states(const Vec& c, const Vec& d);
  void validate(double tol = 1e-9) const;
};

OrthPair random_orth_pair(unsigned n, Rng& rng);

/// I - 2ww^dagger with w along psi - phi; swaps orthogonal psi and phi.
Mat householder_swap(const Vec& psi, const Vec& phi);
/// max of ||U psi - phi|| and ||U phi - psi||.
double swap_error(const Mat& u, const Vec& psi, const Vec& phi);

/// (H (x) id) ctrl-U (H (x) id) on 1 + n qubits, control first. Measuring
/// the control gives 0 on (psi + phi)/sqrt2 and 1 on (psi - phi)/sqrt2.
Mat swap_to_distinguisher(const Mat& u, const Vec& psi, const Vec& phi, double tol = 1e-8);
/// V^dagger (Z (x) id) V with the decision on qubit 0.
Mat distinguisher_to_swap(const Mat& v);
/// Probability of reading 1 on qubit 0 after v.
double decision_probability(const Mat& v, const Vec& input);

/// The controlled swap on B' B (control first) from the Uhlmann unitary
/// between the two extended preparation states.
Mat controlled_swap_from_uhlmann(const OrthPair& pair);
/// Hadamard test with a controlled swap: 0 for (C + D)/sqrt2, 1 for (C - D)/sqrt2.
int interference_detect(const Mat& controlled_swap, const Vec& input, double tol = 1e-6);
int interference_detect(const OrthPair& pair, const Vec& input, double tol = 1e-6);

json blackhole_to_json(const BlackHoleInstance& bh);
BlackHoleInstance blackhole_from_json(const json& j);
json pair_to_json(const OrthPair& p);
OrthPair pair_from_json(const json& j);

}  // namespace ulab

#endif  // ULAB_PHYSICS_HPP
