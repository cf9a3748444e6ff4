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

#ifndef ULAB_CIRCUIT_HPP
#define ULAB_CIRCUIT_HPP

#include <array>
#include <string>
#include <string_view>

#include "ulab/core.hpp"

namespace ulab {

enum class GateKind { H, T, Tdg, S, Sdg, X, Y, Z, CNOT, CZ, SWAP };

std::string_view gate_name(GateKind k);
GateKind parse_gate(std::string_view name);
unsigned gate_arity(GateKind k);
/// Dense gate matrix (2x2 or 4x4). For CNOT qubit 0 of the pair is the control.
Mat gate_matrix(GateKind k);

struct Gate {
  GateKind kind;
  std::array<unsigned, 2> q{0, 0};
};

/// Ordered gate list over a fixed qubit count.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(unsigned n_qubits) : n_(n_qubits) {}

  unsigned n_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  Circuit& add(GateKind k, unsigned q0);
  Circuit& add(GateKind k, unsigned q0, unsigned q1);
  Circuit& append(const Circuit& other);

  /// Applies the circuit in place. The state must have 2^n amplitudes.
  void apply_inplace(Vec& state) const;
  Vec apply(const Vec& state) const;
  /// Circuit applied to the basis state |index>.
  Vec run(std::size_t index = 0) const;
  /// Materialized 2^n x 2^n unitary.
  Mat unitary() const;
  Circuit inverse() const;
  /// Circuit on n_a + n_b qubits; `b` acts on the trailing qubits.
  static Circuit tensor(const Circuit& a, const Circuit& b);
  /// Same gates on a wider register, shifted by `offset` qubits.
  Circuit widened(unsigned n_total, unsigned offset) const;

 private:
  unsigned n_ = 0;
  std::vector<Gate> gates_;
};

}  // namespace ulab

#endif  // ULAB_CIRCUIT_HPP
