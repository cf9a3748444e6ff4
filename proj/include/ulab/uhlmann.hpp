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

// Uhlmann instances, the canonical cutoff partial isometry and its completion.

#ifndef ULAB_UHLMANN_HPP
#define ULAB_UHLMANN_HPP

#include <optional>

#include "ulab/circuit.hpp"
#include "ulab/io.hpp"
#include "ulab/random.hpp"
#include "ulab/state.hpp"

namespace ulab {

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

/// A pair of pure states on A (x) B. Circuit instances prepare them from
/// |0^{2n}> with A the first n qubits; raw instances carry amplitudes.
struct UhlmannInstance {
  unsigned n = 0;
  std::optional<Circuit> C, D;
  BipartiteState psi;  // |C>
  BipartiteState phi;  // |D>

  static UhlmannInstance from_circuits(const Circuit& c, const Circuit& d);
  static UhlmannInstance from_raw(BipartiteState psi, BipartiteState phi);

  bool is_circuit() const { return C.has_value(); }
  std::size_t dA() const { return psi.dA; }
  std::size_t dB() const { return psi.dB; }
  Dims dims() const { return {psi.dA, psi.dB}; }
};

struct InstanceInfo {
  double kappa;
  std::size_t dA;
  std::size_t dB;
};

/// Checks structure and reports F(rho_A, sigma_A).
InstanceInfo validate_instance(const UhlmannInstance& x);

/// Operator with singular values in {0, 1}.
struct PartialIsometry {
  Mat w;
  Mat support;  // W^dagger W
  double eta = 0.0;

  explicit PartialIsometry(Mat m, double eta = 0.0, double tol = 1e-9);
  std::size_t rank() const;
};

/// Unitary completing a partial isometry on its support.
struct Completion {
  Mat unitary;
};

/// sgn_eta(Tr_A |phi><psi|), acting on B.
PartialIsometry canonical_uhlmann(const UhlmannInstance& x, double eta = 0.0);
/// U_f V_f^dagger from the full SVD of W.
Completion unitary_completion(const PartialIsometry& w);
/// |<phi| (id (x) W) |psi>|^2.
double uhlmann_overlap(const UhlmannInstance& x, const Mat& w);

/// (id (x) U~) on register `reg_b` of a joint state.
Vec apply_uhlmann(const UhlmannInstance& x, double eta, const Vec& joint, const Dims& dims, std::size_t reg_b);
Mat apply_uhlmann(const UhlmannInstance& x, double eta, const Mat& rho, const Dims& dims, std::size_t reg_b);
/// (id (x) U~)|C>.
Vec apply_uhlmann(const UhlmannInstance& x, double eta = 0.0);

/// Padded instance with registers A' = (flag, A) and B' = (B, flag):
/// |E> = sqrt(alpha)|0>|C>|0> + sqrt(1-alpha)|1...1>, likewise |F>.
/// If `kappa2` is given, alpha must satisfy alpha <= (1-kappa2)/(1-kappa1).
UhlmannInstance pad_instance(const UhlmannInstance& x, double alpha, std::optional<double> kappa2 = std::nullopt);
/// Exact fidelity of the padded pair: (alpha sqrt(kappa1) + 1 - alpha)^2.
double padded_fidelity(double kappa1, double alpha);

UhlmannInstance random_raw_instance(std::size_t dA, std::size_t dB, Rng& rng);
UhlmannInstance random_circuit_instance(unsigned n, std::size_t gates, Rng& rng);
/// Random raw instance with F(rho_A, sigma_A) = kappa exactly. Both states
/// share an A-side Schmidt basis; the B-side bases are independent.
UhlmannInstance instance_with_fidelity(std::size_t dA, std::size_t dB, double kappa, Rng& rng);
/// Real amplitudes with |D> = (id (x) O)|C> for a random orthogonal O; fidelity one.
UhlmannInstance random_real_instance(std::size_t dA, std::size_t dB, Rng& rng);

json instance_to_json(const UhlmannInstance& x);
UhlmannInstance instance_from_json(const json& j);

}  // namespace ulab

#endif  // ULAB_UHLMANN_HPP
