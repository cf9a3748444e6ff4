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

// Canonical bit commitments |psi_b> = C_b|0...0> split into a commit
// register C and a reveal register R, their statistical security, and the
// attacks that Uhlmann transformations give.

#ifndef ULAB_CRYPTO_HPP
#define ULAB_CRYPTO_HPP

#include <optional>
#include <vector>

#include "ulab/channel.hpp"
#include "ulab/circuit.hpp"
#include "ulab/io.hpp"
#include "ulab/random.hpp"
#include "ulab/uhlmann.hpp"

namespace ulab {

class InvalidScheme : public Error {
 public:
  using Error::Error;
};

/// All registers are qubits. The committed states are always materialized;
/// the circuits are kept when the scheme has a gate-level description, and
/// `prep` holds dense preparation unitaries when only that exists.
struct CommitmentScheme {
  unsigned n_qubits = 0;
  std::optional<Circuit> C0, C1;
  std::optional<Mat> prep0, prep1;
  Vec psi0, psi1;
  std::vector<unsigned> commit;  // register C, sorted
  std::vector<unsigned> reveal;  // register R, the complement

  static CommitmentScheme from_circuits(const Circuit& c0, const Circuit& c1, std::vector<unsigned> commit);
  static CommitmentScheme from_states(Vec psi0, Vec psi1, unsigned n_qubits, std::vector<unsigned> commit);

  bool is_circuit() const { return C0.has_value(); }
  std::size_t dC() const { return std::size_t{1} << commit.size(); }
  std::size_t dR() const { return std::size_t{1} << reveal.size(); }
  const Vec& state(int b) const { return b == 0 ? psi0 : psi1; }
  /// Reduced state of |psi_b> on C.
  Mat commit_state(int b) const;
  /// |psi_b> as a dC x dR matrix (C rows, R columns).
  Mat split(int b) const;
  void validate(double tol = 1e-9) const;
};

struct SecurityReport {
  double hiding_stat = 0.0;
  double binding_opt = 0.0;
  std::optional<double> binding_attack;
};

/// Channel on R; d_in = d_out = dR.
SecurityReport evaluate(const CommitmentScheme& s, const std::optional<ChannelDesc>& attack = std::nullopt);
/// F((A (x) id_C)(psi_0), psi_1).
double attack_fidelity(const CommitmentScheme& s, const ChannelDesc& attack);

/// The pair (|psi_0>, |psi_1>) read as an instance with A = C and B = R.
UhlmannInstance scheme_instance(const CommitmentScheme& s);
/// Completion of the canonical Uhlmann isometry on R: the optimal cheat.
ChannelDesc uhlmann_attack(const CommitmentScheme& s);

/// (|0>|psi_0> + (-1)^b |1>|psi_1>)/sqrt2 on a new leading qubit; the old
/// reveal qubits plus the new one become the commit register.
CommitmentScheme flavor_switch(const CommitmentScheme& s);
/// k parallel copies; copy j holds qubits [j n, (j + 1) n).
CommitmentScheme tensor_amplify(const CommitmentScheme& s, std::size_t k);
/// Commit register = the A half of the instance.
CommitmentScheme commitment_from_instance(const UhlmannInstance& x);

/// Haar states (gates = 0) or random circuits of the given size.
CommitmentScheme random_scheme(unsigned n, unsigned n_commit, Rng& rng, std::size_t gates = 0);

/// Keys k in [2^lambda] mapped to states |phi_k> on a fixed number of qubits.
struct KeyedFamily {
  unsigned lambda = 0;
  std::vector<Vec> states;

  std::size_t n_keys() const { return std::size_t{1} << lambda; }
  std::size_t dim() const { return static_cast<std::size_t>(states.at(0).size()); }
  Mat gram() const;
  void validate(double tol = 1e-9) const;
};

/// 2^{-n/4} sum_{x in A} |x> for the span A of each key's generators
/// (bit masks over n qubits).
KeyedFamily subspace_family(unsigned n, const std::vector<std::vector<std::size_t>>& generators);

/// eps(k, k') = <phi_k| M_k' |phi_k> for a POVM indexed by guesses k'.
RMat adversary_from_povm(const KeyedFamily& g, const std::vector<Mat>& povm);
/// Square-root measurement for the uniform ensemble.
std::vector<Mat> pretty_good_measurement(const KeyedFamily& g);

struct CloneAttack {
  UhlmannInstance instance;  // A = K, B = S K' T
  double kappa_lower = 0.0;
  double kappa = 0.0;  // F(rho_K, sigma_K)
};

/// |C> = 2^{-lambda/2} sum_k |k>|phi_k>|0>|0> and |D> with |phi_k>^2 in T.
/// kappa_lower is a valid bound when eps comes from a real measurement on
/// one copy of |phi_k>.
CloneAttack clone_attack_states(const KeyedFamily& g, const RMat& eps);
/// Average over keys of F(solver(|phi_k>|0>|0>), |phi_k>^3); solver is a
/// unitary on S K' T.
double clone_fidelity(const CloneAttack& a, const KeyedFamily& g, const Mat& solver);

json to_json(const SecurityReport& r);
json scheme_to_json(const CommitmentScheme& s);
CommitmentScheme scheme_from_json(const json& j);

}  // namespace ulab

#endif  // ULAB_CRYPTO_HPP
