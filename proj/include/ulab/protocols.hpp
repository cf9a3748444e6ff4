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

// Simulated interactive protocols: the zero-knowledge verifier for Uhlmann
// instances, hardness amplification, density matrix exponentiation, the
// approximate measurement and the QIP verifier with an ideal preparation oracle.

#ifndef ULAB_PROTOCOLS_HPP
#define ULAB_PROTOCOLS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ulab/channel.hpp"
#include "ulab/io.hpp"
#include "ulab/random.hpp"
#include "ulab/state.hpp"
#include "ulab/uhlmann.hpp"

namespace ulab {

/// A prover only ever sees the B block. Either one channel per slot (slot p
/// acts on the p-th register it receives) or one channel on the whole block.
struct ProverStrategy {
  enum class Label { Honest, Identity, Custom };
  Label label = Label::Custom;
  std::string name;
  std::vector<ChannelDesc> slots;
  std::optional<ChannelDesc> block;

  bool is_product() const { return !block.has_value(); }
  std::size_t n_slots(std::size_t dB) const;
  /// Applies the prover to registers `b_regs` (in slot order) of rho.
  Mat act(const Mat& rho, const Dims& dims, const std::vector<std::size_t>& b_regs) const;
  /// Checks that every channel maps B to B and has a unitary dilation.
  void validate(std::size_t dB, std::size_t n_slots, double tol = 1e-9) const;
};

std::string label_name(ProverStrategy::Label l);

/// Applies the completion of the canonical isometry on every slot.
ProverStrategy honest_prover(const UhlmannInstance& x, std::size_t m, double eta = 0.0);
ProverStrategy identity_prover(const UhlmannInstance& x, std::size_t m);
/// Honest on every slot except `slot`, which gets `deviant`.
ProverStrategy partial_prover(const UhlmannInstance& x, std::size_t m, std::size_t slot, const Mat& deviant);
/// Honest completion followed by depolarizing noise of strength p on every slot.
ProverStrategy noisy_prover(const UhlmannInstance& x, std::size_t m, double p);
ProverStrategy block_prover(ChannelDesc ch, std::string name = "block");

/// rho -> (1 - p) rho + p id/d, dilated through the d^2 Weyl operators.
ChannelDesc partial_depolarizing(std::size_t d, double p);

struct ProtocolResult {
  bool accepted = false;
  /// Joint state of the surviving B0 and its purifier A0; set only when accepted.
  std::optional<DensityOp> output_state;
  /// One JSON record per round.
  std::vector<json> transcript;
  /// Acceptance probability given this run's verifier coins.
  double accept_probability = 0.0;
};

/// Acceptance probability and output state conditioned on acceptance, both
/// averaged over the verifier's permutation.
struct ProtocolStatistics {
  double accept_probability = 0.0;
  std::optional<DensityOp> conditional_output;
};

ProtocolResult szk_run(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover, Seed seed);
/// Exact statistics. Product provers use a closed form for any m; block
/// provers enumerate all (m+1)! permutations.
ProtocolStatistics szk_statistics(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover);
/// |D><D|^{(m+1)} on A0 B0 ... Am Bm.
DensityOp szk_simulate(const UhlmannInstance& x, std::size_t m);
/// ((id (x) U~)|C><C|)^{(m+1)}, the verifier's state after an honest interaction.
DensityOp szk_honest_state(const UhlmannInstance& x, std::size_t m, double eta = 0.0);
/// Trace distance between the two states above, from their overlap.
double szk_simulator_distance(const UhlmannInstance& x, std::size_t m, double eta = 0.0);
/// Permutation-averaged state on A0 B0 ... Am Bm after the prover acts and
/// the verifier undoes the permutation.
DensityOp szk_post_prover_state(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover);

struct AmplifierConfig {
  std::size_t k = 2;
  std::size_t T = 1;
  Seed seed = 0;

  void validate() const;
};

/// 1 - (2(1 - nu)^T + 32T/sqrt(k)), clamped to [0, 1].
double amplification_bound(double nu, std::size_t T, std::size_t k);

struct AmplifyResult {
  double empirical_fidelity = 0.0;
  double sigma = 0.0;
  double exact_fidelity = 0.0;
  double bound = 0.0;
  double nu = 0.0;
  std::size_t trials = 0;
};

/// Runs the amplifier built from R (a channel on the k-fold B block whose
/// dilation ancilla is the register G). Each trial samples i, runs the coherent
/// P/Q loop with flag and history registers, applies R~, and tests the output
/// pair against |D>.
AmplifyResult amplify_run(const UhlmannInstance& x, const ChannelDesc& R, const AmplifierConfig& cfg,
                          std::size_t trials);

struct JordanDiagnostic {
  double nu = 0.0;
  double max_residual = 0.0;
  double hatted_fidelity = 0.0;
};

/// The loop with the full projectors P and Q; reports how far the
/// intermediate states leave span{|v>, |w>}.
JordanDiagnostic amplify_jordan_diagnostic(const UhlmannInstance& x, const ChannelDesc& R, const AmplifierConfig& cfg);

/// F((id (x) R)(|C><C|^k), |D><D|^k).
double amplifier_nu(const UhlmannInstance& x, const ChannelDesc& R, std::size_t k);

/// R~ = ctrl_G(Y on the first qubit of B_1) (U~^k (x) id) Ry(theta)_G with
/// cos^2(theta/2) = nu. For real instances of fidelity one its nu is exact.
ChannelDesc engineered_amplifier(const UhlmannInstance& x, std::size_t k, double nu);

/// Tr_P(e^{-i dt S}(rho_P (x) sigma_Q) e^{i dt S}) by exact conjugation.
DensityOp partial_swap(const DensityOp& rho, const DensityOp& sigma, double dt);

/// k partial swaps of the register `reg` of target against fresh copies of
/// program, approximating conjugation by exp(2 pi i t program).
DensityOp dme(const DensityOp& target, std::size_t reg, const DensityOp& program, double t, std::size_t k);
/// Conjugation of register `reg` by exp(2 pi i t program).
DensityOp dme_exact(const DensityOp& target, std::size_t reg, const DensityOp& program, double t);

/// Instance constant C in td <= C t^2 / k, fitted once on a qubit calibration pair.
double dme_constant();
/// Smallest k with dme_constant() t^2 / k <= error.
std::size_t dme_copies_for(double error, double t = 0.5);

enum class MeasureMode { IdealReflection, Dme };
MeasureMode parse_measure_mode(const std::string& s);

struct ApproxMeasureResult {
  bool accepted = true;
  int b = 0;
  double prob_b1 = 0.0;
  /// Post-measurement state for the sampled bit.
  DensityOp post_state;
  /// State conditioned on b = 1 (empty when that outcome has probability zero).
  std::optional<DensityOp> post_state_b1;
};

/// Hadamard test with a controlled reflection exp(i pi |psi><psi|) on register
/// `reg` of tau; b = 1 is the "-" outcome.
ApproxMeasureResult approx_measure(const DensityOp& tau, std::size_t reg, const Vec& psi, std::size_t k_q,
                                   MeasureMode mode, Seed seed);

struct QipOracle {
  /// Each test copy is prepared as (1 - prep_error)|C><C| + prep_error |J><J|.
  double prep_error = 0.0;
  Seed junk_seed = 7;
  MeasureMode mode = MeasureMode::IdealReflection;
  std::size_t k_q = 0;  // 0 picks dme_copies_for(0.01)
};

ProtocolResult qip_run(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover, const QipOracle& oracle,
                       Seed seed);
ProtocolStatistics qip_statistics(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover,
                                  const QipOracle& oracle);

}  // namespace ulab

#endif  // ULAB_PROTOCOLS_HPP
