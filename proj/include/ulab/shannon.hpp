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

// Channel decoding through the decoupling condition, one-shot entropies,
// the Clifford decoupling experiment and Uhlmann-based compression codecs.

#ifndef ULAB_SHANNON_HPP
#define ULAB_SHANNON_HPP

#include <optional>

#include "ulab/channel.hpp"
#include "ulab/crypto.hpp"
#include "ulab/io.hpp"
#include "ulab/random.hpp"
#include "ulab/state.hpp"

namespace ulab {

/// Maximally entangled state on A R, A first.
Vec max_entangled(std::size_t d);

/// F(N^c(Phi_AR), N^c(id/dA) (x) id_R/dR) with N^c the complementary channel.
double decoupling_fidelity(const ChannelDesc& ch);

struct DecoderResult {
  ChannelDesc decoder;  // B -> A'
  double fidelity = 0.0;
};

/// Uhlmann transformation between V|Phi>_RA (x) |0>_A'R' and
/// |Phi>_RA' (x) V|Phi>_AR' on B A' R', wrapped as a channel B -> A'.
DecoderResult decoder_from_uhlmann(const ChannelDesc& ch);
/// F((D o N)(Phi_AR), Phi_A'R).
double decoding_fidelity(const ChannelDesc& ch, const ChannelDesc& decoder);

/// |b> -> Tr_XR of (1/sqrt2) sum_a X^a|b>_A |a>_X |psi_a>_{RC}. Outputs A C.
ChannelDesc commitment_channel(const CommitmentScheme& s);

struct EntropyReport {
  double h_min = 0.0;
  double h_max = 0.0;
  double h2_lower = 0.0;
  double h_max_smoothed = 0.0;
  double smoothing = 0.0;
};

/// Unconditional entropies of rho in bits. The smoothed max-entropy drops
/// the smallest eigenvalues up to mass epsilon and renormalizes, which is an
/// upper bound on the true smoothed value.
EntropyReport entropies(const DensityOp& rho, double epsilon = 0.0);
double h_max_smoothed(const RVec& spectrum, double epsilon);
/// -log2 Tr[((id_A (x) sigma_B)^{-1/2} rho_AB)^2] at sigma = rho_B; the
/// registers `a` form A and the rest form B.
double h2_conditional(const Mat& rho, const Dims& dims, const std::vector<std::size_t>& a);

struct DecouplingResult {
  double lhs_mean = 0.0;
  double lhs_sigma = 0.0;
  double rhs_bound = 0.0;
  double h2_omega = 0.0;  // H2(A'|E) of the measurement channel's Choi state
  double h2_rho = 0.0;    // H2(A|B) of the input
  std::size_t samples = 0;
};

/// rho on A (x) B with A made of qubits. T measures the first n - s qubits of
/// A after a random Clifford and discards A.
DecouplingResult decoupling_experiment(const DensityOp& rho, unsigned s, std::size_t samples, Seed seed);

struct CompressionCodec {
  ChannelDesc E;  // n -> s qubits
  ChannelDesc D;  // s -> n qubits
  unsigned n = 0;
  unsigned s = 0;
  std::size_t y_star = 0;
  Seed clifford_seed = 0;
  double delta = 0.0;
  double h_max_smoothed = 0.0;  // at epsilon = (delta/40)^4
  double nu = 0.0;              // decoupling error estimate
  double error_bound = 0.0;     // min(1, 20 nu^{1/4})
};

/// Schmidt purification of rho on A R with dR = rank.
BipartiteState purify(const DensityOp& rho);

/// s = ceil(H_max^eps + 8 log2(4/delta)) clamped to [0, n] unless forced.
CompressionCodec compress(const DensityOp& rho, double delta, Seed seed, std::optional<unsigned> force_s = std::nullopt);
/// rho is the reduced state of the first n_out qubits of c|0>.
CompressionCodec compress(const Circuit& c, unsigned n_out, double delta, Seed seed,
                          std::optional<unsigned> force_s = std::nullopt);
/// td((D o E)(psi), psi) on A R.
double roundtrip(const CompressionCodec& codec, const BipartiteState& purification);

struct OverlapEstimate {
  double mean = 0.0;
  double sigma = 0.0;
  double bound = 0.0;  // R / M
  std::size_t samples = 0;
};

/// E_theta Tr((D o E)(theta) theta) over Haar states of the input of E.
OverlapEstimate haar_overlap(const ChannelDesc& E, const ChannelDesc& D, std::size_t samples, Seed seed);

json to_json(const EntropyReport& r);
json to_json(const CompressionCodec& c);

}  // namespace ulab

#endif  // ULAB_SHANNON_HPP
