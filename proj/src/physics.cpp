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

#include "ulab/physics.hpp"

#include <cmath>

#include "ulab/linalg.hpp"
#include "ulab/random.hpp"
#include "ulab/shannon.hpp"
#include "ulab/tensor.hpp"
#include "ulab/uhlmann.hpp"

namespace ulab {

namespace {

// Dense interference construction covers n + 3 qubits.
constexpr unsigned kMaxPairQubits = 7;

Mat hadamard() { return gate_matrix(GateKind::H); }

Mat proj(int b) {
  Mat p = Mat::Zero(2, 2);
  p(b, b) = 1.0;
  return p;
}

// |0><0| (x) id + |1><1| (x) u, control first.
Mat controlled(const Mat& u) {
  const auto d = u.rows();
  Mat out = Mat::Zero(2 * d, 2 * d);
  out.topLeftCorner(d, d).setIdentity();
  out.bottomRightCorner(d, d) = u;
  return out;
}

// A circuit's prepared state and unitary, checking the qubit count.
Mat prep_unitary(const Circuit& c) {
  check_density_cap(c.dim(), "preparation unitary");
  return c.unitary();
}

}  // namespace

BlackHoleInstance BlackHoleInstance::from_circuit(const Circuit& c, unsigned r) {
  BlackHoleInstance bh = from_unitary(prep_unitary(c), r);
  bh.circuit = c;
  return bh;
}

BlackHoleInstance BlackHoleInstance::from_unitary(const Mat& p, unsigned r) {
  BlackHoleInstance bh;
  bh.n = log2_exact(static_cast<std::size_t>(p.rows()));
  bh.r = r;
  bh.P = p;
  bh.validate();
  return bh;
}

void BlackHoleInstance::validate() const {
  if (n == 0) throw InvalidArgument("black hole needs at least one qubit");
  if (r > n) throw InvalidArgument("radiation register larger than the system");
  if (P.rows() != P.cols() || static_cast<std::size_t>(P.rows()) != (std::size_t{1} << n))
    throw DimensionError("P must be a unitary on n qubits");
  if (!is_unitary(P, 1e-9)) throw NumericalError("P is not unitary");
  check_density_cap(std::size_t{2} << r, "black hole radiation");
}

Vec BlackHoleInstance::state() const {
  const std::size_t d = std::size_t{1} << n;
  check_pure_cap(2 * d, "black hole state");
  Vec out(static_cast<Eigen::Index>(2 * d));
  const double h = 1.0 / std::sqrt(2.0);
  // B = b, A = b, G = 0.
  for (std::size_t b = 0; b < 2; ++b) out.segment(static_cast<Eigen::Index>(b * d), static_cast<Eigen::Index>(d)) = h * P.col(static_cast<Eigen::Index>(b * d / 2));
  return out;
}

ChannelDesc black_hole_channel(const BlackHoleInstance& bh) {
  bh.validate();
  const std::size_t dR = std::size_t{1} << bh.r, dH = std::size_t{1} << (bh.n - bh.r);
  ChannelDesc ch;
  ch.d_in = 2;
  ch.d_anc = (std::size_t{1} << bh.n) / 2;
  ch.d_out = dR;
  ch.d_env = dH;
  ch.anc_state = 0;
  ch.dilation.resize(bh.P.rows(), bh.P.cols());
  for (std::size_t h = 0; h < dH; ++h)
    for (std::size_t r = 0; r < dR; ++r)
      ch.dilation.row(static_cast<Eigen::Index>(r * dH + h)) = bh.P.row(static_cast<Eigen::Index>(h * dR + r));
  return ch;
}

BlackHoleDecoding bh_decode(const BlackHoleInstance& bh) {
  ChannelDesc ch = black_hole_channel(bh);
  BlackHoleDecoding out;
  out.decoupling = decoupling_fidelity(ch);
  DecoderResult d = decoder_from_uhlmann(ch);
  out.decoder = d.decoder;
  out.channel_fidelity = d.fidelity;
  const std::size_t dR = std::size_t{1} << bh.r, dH = std::size_t{1} << (bh.n - bh.r);
  Mat rho_BR = reduced_state(bh.state(), {2, dH, dR}, {0, 2});
  Mat rho_BA = run_channel_on(d.decoder, rho_BR, {2, dR}, 1);
  out.epr_fidelity = fidelity(max_entangled(2), rho_BA);
  return out;
}

OrthPair OrthPair::from_circuits(const Circuit& c, const Circuit& d) {
  if (c.n_qubits() != d.n_qubits()) throw DimensionError("pair circuits act on different qubit counts");
  OrthPair p = from_unitaries(prep_unitary(c), prep_unitary(d));
  p.C_circuit = c;
  p.D_circuit = d;
  return p;
}

OrthPair OrthPair::from_unitaries(const Mat& c, const Mat& d) {
  if (c.rows() != d.rows() || c.rows() != c.cols() || d.rows() != d.cols())
    throw DimensionError("pair unitaries must be square and of equal size");
  OrthPair p;
  p.n = log2_exact(static_cast<std::size_t>(c.rows()));
  p.C_prep = c;
  p.D_prep = d;
  p.C = c.col(0);
  p.D = d.col(0);
  p.validate();
  return p;
}

OrthPair OrthPair::from_states(const Vec& c, const Vec& d) {
  if (c.size() != d.size()) throw DimensionError("pair states differ in dimension");
  if (std::abs(c.norm() - 1.0) > 1e-9 || std::abs(d.norm() - 1.0) > 1e-9)
    throw InvalidArgument("pair states must be normalized");
  return from_unitaries(complete_isometry(Mat(c)), complete_isometry(Mat(d)));
}

void OrthPair::validate(double tol) const {
  if (n > kMaxPairQubits) throw CapExceeded("interference pair qubits", n, kMaxPairQubits);
  if (!is_unitary(C_prep, 1e-9) || !is_unitary(D_prep, 1e-9)) throw NumericalError("pair preparation is not unitary");
  if (std::abs(C.dot(D)) > tol) throw PromiseViolation("pair states are not orthogonal");
}

OrthPair random_orth_pair(unsigned n, Rng& rng) {
  const std::size_t d = std::size_t{1} << n;
  Vec c = haar_state(d, rng);
  Vec x = haar_state(d, rng);
  x -= c * c.dot(x);
  return OrthPair::from_states(c, x.normalized());
}

Mat householder_swap(const Vec& psi, const Vec& phi) {
  if (psi.size() != phi.size()) throw DimensionError("states differ in dimension");
  const double overlap = std::abs(psi.dot(phi));
  if (overlap > 1e-9) throw PromiseViolation("householder swap needs orthogonal states");
  Vec w = (psi - phi).normalized();
  return Mat::Identity(psi.size(), psi.size()) - 2.0 * w * w.adjoint();
}

double swap_error(const Mat& u, const Vec& psi, const Vec& phi) {
  return std::max((u * psi - phi).norm(), (u * phi - psi).norm());
}

Mat swap_to_distinguisher(const Mat& u, const Vec& psi, const Vec& phi, double tol) {
  if (u.rows() != u.cols() || u.rows() != psi.size()) throw DimensionError("unitary does not match the states");
  if (swap_error(u, psi, phi) > tol) throw PromiseViolation("unitary does not swap the pair");
  const auto d = u.rows();
  Mat h = kron(hadamard(), Mat(Mat::Identity(d, d)));
  return h * controlled(u) * h;
}

Mat distinguisher_to_swap(const Mat& v) {
  if (v.rows() != v.cols() || v.rows() < 2 || v.rows() % 2 != 0) throw DimensionError("distinguisher must act on qubit 0");
  const auto d = v.rows() / 2;
  Mat z = kron(gate_matrix(GateKind::Z), Mat(Mat::Identity(d, d)));
  return v.adjoint() * z * v;
}

double decision_probability(const Mat& v, const Vec& input) {
  if (v.cols() != input.size()) throw DimensionError("input does not match the distinguisher");
  Vec out = v * input;
  return out.tail(out.size() / 2).squaredNorm();
}

Mat controlled_swap_from_uhlmann(const OrthPair& pair) {
  pair.validate();
  const std::size_t dB = std::size_t{1} << pair.n;
  const Mat id2 = Mat::Identity(2, 2);
  // Registers A, B.
  const Mat cbar = controlled(pair.D_prep) * controlled(pair.C_prep.adjoint()) * kron(hadamard(), pair.C_prep);
  const Mat dbar = controlled(pair.C_prep) * controlled(pair.D_prep.adjoint()) * kron(hadamard(), pair.D_prep);
  // Registers A, B, A', B'.
  const Mat cx = kron(id2, proj(0)) + kron(gate_matrix(GateKind::X), proj(1));  // on A' B', control B'
  const Mat ctilde = kron(Mat(Mat::Identity(2 * dB, 2 * dB)), cx) * kron(cbar, kron(id2, hadamard()));
  auto ctrl_last = [&](const Mat& u) {
    return Mat(kron(Mat(Mat::Identity(2 * dB, 2 * dB)), kron(id2, proj(0))) + kron(u, kron(id2, proj(1))));
  };
  const Mat dtilde = ctrl_last(dbar) * ctrl_last(cbar.adjoint()) * ctilde;

  const Dims dims = {2, dB, 2, 2};
  const std::vector<std::size_t> perm = {0, 2, 3, 1};  // A, A', B', B
  Vec c = permute_registers(Vec(ctilde.col(0)), dims, perm);
  Vec d = permute_registers(Vec(dtilde.col(0)), dims, perm);
  UhlmannInstance x = UhlmannInstance::from_raw(BipartiteState(c, 4, 2 * dB), BipartiteState(d, 4, 2 * dB));
  return unitary_completion(canonical_uhlmann(x)).unitary;
}

int interference_detect(const Mat& controlled_swap, const Vec& input, double tol) {
  const auto d = input.size();
  if (controlled_swap.rows() != 2 * d) throw DimensionError("controlled swap does not match the input");
  Mat h = kron(hadamard(), Mat(Mat::Identity(d, d)));
  Vec start = Vec::Zero(2 * d);
  start.head(d) = input;
  const double p1 = decision_probability(h * controlled_swap * h, start);
  if (p1 <= tol) return 0;
  if (p1 >= 1.0 - tol) return 1;
  throw PromiseViolation("input is not one of the two superpositions (p1 = " + std::to_string(p1) + ")");
}

int interference_detect(const OrthPair& pair, const Vec& input, double tol) {
  return interference_detect(controlled_swap_from_uhlmann(pair), input, tol);
}

json blackhole_to_json(const BlackHoleInstance& bh) {
  json j{{"n", bh.n}, {"r", bh.r}};
  if (bh.circuit)
    j["circuit"] = to_json(*bh.circuit);
  else
    j["P"] = to_json(bh.P);
  return j;
}

BlackHoleInstance blackhole_from_json(const json& j) {
  try {
    const auto r = j.at("r").get<unsigned>();
    if (j.contains("circuit")) return BlackHoleInstance::from_circuit(circuit_from_json(j.at("circuit")), r);
    return BlackHoleInstance::from_unitary(mat_from_json(j.at("P")), r);
  } catch (const json::exception& e) {
    throw ParseError(std::string("black hole: ") + e.what());
  }
}

json pair_to_json(const OrthPair& p) {
  if (p.C_circuit) return json{{"C", to_json(*p.C_circuit)}, {"D", to_json(*p.D_circuit)}};
  return json{{"C_state", to_json(p.C)}, {"D_state", to_json(p.D)}};
}

OrthPair pair_from_json(const json& j) {
  try {
    if (j.contains("C")) return OrthPair::from_circuits(circuit_from_json(j.at("C")), circuit_from_json(j.at("D")));
    return OrthPair::from_states(vec_from_json(j.at("C_state")), vec_from_json(j.at("D_state")));
  } catch (const json::exception& e) {
    throw ParseError(std::string("pair: ") + e.what());
  }
}

}  // namespace ulab
