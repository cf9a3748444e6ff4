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

#include "ulab/uhlmann.hpp"

#include <algorithm>
#include <cmath>

#include "ulab/linalg.hpp"
#include "ulab/tensor.hpp"

namespace ulab {

UhlmannInstance UhlmannInstance::from_circuits(const Circuit& c, const Circuit& d) {
  if (c.n_qubits() != d.n_qubits())
    throw InvalidInstance("circuits act on " + std::to_string(c.n_qubits()) + " and " +
                          std::to_string(d.n_qubits()) + " qubits");
  if (c.n_qubits() % 2 != 0 || c.n_qubits() == 0)
    throw InvalidInstance("circuits must act on 2n qubits, got " + std::to_string(c.n_qubits()));
  UhlmannInstance x;
  x.n = c.n_qubits() / 2;
  x.C = c;
  x.D = d;
  const std::size_t half = std::size_t{1} << x.n;
  x.psi = BipartiteState(c.run(0), half, half);
  x.phi = BipartiteState(d.run(0), half, half);
  return x;
}

UhlmannInstance UhlmannInstance::from_raw(BipartiteState psi, BipartiteState phi) {
  if (psi.dA != phi.dA || psi.dB != phi.dB) throw InvalidInstance("raw states have different register splits");
  UhlmannInstance x;
  x.psi = std::move(psi);
  x.phi = std::move(phi);
  return x;
}

InstanceInfo validate_instance(const UhlmannInstance& x) {
  if (x.psi.amp.size() == 0 || x.phi.amp.size() == 0) throw InvalidInstance("instance has no states");
  if (x.psi.dA != x.phi.dA || x.psi.dB != x.phi.dB) throw InvalidInstance("register splits differ");
  if (x.is_circuit() != x.D.has_value()) throw InvalidInstance("instance has only one circuit");
  if (x.is_circuit() && (x.C->n_qubits() != 2 * x.n || x.D->n_qubits() != 2 * x.n))
    throw InvalidInstance("circuit arity does not match 2n");
  return {fidelity(x.psi.rho_A(), x.phi.rho_A()), x.dA(), x.dB()};
}

PartialIsometry::PartialIsometry(Mat m, double e, double tol) : w(std::move(m)), eta(e) {
  if (w.rows() != w.cols()) throw DimensionError("partial isometry must be square");
  support = w.adjoint() * w;
  // Eigenvalues of W^dagger W are robust where a values-only SVD is not.
  for (double e : eigvalsh(support))
    if (std::abs(e) > tol && std::abs(e - 1) > tol)
      throw NumericalError("singular value " + std::to_string(std::sqrt(std::max(e, 0.0))) + " is neither 0 nor 1");
}

std::size_t PartialIsometry::rank() const { return static_cast<std::size_t>(std::llround(support.trace().real())); }

PartialIsometry canonical_uhlmann(const UhlmannInstance& x, double eta) {
  validate_instance(x);
  if (eta < 0) throw InvalidArgument("eta must be non-negative");
  // Tr_A |phi><psi| = Phi^T conj(Psi) for amplitude matrices Phi, Psi.
  Mat t = x.phi.matrix().transpose() * x.psi.matrix().conjugate();
  return PartialIsometry(sgn_eta(t, eta), eta);
}

Completion unitary_completion(const PartialIsometry& w) { return {polar_completion(w.w)}; }

double uhlmann_overlap(const UhlmannInstance& x, const Mat& w) {
  Vec out = apply_local(w, x.psi.amp, x.dims(), {1});
  return std::norm(x.phi.amp.dot(out));
}

Vec apply_uhlmann(const UhlmannInstance& x, double eta, const Vec& joint, const Dims& dims, std::size_t reg_b) {
  if (dims.at(reg_b) != x.dB()) throw DimensionError("payload register does not have dimension dB");
  return apply_local(unitary_completion(canonical_uhlmann(x, eta)).unitary, joint, dims, {reg_b});
}

Mat apply_uhlmann(const UhlmannInstance& x, double eta, const Mat& rho, const Dims& dims, std::size_t reg_b) {
  if (dims.at(reg_b) != x.dB()) throw DimensionError("payload register does not have dimension dB");
  return apply_local(unitary_completion(canonical_uhlmann(x, eta)).unitary, rho, dims, {reg_b});
}

Vec apply_uhlmann(const UhlmannInstance& x, double eta) { return apply_uhlmann(x, eta, x.psi.amp, x.dims(), 1); }

double padded_fidelity(double kappa1, double alpha) {
  const double r = alpha * std::sqrt(std::max(0.0, kappa1)) + 1 - alpha;
  return r * r;
}

namespace {

BipartiteState pad_state(const BipartiteState& s, double alpha) {
  const std::size_t dA = 2 * s.dA, dB = 2 * s.dB;
  Vec v = Vec::Zero(static_cast<Eigen::Index>(dA * dB));
  const double a = std::sqrt(alpha), b = std::sqrt(1 - alpha);
  // A' = (flag, A), B' = (B, flag): flag 0 sector holds the original state.
  for (std::size_t i = 0; i < s.dA; ++i)
    for (std::size_t j = 0; j < s.dB; ++j) v(i * dB + 2 * j) = a * s.amp(i * s.dB + j);
  v(static_cast<Eigen::Index>(dA * dB - 1)) += b;
  return BipartiteState(v, dA, dB);
}

}  // namespace

UhlmannInstance pad_instance(const UhlmannInstance& x, double alpha, std::optional<double> kappa2) {
  auto info = validate_instance(x);
  if (!(alpha > 0 && alpha <= 1)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (kappa2) {
    if (*kappa2 < info.kappa - 1e-12 || *kappa2 > 1) throw InvalidArgument("target kappa2 must lie in [kappa1, 1]");
    if (info.kappa < 1 && alpha > (1 - *kappa2) / (1 - info.kappa) + 1e-12)
      throw InvalidArgument("alpha exceeds (1 - kappa2) / (1 - kappa1)");
  }
  return UhlmannInstance::from_raw(pad_state(x.psi, alpha), pad_state(x.phi, alpha));
}

UhlmannInstance random_raw_instance(std::size_t dA, std::size_t dB, Rng& rng) {
  return UhlmannInstance::from_raw(BipartiteState(haar_state(dA * dB, rng), dA, dB),
                                   BipartiteState(haar_state(dA * dB, rng), dA, dB));
}

UhlmannInstance random_circuit_instance(unsigned n, std::size_t gates, Rng& rng) {
  Circuit c = random_circuit(2 * n, gates, rng);
  Circuit d = random_circuit(2 * n, gates, rng);
  return UhlmannInstance::from_circuits(c, d);
}

UhlmannInstance instance_with_fidelity(std::size_t dA, std::size_t dB, double kappa, Rng& rng) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InvalidArgument("kappa must lie in [0, 1]");
  const std::size_t r = std::min(dA, dB);
  if (r < 2 && kappa < 1.0) throw InvalidArgument("fidelity below one needs Schmidt rank at least 2");
  RVec p(r);
  if (r == 1) {
    p(0) = 1.0;
  } else {
    double rest = 0.0;
    for (std::size_t i = 0; i + 1 < r; ++i) {
      const double g = rng.normal();
      p(i) = g * g + 1e-3;
      rest += p(i);
    }
    const double last = kappa / 2;
    for (std::size_t i = 0; i + 1 < r; ++i) p(i) *= (1.0 - last) / rest;
    p(r - 1) = last;
  }
  auto q_of = [&](double lam) {
    RVec q = (1.0 - lam) * p;
    q(r - 1) += lam;
    return q;
  };
  auto fid = [&](const RVec& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i) s += std::sqrt(p(i) * q(i));
    return s * s;
  };
  double lo = 0.0, hi = 1.0;
  if (r > 1) {
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fid(q_of(mid)) > kappa ? lo : hi) = mid;
    }
  }
  const RVec q = r > 1 ? q_of(0.5 * (lo + hi)) : p;
  const Mat ua = haar_unitary(dA, rng), ub = haar_unitary(dB, rng), vb = haar_unitary(dB, rng);
  Vec c = Vec::Zero(dA * dB), d = Vec::Zero(dA * dB);
  for (std::size_t i = 0; i < r; ++i) {
    c += std::sqrt(p(i)) * kron(Vec(ua.col(i)), Vec(ub.col(i)));
    d += std::sqrt(q(i)) * kron(Vec(ua.col(i)), Vec(vb.col(i)));
  }
  return UhlmannInstance::from_raw(BipartiteState(c / c.norm(), dA, dB), BipartiteState(d / d.norm(), dA, dB));
}

UhlmannInstance random_real_instance(std::size_t dA, std::size_t dB, Rng& rng) {
  const Vec c = real_random_state(dA * dB, rng);
  Eigen::MatrixXd g(dB, dB);
  for (std::size_t i = 0; i < dB; ++i)
    for (std::size_t j = 0; j < dB; ++j) g(i, j) = rng.normal();
  const Eigen::MatrixXd o = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  const Vec d = apply_local(o.cast<cplx>(), c, {dA, dB}, {1});
  return UhlmannInstance::from_raw(BipartiteState(c, dA, dB), BipartiteState(d, dA, dB));
}

json instance_to_json(const UhlmannInstance& x) {
  if (x.is_circuit()) return {{"n", x.n}, {"C", to_json(*x.C)}, {"D", to_json(*x.D)}};
  return {{"raw", {{"dA", x.dA()}, {"dB", x.dB()}, {"psi", to_json(x.psi.amp)}, {"phi", to_json(x.phi.amp)}}}};
}

UhlmannInstance instance_from_json(const json& j) {
  try {
    if (j.contains("raw")) {
      const auto& r = j.at("raw");
      const auto dA = r.at("dA").get<std::size_t>(), dB = r.at("dB").get<std::size_t>();
      Vec psi = vec_from_json(r.at("psi")), phi = vec_from_json(r.at("phi"));
      if (static_cast<std::size_t>(psi.size()) != dA * dB || static_cast<std::size_t>(phi.size()) != dA * dB)
        throw InvalidInstance("raw amplitudes do not match dA*dB");
      return UhlmannInstance::from_raw(BipartiteState(psi, dA, dB), BipartiteState(phi, dA, dB));
    }
    const auto n = j.at("n").get<unsigned>();
    Circuit c = circuit_from_json(j.at("C")), d = circuit_from_json(j.at("D"));
    if (c.n_qubits() != 2 * n || d.n_qubits() != 2 * n)
      throw InvalidInstance("instance declares n = " + std::to_string(n) + " but circuits act on " +
                            std::to_string(c.n_qubits()) + " and " + std::to_string(d.n_qubits()) + " qubits");
    return UhlmannInstance::from_circuits(c, d);
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
}

}  // namespace ulab
