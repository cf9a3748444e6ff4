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

#include "ulab/crypto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ulab/linalg.hpp"
#include "ulab/tensor.hpp"

namespace ulab {

namespace {

// Dense preparation unitaries are only built up to this width.
constexpr unsigned kPrepQubits = 10;

Dims qubit_dims(unsigned n) { return Dims(n, 2); }

std::vector<unsigned> complement(const std::vector<unsigned>& set, unsigned n) {
  std::vector<unsigned> out;
  for (unsigned q = 0; q < n; ++q)
    if (!std::binary_search(set.begin(), set.end(), q)) out.push_back(q);
  return out;
}

std::vector<std::size_t> widen(const std::vector<unsigned>& v) { return {v.begin(), v.end()}; }

Mat prep_unitary(const CommitmentScheme& s, int b) {
  if (s.is_circuit()) return (b == 0 ? *s.C0 : *s.C1).unitary();
  return b == 0 ? *s.prep0 : *s.prep1;
}

bool has_prep(const CommitmentScheme& s) { return s.is_circuit() || s.prep0.has_value(); }

}  // namespace

CommitmentScheme CommitmentScheme::from_circuits(const Circuit& c0, const Circuit& c1, std::vector<unsigned> commit) {
  if (c0.n_qubits() != c1.n_qubits()) throw InvalidScheme("commitment circuits act on different qubit counts");
  check_pure_cap(c0.dim(), "commitment state");
  CommitmentScheme s;
  s.n_qubits = c0.n_qubits();
  s.C0 = c0;
  s.C1 = c1;
  s.psi0 = c0.run();
  s.psi1 = c1.run();
  std::sort(commit.begin(), commit.end());
  s.commit = std::move(commit);
  s.reveal = complement(s.commit, s.n_qubits);
  s.validate();
  return s;
}

CommitmentScheme CommitmentScheme::from_states(Vec psi0, Vec psi1, unsigned n_qubits, std::vector<unsigned> commit) {
  CommitmentScheme s;
  s.n_qubits = n_qubits;
  s.psi0 = std::move(psi0);
  s.psi1 = std::move(psi1);
  std::sort(commit.begin(), commit.end());
  s.commit = std::move(commit);
  s.reveal = complement(s.commit, n_qubits);
  s.validate();
  return s;
}

void CommitmentScheme::validate(double tol) const {
  if (n_qubits == 0) throw InvalidScheme("scheme has no qubits");
  check_pure_cap(std::size_t{1} << n_qubits, "commitment state");
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  if (psi0.size() != d || psi1.size() != d) throw InvalidScheme("committed states do not have 2^n amplitudes");
  if (std::abs(psi0.norm() - 1) > tol || std::abs(psi1.norm() - 1) > tol)
    throw InvalidScheme("committed states are not normalized");
  if (C0.has_value() != C1.has_value()) throw InvalidScheme("scheme has only one circuit");
  if (C0 && (C0->n_qubits() != n_qubits || C1->n_qubits() != n_qubits))
    throw InvalidScheme("circuit width does not match the scheme");
  if (prep0.has_value() != prep1.has_value()) throw InvalidScheme("scheme has only one preparation unitary");
  if (!std::is_sorted(commit.begin(), commit.end()) ||
      std::adjacent_find(commit.begin(), commit.end()) != commit.end())
    throw InvalidScheme("commit register indices must be distinct");
  for (unsigned q : commit)
    if (q >= n_qubits) throw InvalidScheme("commit register index " + std::to_string(q) + " out of range");
  if (commit.size() + reveal.size() != n_qubits || reveal != complement(commit, n_qubits))
    throw InvalidScheme("commit and reveal registers do not partition the qubits");
}

Mat CommitmentScheme::split(int b) const { return matricize(state(b), qubit_dims(n_qubits), widen(commit)); }

Mat CommitmentScheme::commit_state(int b) const {
  Mat m = split(b);
  return m * m.adjoint();
}

double attack_fidelity(const CommitmentScheme& s, const ChannelDesc& attack) {
  attack.validate();
  if (attack.d_in != s.dR() || attack.d_out != s.dR())
    throw DimensionError("attack acts on dimension " + std::to_string(attack.d_in) + ", reveal register has " +
                         std::to_string(s.dR()));
  const Mat v = attack.isometry();  // rows (r', e)
  const Mat m0 = s.split(0), m1 = s.split(1);
  const Mat n = m0 * v.transpose();  // (c, (r', e))
  const auto denv = static_cast<Eigen::Index>(attack.d_env);
  double f = 0.0;
  for (Eigen::Index e = 0; e < denv; ++e) {
    cplx y = 0.0;
    for (Eigen::Index r = 0; r < m1.cols(); ++r) y += m1.col(r).dot(n.col(r * denv + e));
    f += std::norm(y);
  }
  return std::clamp(f, 0.0, 1.0);
}

SecurityReport evaluate(const CommitmentScheme& s, const std::optional<ChannelDesc>& attack) {
  s.validate();
  const Mat r0 = s.commit_state(0), r1 = s.commit_state(1);
  SecurityReport rep;
  rep.hiding_stat = std::clamp(trace_distance(r0, r1), 0.0, 1.0);
  // sqrt F = ||M_0^dag M_1||_1, evaluated on the thin SVDs of the splits.
  const Mat m0 = s.split(0), m1 = s.split(1);
  Eigen::BDCSVD<Mat> sv0(m0, Eigen::ComputeThinU), sv1(m1, Eigen::ComputeThinU);
  const Mat k = sv0.singularValues().cast<cplx>().asDiagonal() * sv0.matrixU().adjoint() * sv1.matrixU() *
                sv1.singularValues().cast<cplx>().asDiagonal();
  rep.binding_opt = std::clamp(std::pow(singular_values(k).sum(), 2), 0.0, 1.0);
  if (attack) rep.binding_attack = attack_fidelity(s, *attack);
  return rep;
}

UhlmannInstance scheme_instance(const CommitmentScheme& s) {
  auto flat = [&](int b) {
    Mat m = s.split(b);
    Vec amp(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) amp(i * m.cols() + j) = m(i, j);
    return BipartiteState(std::move(amp), s.dC(), s.dR());
  };
  return UhlmannInstance::from_raw(flat(0), flat(1));
}

ChannelDesc uhlmann_attack(const CommitmentScheme& s) {
  check_density_cap(s.dR(), "reveal register");
  return ChannelDesc::from_unitary(unitary_completion(canonical_uhlmann(scheme_instance(s))).unitary);
}

CommitmentScheme flavor_switch(const CommitmentScheme& s) {
  s.validate();
  const unsigned n = s.n_qubits + 1;
  check_pure_cap(std::size_t{1} << n, "switched commitment");
  const auto d = s.psi0.size();
  const double h = 1 / std::sqrt(2.0);
  CommitmentScheme out;
  out.n_qubits = n;
  for (int b = 0; b < 2; ++b) {
    Vec v(2 * d);
    v.head(d) = h * s.psi0;
    v.tail(d) = (b == 0 ? h : -h) * s.psi1;
    (b == 0 ? out.psi0 : out.psi1) = std::move(v);
  }
  out.commit.push_back(0);
  for (unsigned r : s.reveal) out.commit.push_back(r + 1);
  for (unsigned c : s.commit) out.reveal.push_back(c + 1);
  // H on the new qubit, then C_0 or C_1 controlled on it, then Z^b.
  if (has_prep(s) && n <= kPrepQubits) {
    const Mat u0 = prep_unitary(s, 0), u1 = prep_unitary(s, 1);
    Mat ctrl = Mat::Zero(2 * d, 2 * d);
    ctrl.topLeftCorner(d, d) = u0;
    ctrl.bottomRightCorner(d, d) = u1;
    const Mat hh = kron(gate_matrix(GateKind::H), Mat::Identity(d, d));
    Mat z = Mat::Identity(2 * d, 2 * d);
    z.bottomRightCorner(d, d) *= -1.0;
    out.prep0 = ctrl * hh;
    out.prep1 = z * ctrl * hh;
  }
  out.validate();
  return out;
}

CommitmentScheme tensor_amplify(const CommitmentScheme& s, std::size_t k) {
  s.validate();
  if (k == 0) throw InvalidArgument("tensor_amplify needs k >= 1");
  if (k == 1) return s;
  const std::size_t n = s.n_qubits * k;
  if (n > 20) throw CapExceeded("amplified commitment qubits", n, 20);
  check_density_cap(std::size_t{1} << (s.commit.size() * k), "amplified commit register");
  std::vector<unsigned> commit;
  for (std::size_t j = 0; j < k; ++j)
    for (unsigned c : s.commit) commit.push_back(static_cast<unsigned>(j * s.n_qubits + c));
  if (s.is_circuit()) {
    Circuit c0 = *s.C0, c1 = *s.C1;
    for (std::size_t j = 1; j < k; ++j) {
      c0 = Circuit::tensor(c0, *s.C0);
      c1 = Circuit::tensor(c1, *s.C1);
    }
    return CommitmentScheme::from_circuits(c0, c1, commit);
  }
  std::vector<Vec> f0(k, s.psi0), f1(k, s.psi1);
  auto out = CommitmentScheme::from_states(kron_all(f0), kron_all(f1), static_cast<unsigned>(n), commit);
  if (s.prep0 && n <= kPrepQubits) {
    std::vector<Mat> u0(k, *s.prep0), u1(k, *s.prep1);
    out.prep0 = kron_all(u0);
    out.prep1 = kron_all(u1);
  }
  return out;
}

CommitmentScheme commitment_from_instance(const UhlmannInstance& x) {
  validate_instance(x);
  const unsigned na = log2_exact(x.dA()), nb = log2_exact(x.dB());
  std::vector<unsigned> commit(na);
  std::iota(commit.begin(), commit.end(), 0u);
  if (x.is_circuit()) return CommitmentScheme::from_circuits(*x.C, *x.D, commit);
  return CommitmentScheme::from_states(x.psi.amp, x.phi.amp, na + nb, commit);
}

CommitmentScheme random_scheme(unsigned n, unsigned n_commit, Rng& rng, std::size_t gates) {
  if (n_commit > n) throw InvalidArgument("commit register larger than the scheme");
  std::vector<unsigned> qs(n);
  std::iota(qs.begin(), qs.end(), 0u);
  for (unsigned i = n; i > 1; --i) std::swap(qs[i - 1], qs[rng.below(i)]);
  std::vector<unsigned> commit(qs.begin(), qs.begin() + n_commit);
  if (gates == 0) {
    Vec a = haar_state(std::size_t{1} << n, rng);
    Vec b = haar_state(std::size_t{1} << n, rng);
    return CommitmentScheme::from_states(std::move(a), std::move(b), n, commit);
  }
  Circuit c0 = random_circuit(n, gates, rng);
  Circuit c1 = random_circuit(n, gates, rng);
  return CommitmentScheme::from_circuits(c0, c1, commit);
}

Mat KeyedFamily::gram() const {
  const auto nk = static_cast<Eigen::Index>(states.size());
  Mat g(nk, nk);
  for (Eigen::Index i = 0; i < nk; ++i)
    for (Eigen::Index j = 0; j < nk; ++j) g(i, j) = states[i].dot(states[j]);
  return g;
}

void KeyedFamily::validate(double tol) const {
  if (states.size() != n_keys())
    throw InvalidArgument("family has " + std::to_string(states.size()) + " states for " + std::to_string(n_keys()) +
                          " keys");
  const auto d = states.front().size();
  if (!is_power_of_two(static_cast<std::size_t>(d))) throw DimensionError("family states must live on qubits");
  for (const auto& s : states) {
    if (s.size() != d) throw DimensionError("family states have different dimensions");
    if (std::abs(s.norm() - 1) > tol) throw InvalidArgument("family state is not normalized");
  }
  const Mat g = gram();
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (std::abs(g(i, j).imag()) > 1e-10)
        throw InvalidArgument("family is complex-valued: <phi_" + std::to_string(i) + "|phi_" + std::to_string(j) +
                              "> has imaginary part " + std::to_string(g(i, j).imag()));
}

KeyedFamily subspace_family(unsigned n, const std::vector<std::vector<std::size_t>>& generators) {
  if (!is_power_of_two(generators.size())) throw InvalidArgument("number of keys must be a power of two");
  KeyedFamily g;
  g.lambda = log2_exact(generators.size());
  const std::size_t d = std::size_t{1} << n;
  for (const auto& gens : generators) {
    std::vector<std::size_t> span{0};
    for (std::size_t v : gens) {
      if (v >= d) throw InvalidArgument("generator outside F_2^n");
      if (std::find(span.begin(), span.end(), v) != span.end()) throw InvalidArgument("generators are dependent");
      const std::size_t m = span.size();
      for (std::size_t i = 0; i < m; ++i) span.push_back(span[i] ^ v);
    }
    Vec s = Vec::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t x : span) s(static_cast<Eigen::Index>(x)) = 1.0 / std::sqrt(double(span.size()));
    g.states.push_back(std::move(s));
  }
  return g;
}

RMat adversary_from_povm(const KeyedFamily& g, const std::vector<Mat>& povm) {
  g.validate();
  if (povm.size() != g.n_keys()) throw InvalidArgument("POVM must have one element per key");
  const auto d = static_cast<Eigen::Index>(g.dim());
  Mat sum = Mat::Zero(d, d);
  for (const auto& m : povm) {
    if (m.rows() != d || m.cols() != d) throw DimensionError("POVM element has the wrong dimension");
    sum += m;
  }
  if ((sum - Mat::Identity(d, d)).norm() > 1e-8) throw InvalidArgument("POVM elements do not sum to the identity");
  const auto nk = static_cast<Eigen::Index>(g.n_keys());
  RMat eps(nk, nk);
  for (Eigen::Index k = 0; k < nk; ++k)
    for (Eigen::Index j = 0; j < nk; ++j)
      eps(k, j) = std::max(0.0, g.states[k].dot(povm[j] * g.states[k]).real());
  return eps;
}

std::vector<Mat> pretty_good_measurement(const KeyedFamily& g) {
  g.validate();
  const auto d = static_cast<Eigen::Index>(g.dim());
  const double w = 1.0 / double(g.n_keys());
  Mat rho = Mat::Zero(d, d);
  for (const auto& s : g.states) rho += w * projector(s);
  const EigH e = eigh(rho);
  const double cut = 1e-12 * std::max(1.0, e.values.maxCoeff());
  RVec inv = RVec::Zero(d);
  Mat kernel = Mat::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (e.values(i) > cut)
      inv(i) = 1 / std::sqrt(e.values(i));
    else
      kernel += projector(e.vectors.col(i));
  }
  const Mat r = e.vectors * inv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
  std::vector<Mat> povm;
  for (const auto& s : g.states) povm.push_back(w * r * projector(s) * r);
  povm[0] += kernel;
  return povm;
}

CloneAttack clone_attack_states(const KeyedFamily& g, const RMat& eps) {
  g.validate();
  const std::size_t nk = g.n_keys(), ds = g.dim();
  if (static_cast<std::size_t>(eps.rows()) != nk || static_cast<std::size_t>(eps.cols()) != nk)
    throw DimensionError("adversary matrix must be 2^lambda x 2^lambda");
  for (Eigen::Index k = 0; k < eps.rows(); ++k) {
    if (eps.row(k).minCoeff() < -1e-12 || std::abs(eps.row(k).sum() - 1) > 1e-9)
      throw InvalidArgument("adversary row " + std::to_string(k) + " is not a distribution");
  }
  const std::size_t dt = ds * ds, db = ds * nk * dt;
  check_pure_cap(nk * db, "clone attack state");
  const double w = 1 / std::sqrt(double(nk));
  Vec c = Vec::Zero(static_cast<Eigen::Index>(nk * db)), dvec = c;
  for (std::size_t k = 0; k < nk; ++k) {
    const Vec& phi = g.states[k];
    const Vec phi2 = kron(phi, phi);
    for (std::size_t s = 0; s < ds; ++s) {
      const std::size_t base = k * db + (s * nk) * dt;
      c(static_cast<Eigen::Index>(base)) = w * phi(static_cast<Eigen::Index>(s));
      dvec.segment(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(dt)) =
          w * phi(static_cast<Eigen::Index>(s)) * phi2;
    }
  }
  CloneAttack a;
  a.instance = UhlmannInstance::from_raw(BipartiteState(std::move(c), nk, db), BipartiteState(std::move(dvec), nk, db));
  const Mat gm = g.gram();
  double sum = 0.0;
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t j = 0; j < nk; ++j) {
      const double o = gm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)).real();
      sum += eps(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * o * o;
    }
  a.kappa_lower = std::pow(sum / double(nk), 2);
  a.kappa = fidelity(a.instance.psi.rho_A(), a.instance.phi.rho_A());
  return a;
}

double clone_fidelity(const CloneAttack& a, const KeyedFamily& g, const Mat& solver) {
  const std::size_t nk = g.n_keys(), ds = g.dim(), db = a.instance.dB();
  if (static_cast<std::size_t>(solver.rows()) != db || static_cast<std::size_t>(solver.cols()) != db)
    throw DimensionError("solver must act on S K' T");
  const std::size_t dt = ds * ds;
  double total = 0.0;
  for (std::size_t k = 0; k < nk; ++k) {
    const Vec& phi = g.states[k];
    Vec in = Vec::Zero(static_cast<Eigen::Index>(db)), target = in;
    const Vec phi2 = kron(phi, phi);
    for (std::size_t s = 0; s < ds; ++s) {
      const std::size_t base = (s * nk) * dt;
      in(static_cast<Eigen::Index>(base)) = phi(static_cast<Eigen::Index>(s));
      target.segment(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(dt)) =
          phi(static_cast<Eigen::Index>(s)) * phi2;
    }
    total += std::norm(target.dot(solver * in));
  }
  return total / double(nk);
}

json to_json(const SecurityReport& r) {
  json j;
  j["hiding_stat"] = r.hiding_stat;
  j["binding_opt"] = r.binding_opt;
  if (r.binding_attack) j["binding_attack"] = *r.binding_attack;
  return j;
}

json scheme_to_json(const CommitmentScheme& s) {
  json j;
  j["n_qubits"] = s.n_qubits;
  j["commit"] = s.commit;
  if (s.is_circuit()) {
    j["C0"] = to_json(*s.C0);
    j["C1"] = to_json(*s.C1);
  } else {
    j["psi0"] = to_json(s.psi0);
    j["psi1"] = to_json(s.psi1);
  }
  return j;
}

CommitmentScheme scheme_from_json(const json& j) {
  try {
    auto commit = j.at("commit").get<std::vector<unsigned>>();
    if (j.contains("C0")) {
      if (!j.contains("C1")) throw ParseError("scheme: C0 given without C1");
      return CommitmentScheme::from_circuits(circuit_from_json(j.at("C0")), circuit_from_json(j.at("C1")), commit);
    }
    const auto n = j.at("n_qubits").get<unsigned>();
    return CommitmentScheme::from_states(vec_from_json(j.at("psi0")), vec_from_json(j.at("psi1")), n, commit);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scheme: ") + e.what());
  }
}

}  // namespace ulab
