#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ulab/linalg.hpp"
#include "ulab/tensor.hpp"
#include "ulab/uhlmann.hpp"

using namespace ulab;

namespace {

struct Qutrit {
  BipartiteState psi, psi_t;
};

Qutrit qutrit_pair(double eps) {
  Vec a = Vec::Zero(9), b = Vec::Zero(9);
  a(0) = b(0) = std::sqrt(1 - eps);
  a(4) = a(8) = std::sqrt(eps / 2);  // |11>, |22>
  b(5) = b(7) = std::sqrt(eps / 2);  // |12>, |21>
  return {BipartiteState(a, 3, 3), BipartiteState(b, 3, 3)};
}

UhlmannInstance fidelity_one(std::size_t dA, std::size_t dB, Rng& rng) {
  Vec psi = haar_state(dA * dB, rng);
  Mat u = haar_unitary(dB, rng);
  Vec phi = apply_local(u, psi, {dA, dB}, {1});
  return UhlmannInstance::from_raw(BipartiteState(psi, dA, dB), BipartiteState(phi, dA, dB));
}

}  // namespace

TEST_CASE("validate_instance") {
  Rng rng(1);
  Circuit c = random_circuit(4, 15, rng);
  CHECK(validate_instance(UhlmannInstance::from_circuits(c, c)).kappa == doctest::Approx(1.0).epsilon(1e-12));

  Circuit z(2), o(2);
  o.add(GateKind::X, 0).add(GateKind::X, 1);
  auto x = UhlmannInstance::from_circuits(z, o);
  CHECK(validate_instance(x).kappa < 1e-15);
  CHECK(validate_instance(x).dA == 2);

  for (int k = 0; k < 10; ++k) {
    auto r = random_circuit_instance(2, 20, rng);
    Mat rho = oracle::trace_b(oracle::dm(r.psi.amp), 4, 4), sigma = oracle::trace_b(oracle::dm(r.phi.amp), 4, 4);
    CHECK(std::abs(validate_instance(r).kappa - oracle::fidelity(rho, sigma)) < 1e-10);
  }

  CHECK_THROWS_AS(UhlmannInstance::from_circuits(Circuit(4), Circuit(2)), InvalidInstance);
  CHECK_THROWS_AS(UhlmannInstance::from_circuits(Circuit(3), Circuit(3)), InvalidInstance);
  Vec v = Vec::Zero(6);
  v(0) = 1;
  CHECK_THROWS_AS(UhlmannInstance::from_raw(BipartiteState(v, 2, 3), BipartiteState(v, 3, 2)), InvalidInstance);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"n": 2, "C": {"n_qubits": 2, "gates": []},
                                                     "D": {"n_qubits": 2, "gates": []}})")),
                  InvalidInstance);
}

TEST_CASE("qutrit example") {
  const double eps = 0.01;
  auto q = qutrit_pair(eps);
  auto x = UhlmannInstance::from_raw(q.psi, q.psi);
  auto xt = UhlmannInstance::from_raw(q.psi_t, q.psi);
  Mat w = canonical_uhlmann(x, 0).w;
  Mat wt = canonical_uhlmann(xt, 0).w;
  CHECK((w - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
  Mat expect = Mat::Zero(3, 3);
  expect(0, 0) = expect(1, 2) = expect(2, 1) = 1;
  CHECK((wt - expect).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(op_norm(w - wt) >= 2 - 1e-9);
  CHECK((q.psi.amp - q.psi_t.amp).norm() <= std::sqrt(2 * eps) + 1e-12);

  // Applying the completion to the perturbed pair reaches the fidelity.
  Vec out = apply_uhlmann(xt, 0);
  Mat rho_t = oracle::trace_b(oracle::dm(q.psi_t.amp), 3, 3), sigma = oracle::trace_b(oracle::dm(q.psi.amp), 3, 3);
  CHECK(std::abs(std::norm(q.psi.amp.dot(out)) - oracle::fidelity(rho_t, sigma)) < 1e-9);
}

TEST_CASE("psi = phi gives the support projector of rho_B") {
  Rng rng(2);
  Mat g(4, 2);
  for (auto& z : g.reshaped()) z = rng.cnormal();
  // Rank-2 state on 4 x 4.
  Mat amp = g * haar_unitary(4, rng).topRows(2);
  amp /= amp.norm();
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor rm = amp;
  Vec psi = Eigen::Map<Vec>(rm.data(), 16);
  BipartiteState s(psi, 4, 4);
  Mat w = canonical_uhlmann(UhlmannInstance::from_raw(s, s), 0).w;
  Mat basis = oracle::gs_basis(oracle::trace_a(oracle::dm(psi), 4, 4));
  CHECK(basis.cols() == 2);
  CHECK((w - basis * basis.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unitary completion") {
  Rng rng(3);
  Mat u = haar_unitary(4, rng);
  CHECK((unitary_completion(PartialIsometry(u)).unitary - u).cwiseAbs().maxCoeff() < 1e-10);
  Mat p = Mat::Zero(2, 2);
  p(0, 0) = 1;
  CHECK((unitary_completion(PartialIsometry(p)).unitary - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 0; k < 20; ++k) {
    Mat v = haar_unitary(5, rng), q = haar_unitary(5, rng);
    Mat w = v.leftCols(3) * q.leftCols(3).adjoint();
    PartialIsometry pi(w);
    CHECK(pi.rank() == 3);
    Mat ut = unitary_completion(pi).unitary;
    CHECK(unitarity_error(ut) < 1e-10);
    CHECK((ut * pi.support - w).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pi.support * pi.support - pi.support).cwiseAbs().maxCoeff() < 1e-9);
  }
  Mat bad = Mat::Identity(2, 2) * 0.5;
  CHECK_THROWS_AS(PartialIsometry{bad}, NumericalError);
}

TEST_CASE("Uhlmann equality on 200 random instances") {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const std::size_t dA = 1 + rng.below(8), dB = 1 + rng.below(8);
    auto x = random_raw_instance(dA, dB, rng);
    Mat w = canonical_uhlmann(x, 0).w;
    const double f = oracle::fidelity(oracle::trace_b(oracle::dm(x.psi.amp), (int)dA, (int)dB),
                                      oracle::trace_b(oracle::dm(x.phi.amp), (int)dA, (int)dB));
    CHECK(std::abs(uhlmann_overlap(x, w) - f) < 1e-8);
  }
}

TEST_CASE("cutoff guarantee and monotonicity") {
  Rng rng(5);
  for (int k = 0; k < 30; ++k) {
    auto x = random_raw_instance(3, 4, rng);
    const double f = validate_instance(x).kappa;
    Mat prev;
    for (double eta : {0.0, 0.01, 0.05, 0.1, 0.2, 0.5}) {
      auto w = canonical_uhlmann(x, eta);
      CHECK(uhlmann_overlap(x, w.w) >= f - 2 * eta * 4 - 1e-9);
      if (prev.size()) CHECK(eigvalsh(prev - w.support).minCoeff() >= -1e-9);
      prev = w.support;
    }
  }
}

TEST_CASE("apply_uhlmann") {
  Rng rng(6);
  auto x = fidelity_one(3, 4, rng);
  CHECK(std::abs(validate_instance(x).kappa - 1) < 1e-10);
  Vec out = apply_uhlmann(x, 0);
  CHECK(fidelity(out, x.phi.amp) > 1 - 1e-9);

  // Completion consistency: states supported on Pi transform by W.
  auto y = random_raw_instance(4, 2, rng);  // rank(W) <= 2 < ... full on B here
  auto z = random_raw_instance(2, 4, rng);  // rank(W) <= 2 on a 4-dim B
  auto w = canonical_uhlmann(z, 0);
  CHECK(w.rank() == 2);
  Mat pi = w.support;
  Mat basis = oracle::gs_basis(pi);
  Mat r = basis * random_density(2, 2, rng) * basis.adjoint();
  Mat got = apply_uhlmann(z, 0, r, {4}, 0);
  CHECK((got - w.w * r * w.w.adjoint()).cwiseAbs().maxCoeff() < 1e-10);

  // Inputs orthogonal to the support still come out normalized.
  Mat comp = oracle::gs_basis(Mat(Mat::Identity(4, 4) - pi));
  Vec orth = comp.col(0);
  Vec joint = kron(basis_vector(3, 1), orth);
  Vec o2 = apply_uhlmann(z, 0, joint, {3, 4}, 1);
  CHECK(std::abs(o2.norm() - 1) < 1e-12);
  CHECK_THROWS_AS(apply_uhlmann(z, 0, joint, {4, 3}, 1), DimensionError);
  (void)y;
}

TEST_CASE("near-fidelity-one instances land within 5 sqrt(eps)") {
  Rng rng(7);
  for (int k = 0; k < 30; ++k) {
    auto x = fidelity_one(4, 4, rng);
    Vec noise = haar_state(16, rng);
    Vec phi = x.phi.amp + 0.1 * rng.uniform() * noise;
    phi /= phi.norm();
    auto y = UhlmannInstance::from_raw(x.psi, BipartiteState(phi, 4, 4));
    const double eps = 1 - validate_instance(y).kappa;
    Vec out = apply_uhlmann(y, 0);
    CHECK(trace_distance(out, phi) <= 5 * std::sqrt(eps) + 1e-9);
  }
}

TEST_CASE("padding") {
  Rng rng(8);
  auto x = random_circuit_instance(2, 20, rng);
  const double k1 = validate_instance(x).kappa;
  auto p1 = pad_instance(x, 1.0);
  CHECK(std::abs(validate_instance(p1).kappa - k1) < 1e-10);
  Mat w = canonical_uhlmann(x, 0).w;
  Mat v1 = canonical_uhlmann(p1, 0).w;
  // Flag-0 sector of B' = (B, flag) is the original W.
  Mat sector = v1(Eigen::seq(0, Eigen::last, 2), Eigen::seq(0, Eigen::last, 2));
  CHECK((sector - w).cwiseAbs().maxCoeff() < 1e-9);

  // kappa1 = 0 with alpha = 1/2: direct oracle on the padded reduced states.
  Circuit z(2), o(2);
  o.add(GateKind::X, 0).add(GateKind::X, 1);
  auto orth = UhlmannInstance::from_circuits(z, o);
  auto ph = pad_instance(orth, 0.5);
  const double oracle_f = oracle::fidelity(oracle::trace_b(oracle::dm(ph.psi.amp), 4, 4),
                                           oracle::trace_b(oracle::dm(ph.phi.amp), 4, 4));
  CHECK(std::abs(validate_instance(ph).kappa - oracle_f) < 1e-10);
  CHECK(std::abs(oracle_f - padded_fidelity(0.0, 0.5)) < 1e-10);

  // Block structure on random n = 2 instances.
  for (int k = 0; k < 10; ++k) {
    auto r = random_circuit_instance(2, 25, rng);
    const double alpha = 0.1 + 0.8 * rng.uniform();
    auto pr = pad_instance(r, alpha);
    CHECK(std::abs(validate_instance(pr).kappa - padded_fidelity(validate_instance(r).kappa, alpha)) < 1e-9);
    Mat u = canonical_uhlmann(r, 0).w;
    Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
    e0(0, 0) = 1;
    e1(1, 1) = 1;
    Mat top = Mat::Zero(4, 4);
    top(3, 3) = 1;
    Mat expect = kron(u, e0) + kron(top, e1);
    CHECK((canonical_uhlmann(pr, 0).w - expect).cwiseAbs().maxCoeff() < 1e-9);
  }

  CHECK_THROWS_AS(pad_instance(x, 0.0), InvalidArgument);
  CHECK_THROWS_AS(pad_instance(x, 1.5), InvalidArgument);
  CHECK_THROWS_AS(pad_instance(orth, 0.9, 0.5), InvalidArgument);
  CHECK_NOTHROW(pad_instance(orth, 0.5, 0.5));
}

TEST_CASE("instance json") {
  Rng rng(9);
  auto x = random_circuit_instance(1, 6, rng);
  auto y = instance_from_json(instance_to_json(x));
  CHECK(y.is_circuit());
  CHECK((y.psi.amp - x.psi.amp).norm() == 0.0);
  auto r = random_raw_instance(3, 2, rng);
  auto s = instance_from_json(parse_json(instance_to_json(r).dump()));
  CHECK(s.dA() == 3);
  CHECK((s.phi.amp - r.phi.amp).norm() == 0.0);
}
