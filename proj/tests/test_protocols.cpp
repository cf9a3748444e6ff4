#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "ulab/linalg.hpp"
#include "ulab/protocols.hpp"
#include "ulab/tensor.hpp"

using namespace ulab;

namespace {

Mat uhlmann_unitary(const UhlmannInstance& x) { return unitary_completion(canonical_uhlmann(x)).unitary; }

Mat kron_list(const std::vector<Mat>& ms) {
  Mat r = Mat::Identity(1, 1);
  for (const auto& m : ms) r = oracle::kron(r, m);
  return r;
}

Mat target_state(const UhlmannInstance& x) { return oracle::dm(apply_uhlmann(x)); }

double binom_sigma(double p, std::size_t n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(n)); }

}  // namespace

TEST_CASE("amplification bound closed form") {
  CHECK(amplification_bound(1.0, 3, 1000000) == doctest::Approx(1.0 - 96.0 / 1000.0).epsilon(1e-14));
  CHECK(amplification_bound(0.5, 10, 1000000) == doctest::Approx(1.0 - (2.0 / 1024.0 + 0.32)).epsilon(1e-14));
  CHECK(amplification_bound(0.5, 10, 1000000) == doctest::Approx(0.678).epsilon(1e-3));
  CHECK(amplification_bound(0.3, 0, 4) == 0.0);
  CHECK(amplification_bound(0.9, 2, 4) == 0.0);
  CHECK_THROWS_AS(amplification_bound(1.5, 1, 1), InvalidArgument);
}

TEST_CASE("instance with prescribed fidelity") {
  Rng rng(11);
  for (double kappa : {0.0, 0.25, 0.9, 0.99, 1.0}) {
    auto x = instance_with_fidelity(3, 2, kappa, rng);
    CHECK(oracle::fidelity(x.psi.rho_A(), x.phi.rho_A()) == doctest::Approx(kappa).epsilon(1e-9));
    CHECK(uhlmann_overlap(x, canonical_uhlmann(x).w) == doctest::Approx(kappa).epsilon(1e-8));
  }
  auto r = random_real_instance(2, 4, rng);
  CHECK(validate_instance(r).kappa == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.phi.amp.imag().norm() < 1e-14);
}

TEST_CASE("szk honest and identity provers") {
  Rng rng(21);
  const std::size_t m = 4;
  SUBCASE("fidelity one") {
    auto x = instance_with_fidelity(2, 2, 1.0, rng);
    auto st = szk_statistics(x, m, honest_prover(x, m));
    CHECK(st.accept_probability == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(st.conditional_output);
    CHECK(oracle::trace_distance(st.conditional_output->m, oracle::dm(x.phi.amp)) < 1e-9);
    auto run = szk_run(x, m, honest_prover(x, m), 5);
    CHECK(run.accepted);
    CHECK(oracle::trace_distance(run.output_state->m, oracle::dm(x.phi.amp)) < 1e-9);
    CHECK(run.transcript.size() == 3);
  }
  SUBCASE("identity prover") {
    auto x = random_raw_instance(2, 2, rng);
    const double ov = std::norm(x.phi.amp.dot(x.psi.amp));
    auto st = szk_statistics(x, m, identity_prover(x, m));
    CHECK(st.accept_probability == doctest::Approx(std::pow(ov, m)).epsilon(1e-10));
    auto run = szk_run(x, m, identity_prover(x, m), 9);
    CHECK(run.accept_probability == doctest::Approx(std::pow(ov, m)).epsilon(1e-10));
  }
  SUBCASE("fidelity 1 - mu") {
    const double mu = 0.02;
    auto x = instance_with_fidelity(2, 3, 1 - mu, rng);
    auto st = szk_statistics(x, m, honest_prover(x, m));
    CHECK(st.accept_probability == doctest::Approx(std::pow(1 - mu, m)).epsilon(1e-9));
    CHECK(st.accept_probability >= 1 - m * mu);
    std::size_t acc = 0;
    const std::size_t n = 500;
    for (std::size_t t = 0; t < n; ++t) acc += szk_run(x, m, honest_prover(x, m), child_seed(3, "run", t)).accepted;
    const double p = std::pow(1 - mu, m);
    CHECK(std::abs(static_cast<double>(acc) / n - p) <= 3 * binom_sigma(p, n) + 1e-12);
  }
}

TEST_CASE("szk runs are deterministic per seed") {
  Rng rng(2);
  auto x = instance_with_fidelity(2, 2, 0.7, rng);
  auto a = szk_run(x, 3, identity_prover(x, 3), 77);
  auto b = szk_run(x, 3, identity_prover(x, 3), 77);
  CHECK(a.accepted == b.accepted);
  CHECK(a.transcript == b.transcript);
}

TEST_CASE("dense and product paths agree") {
  Rng rng(31);
  auto x = instance_with_fidelity(2, 2, 0.8, rng);
  const std::size_t m = 2;
  const Mat u = uhlmann_unitary(x);
  const Mat dev = haar_unitary(2, rng);
  auto prod = partial_prover(x, m, 1, dev);
  auto block = block_prover(ChannelDesc::from_unitary(kron_list({u, dev, u})));
  auto a = szk_statistics(x, m, prod);
  auto b = szk_statistics(x, m, block);
  CHECK(a.accept_probability == doctest::Approx(b.accept_probability).epsilon(1e-10));
  CHECK(oracle::trace_distance(a.conditional_output->m, b.conditional_output->m) < 1e-10);
  for (Seed s = 0; s < 5; ++s) {
    auto ra = szk_run(x, m, prod, s), rb = szk_run(x, m, block, s);
    CHECK(ra.accept_probability == doctest::Approx(rb.accept_probability).epsilon(1e-10));
  }
  // A noisy product prover against its dense evaluation.
  auto noisy = noisy_prover(x, m, 0.3);
  auto c = szk_statistics(x, m, noisy);
  CHECK(c.conditional_output);
  const DensityOp rho = szk_post_prover_state(x, m, noisy);
  const Mat pd = oracle::dm(x.phi.amp);
  const Mat meas = kron_list({Mat::Identity(4, 4), pd, pd});
  CHECK((meas * rho.m).trace().real() == doctest::Approx(c.accept_probability).epsilon(1e-10));
}

TEST_CASE("szk simulator distance") {
  Rng rng(41);
  SUBCASE("mu = 0.01, m = 3") {
    const double mu = 0.01;
    auto x = instance_with_fidelity(2, 2, 1 - mu, rng);
    const double td = oracle::trace_distance(szk_simulate(x, 3).m, szk_honest_state(x, 3).m);
    CHECK(td <= 0.2);
    CHECK(td <= std::sqrt(4 * mu) + 1e-9);
    CHECK(td == doctest::Approx(szk_simulator_distance(x, 3)).epsilon(1e-9));
  }
  SUBCASE("fidelity one") {
    auto x = instance_with_fidelity(2, 2, 1.0, rng);
    CHECK(oracle::trace_distance(szk_simulate(x, 2).m, szk_honest_state(x, 2).m) < 1e-9);
  }
  SUBCASE("m = 0") {
    auto x = random_raw_instance(2, 3, rng);
    CHECK((szk_simulate(x, 0).m - oracle::dm(x.phi.amp)).norm() < 1e-14);
  }
  SUBCASE("bound over m") {
    for (double mu : {0.001, 0.01, 0.05}) {
      auto x = instance_with_fidelity(2, 2, 1 - mu, rng);
      for (std::size_t m : {1, 4, 8, 16}) CHECK(szk_simulator_distance(x, m) <= std::sqrt((m + 1) * mu) + 1e-9);
    }
  }
}

TEST_CASE("post-prover state is permutation invariant") {
  Rng rng(51);
  auto x = random_raw_instance(2, 2, rng);
  const std::size_t m = 2;
  auto prover = block_prover(ChannelDesc::from_unitary(haar_unitary(8, rng)));
  const DensityOp rho = szk_post_prover_state(x, m, prover);
  std::vector<std::size_t> sigma{0, 1, 2};
  do {
    std::vector<std::size_t> perm;
    for (auto j : sigma) {
      perm.push_back(2 * j);
      perm.push_back(2 * j + 1);
    }
    CHECK((permute_registers(rho.m, rho.dims, perm) - rho.m).norm() < 1e-9);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
}

TEST_CASE("prover act preserves trace") {
  Rng rng(52);
  auto x = random_raw_instance(2, 2, rng);
  const Mat rho = random_density(16, 3, rng);
  auto noisy = noisy_prover(x, 1, 0.4);
  CHECK(std::abs(noisy.act(rho, {2, 2, 2, 2}, {1, 3}).trace().real() - 1.0) < 1e-9);
  auto block = block_prover(ChannelDesc::from_unitary(haar_unitary(4, rng)));
  const Mat out = block.act(rho, {2, 2, 2, 2}, {3, 1});
  CHECK(std::abs(out.trace().real() - 1.0) < 1e-9);
  CHECK(hermiticity_error(out) < 1e-12);
}

TEST_CASE("soundness envelope for cheating provers") {
  Rng rng(61);
  const double mu = 0.01;
  auto x = instance_with_fidelity(2, 2, 1 - mu, rng);
  const Mat target = target_state(x);
  for (std::size_t m : {4, 8, 16}) {
    std::vector<ProverStrategy> provers{identity_prover(x, m), partial_prover(x, m, 0, Mat::Identity(2, 2)),
                                        partial_prover(x, m, 3, haar_unitary(2, rng)), noisy_prover(x, m, 0.02),
                                        noisy_prover(x, m, 0.2)};
    for (const auto& p : provers) {
      auto st = szk_statistics(x, m, p);
      if (st.accept_probability < 0.5) continue;
      const double env = std::sqrt(4.0 / (m + 1)) + 5 * std::sqrt(mu);
      CHECK(oracle::trace_distance(st.conditional_output->m, target) <= env);
      const double miss = 1 - (x.phi.amp.adjoint() * st.conditional_output->m * x.phi.amp)(0, 0).real();
      CHECK(miss <= 2.0 / (m + 1) + 1e-12);
    }
  }
  // A block prover that entangles two slots after the honest map.
  const std::size_t m = 4;
  const Mat u = uhlmann_unitary(x);
  Mat mix = kron_list({expi_hermitian(oracle::dm(haar_state(4, rng)), 0.3), Mat::Identity(8, 8)});
  auto block = block_prover(ChannelDesc::from_unitary(mix * kron_list({u, u, u, u, u})));
  auto st = szk_statistics(x, m, block);
  CHECK(st.accept_probability >= 0.5);
  CHECK(oracle::trace_distance(st.conditional_output->m, target) <= std::sqrt(4.0 / (m + 1)) + 5 * std::sqrt(mu));
}

TEST_CASE("partial swap") {
  Rng rng(71);
  const DensityOp rho(random_density(3, 2, rng), {3}), sigma(random_density(3, 3, rng), {3});
  CHECK((partial_swap(rho, sigma, 0.0).m - sigma.m).norm() < 1e-13);
  CHECK((partial_swap(rho, sigma, std::numbers::pi / 2).m - rho.m).norm() < 1e-13);

  Vec plus = Vec::Constant(2, 1 / std::sqrt(2.0));
  const DensityOp r0 = DensityOp::pure(basis_vector(2, 0), {2}), sp = DensityOp::pure(plus, {2});
  const double dt = std::numbers::pi / 4;
  Mat swap = Mat::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1;
  const Mat u = oracle::expm(cplx(0, -dt) * swap);
  const Mat expect = oracle::trace_a(u * oracle::kron(r0.m, sp.m) * u.adjoint(), 2, 2);
  CHECK((partial_swap(r0, sp, dt).m - expect).norm() < 1e-12);
  // Exact identity: cos^2 sigma + sin^2 rho - i sin cos [rho, sigma].
  const double c = std::cos(0.37), s = std::sin(0.37);
  const Mat ident = c * c * sigma.m + s * s * rho.m - cplx(0, s * c) * (rho.m * sigma.m - sigma.m * rho.m);
  CHECK((partial_swap(rho, sigma, 0.37).m - ident).norm() < 1e-12);
  CHECK_THROWS_AS(partial_swap(rho, r0, 0.1), DimensionError);
}

TEST_CASE("density matrix exponentiation") {
  Rng rng(81);
  const Vec plus = Vec::Constant(2, 1 / std::sqrt(2.0));
  const DensityOp tplus = DensityOp::pure(plus, {2});
  const DensityOp p0 = DensityOp::pure(basis_vector(2, 0), {2});

  SUBCASE("t = 0 leaves the target") { CHECK((dme(tplus, 0, p0, 0.0, 5).m - tplus.m).norm() < 1e-14); }
  SUBCASE("program equal to target") {
    const Vec v = haar_state(3, rng);
    const DensityOp t = DensityOp::pure(v, {3});
    for (std::size_t k : {4, 16}) CHECK(oracle::trace_distance(dme(t, 0, t, 0.5, k).m, t.m) < 1e-12);
  }
  SUBCASE("halving per doubling") {
    const Mat w = oracle::expm(cplx(0, std::numbers::pi) * p0.m);
    const Mat exact = w * tplus.m * w.adjoint();
    double prev = 0;
    for (std::size_t k : {8, 16, 32}) {
      const double e = oracle::trace_distance(dme(tplus, 0, p0, 0.5, k).m, exact);
      if (prev > 0) CHECK(e / prev == doctest::Approx(0.5).epsilon(0.25));
      prev = e;
    }
  }
  SUBCASE("acts on one register of a purified target") {
    const DensityOp t = DensityOp::pure(haar_state(6, rng), {2, 3});
    const DensityOp prog(random_density(3, 2, rng), {3});
    const Mat u = oracle::expm(cplx(0, 2 * std::numbers::pi * 0.3) * prog.m);
    const Mat full = oracle::kron(Mat::Identity(2, 2), u);
    const Mat exact = full * t.m * full.adjoint();
    CHECK((dme_exact(t, 1, prog, 0.3).m - exact).norm() < 1e-10);
    const double e64 = oracle::trace_distance(dme(t, 1, prog, 0.3, 64).m, exact);
    CHECK(oracle::trace_distance(dme(t, 1, prog, 0.3, 256).m, exact) < e64 / 3);
  }
  SUBCASE("log-log slope near -1 on three instances") {
    struct Cal {
      DensityOp target, program;
      std::size_t reg;
      double t;
    };
    std::vector<Cal> cal{{tplus, p0, 0, 0.5},
                         {DensityOp::pure(haar_state(4, rng), {2, 2}), DensityOp(random_density(2, 2, rng), {2}), 1, 0.3},
                         {DensityOp(random_density(3, 3, rng), {3}), DensityOp::pure(haar_state(3, rng), {3}), 0, 0.5}};
    for (const auto& c : cal) {
      const Mat exact = dme_exact(c.target, c.reg, c.program, c.t).m;
      std::vector<double> lx, ly;
      for (std::size_t k = 8; k <= 128; k *= 2) {
        lx.push_back(std::log(static_cast<double>(k)));
        ly.push_back(std::log(oracle::trace_distance(dme(c.target, c.reg, c.program, c.t, k).m, exact)));
      }
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
      }
      const double slope = sxy / sxx;
      CHECK(slope >= -1.25);
      CHECK(slope <= -0.75);
    }
  }
  SUBCASE("fitted constant") {
    CHECK(dme_constant() > 0);
    const std::size_t k = dme_copies_for(0.01);
    CHECK(oracle::trace_distance(dme(tplus, 0, p0, 0.5, k).m, dme_exact(tplus, 0, p0, 0.5).m) <= 0.01);
    for (std::size_t kk : {8, 64, 512, 4096})
      CHECK(oracle::trace_distance(dme(tplus, 0, p0, 0.5, kk).m, dme_exact(tplus, 0, p0, 0.5).m) <=
            dme_constant() * 0.25 / kk);
  }
  CHECK_THROWS_AS(dme(tplus, 0, p0, 0.5, 0), InvalidArgument);
  CHECK_THROWS_AS(dme(tplus, 0, DensityOp::maximally_mixed(3), 0.5, 2), DimensionError);
}

TEST_CASE("approximate measurement") {
  Rng rng(91);
  const Vec plus = Vec::Constant(2, 1 / std::sqrt(2.0));
  const Vec zero = basis_vector(2, 0), one = basis_vector(2, 1);
  SUBCASE("ideal examples") {
    auto r = approx_measure(DensityOp::pure(zero, {2}), 0, zero, 0, MeasureMode::IdealReflection, 1);
    CHECK(r.prob_b1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.b == 1);
    CHECK((r.post_state.m - oracle::dm(zero)).norm() < 1e-12);
    auto q = approx_measure(DensityOp::pure(one, {2}), 0, zero, 0, MeasureMode::IdealReflection, 1);
    CHECK(q.prob_b1 < 1e-14);
    CHECK(q.b == 0);
    auto h = approx_measure(DensityOp::pure(plus, {2}), 0, zero, 0, MeasureMode::IdealReflection, 1);
    CHECK(h.prob_b1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK((h.post_state_b1->m - oracle::dm(zero)).norm() < 1e-10);
  }
  SUBCASE("ideal calibration on purified inputs") {
    for (int t = 0; t < 20; ++t) {
      const DensityOp tau(random_density(6, 3, rng), {2, 3});
      const Vec psi = haar_state(3, rng);
      auto r = approx_measure(tau, 1, psi, 0, MeasureMode::IdealReflection, t);
      const Mat proj = oracle::kron(Mat::Identity(2, 2), oracle::dm(psi));
      const double p = (proj * tau.m).trace().real();
      CHECK(std::abs(r.prob_b1 - p) <= 1e-9);
      if (p >= 0.5) CHECK((r.post_state_b1->m - proj * tau.m * proj / p).norm() < 1e-9);
    }
  }
  SUBCASE("dme mode") {
    for (std::size_t k : {8, 32, 128}) {
      auto r = approx_measure(DensityOp::pure(one, {2}), 0, zero, k, MeasureMode::Dme, 3);
      CHECK(r.prob_b1 == doctest::Approx(0.5 * (1 - std::pow(std::cos(std::numbers::pi / k), k))).epsilon(1e-12));
      auto s = approx_measure(DensityOp::pure(zero, {2}), 0, zero, k, MeasureMode::Dme, 3);
      CHECK(s.prob_b1 == doctest::Approx(1.0).epsilon(1e-12));
    }
    const DensityOp tau(random_density(4, 2, rng), {2, 2});
    const Vec psi = haar_state(2, rng);
    const double p = approx_measure(tau, 1, psi, 0, MeasureMode::IdealReflection, 0).prob_b1;
    double prev = 1;
    for (std::size_t k : {16, 64, 256}) {
      const double e = std::abs(approx_measure(tau, 1, psi, k, MeasureMode::Dme, 0).prob_b1 - p);
      CHECK(e <= dme_constant() * 0.25 / k + 1e-12);
      CHECK(e <= prev);
      prev = e;
    }
  }
  CHECK_THROWS_AS(approx_measure(DensityOp::pure(zero, {2}), 0, haar_state(3, rng), 0, MeasureMode::IdealReflection, 0),
                  DimensionError);
  CHECK(parse_measure_mode("dme") == MeasureMode::Dme);
  CHECK_THROWS_AS(parse_measure_mode("x"), InvalidArgument);
}

TEST_CASE("qip verifier") {
  Rng rng(101);
  SUBCASE("exact oracle, ideal reflection, honest prover") {
    auto x = instance_with_fidelity(2, 2, 1.0, rng);
    auto r = qip_run(x, 3, honest_prover(x, 3), QipOracle{}, 4);
    CHECK(r.accepted);
    CHECK(oracle::trace_distance(r.output_state->m, oracle::dm(x.phi.amp)) < 1e-9);
    CHECK(r.transcript.size() == 4);
  }
  SUBCASE("agrees with szk for an exact oracle") {
    auto x = instance_with_fidelity(2, 2, 0.9, rng);
    for (std::size_t m : {2, 8}) {
      auto a = qip_statistics(x, m, identity_prover(x, m), QipOracle{});
      auto b = szk_statistics(x, m, identity_prover(x, m));
      CHECK(a.accept_probability == doctest::Approx(b.accept_probability).epsilon(1e-12));
    }
  }
  SUBCASE("preparation error") {
    auto x = instance_with_fidelity(2, 2, 1.0, rng);
    const std::size_t m = 2;
    for (double delta : {0.05, 0.2}) {
      QipOracle o;
      o.prep_error = delta;
      auto st = qip_statistics(x, m, honest_prover(x, m), o);
      CHECK(st.accept_probability >= std::pow(1 - delta, m) - 1e-12);
      CHECK(oracle::trace_distance(st.conditional_output->m, oracle::dm(x.phi.amp)) <= delta + 1e-9);
      o.mode = MeasureMode::Dme;
      o.k_q = 64;
      auto sd = qip_statistics(x, m, honest_prover(x, m), o);
      const double meas_err = dme_constant() * 0.25 / 64;
      CHECK(std::abs(sd.accept_probability - st.accept_probability) <= meas_err);
      CHECK(oracle::trace_distance(sd.conditional_output->m, oracle::dm(x.phi.amp)) <= delta + 2 * meas_err);
      auto run = qip_run(x, m, honest_prover(x, m), o, 8);
      CHECK(run.transcript.back()["mode"] == "dme");
    }
  }
  SUBCASE("dense path matches product path") {
    auto x = instance_with_fidelity(2, 2, 0.85, rng);
    QipOracle o;
    o.prep_error = 0.1;
    const Mat u = uhlmann_unitary(x);
    auto a = qip_statistics(x, 2, honest_prover(x, 2), o);
    auto b = qip_statistics(x, 2, block_prover(ChannelDesc::from_unitary(kron_list({u, u, u}))), o);
    CHECK(a.accept_probability == doctest::Approx(b.accept_probability).epsilon(1e-10));
    CHECK(oracle::trace_distance(a.conditional_output->m, b.conditional_output->m) < 1e-10);
  }
  SUBCASE("identity prover envelope, m = 8") {
    const double mu = 0.01;
    auto x = instance_with_fidelity(2, 2, 1 - mu, rng);
    auto st = qip_statistics(x, 8, identity_prover(x, 8), QipOracle{});
    if (st.accept_probability >= 0.5)
      CHECK(oracle::trace_distance(st.conditional_output->m, target_state(x)) <= std::sqrt(4.0 / 9) + 5 * std::sqrt(mu));
  }
}

namespace {

// Explicit-matrix model of the amplifier for k = 2 with qubit registers,
// ordered (A1 B1 A2 B2 G). Enumerates measurement trajectories.
double amplifier_oracle(const UhlmannInstance& x, const ChannelDesc& R, std::size_t T) {
  const Mat rt = R.dilation;  // on (B1 B2 G)
  Mat rfull = Mat::Zero(32, 32);
  auto idx = [](int a1, int b1, int a2, int b2, int g) { return (((a1 * 2 + b1) * 2 + a2) * 2 + b2) * 2 + g; };
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
          rfull(idx(a1, r >> 2, a2, (r >> 1) & 1, r & 1), idx(a1, c >> 2, a2, (c >> 1) & 1, c & 1)) = rt(r, c);
  const Mat cc = oracle::dm(x.psi.amp), dd = oracle::dm(x.phi.amp);
  const Mat g0 = oracle::dm(basis_vector(2, 0));
  const Mat i2 = Mat::Identity(2, 2), i4 = Mat::Identity(4, 4);
  Vec v = oracle::kron(oracle::kron(x.psi.amp, x.psi.amp), basis_vector(2, 0));
  double total = 0;
  for (int i = 0; i < 2; ++i) {
    const Mat pm = i == 0 ? kron_list({i4, cc, g0}) : kron_list({cc, i4, g0});
    const Mat qm = rfull.adjoint() * (i == 0 ? kron_list({i4, dd, i2}) : kron_list({dd, i4, i2})) * rfull;
    const Mat out = rfull.adjoint() * (i == 0 ? kron_list({dd, i4, i2}) : kron_list({i4, dd, i2})) * rfull;
    std::function<double(const Vec&, std::size_t)> go = [&](const Vec& s, std::size_t t) -> double {
      if (t == T) return (s.adjoint() * out * s)(0, 0).real();
      double f = 0;
      for (int pb = 0; pb < 2; ++pb) {
        const Vec sp = pb ? Vec(pm * s) : Vec(s - pm * s);
        const Vec hit = qm * sp;
        f += (hit.adjoint() * out * hit)(0, 0).real();
        f += go(sp - hit, t + 1);
      }
      return f;
    };
    total += go(v, 0);
  }
  return total / 2;
}

}  // namespace

TEST_CASE("amplification") {
  Rng rng(111);
  auto x = random_real_instance(2, 2, rng);
  SUBCASE("engineered nu is exact") {
    for (double nu : {0.4, 0.6, 0.8, 1.0}) CHECK(amplifier_nu(x, engineered_amplifier(x, 2, nu), 2) == doctest::Approx(nu).epsilon(1e-10));
  }
  SUBCASE("exact transporter") {
    AmplifierConfig cfg{2, 1, 5};
    auto r = amplify_run(x, engineered_amplifier(x, 2, 1.0), cfg, 50);
    CHECK(r.exact_fidelity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.empirical_fidelity == 1.0);
    CHECK(r.bound == amplification_bound(1.0, 1, 2));
  }
  SUBCASE("coherent loop matches trajectory oracle") {
    for (double nu : {0.3, 0.6}) {
      auto R = engineered_amplifier(x, 2, nu);
      for (std::size_t T : {1, 2, 3}) {
        auto r = amplify_run(x, R, AmplifierConfig{2, T, 1}, 10);
        CHECK(r.exact_fidelity == doctest::Approx(amplifier_oracle(x, R, T)).epsilon(1e-10));
      }
    }
    // A generic dilation, not of the engineered form.
    ChannelDesc g;
    g.dilation = haar_unitary(8, rng);
    g.d_in = g.d_out = 4;
    g.d_anc = g.d_env = 2;
    auto r = amplify_run(x, g, AmplifierConfig{2, 2, 1}, 10);
    CHECK(r.exact_fidelity == doctest::Approx(amplifier_oracle(x, g, 2)).epsilon(1e-10));
  }
  SUBCASE("k = 2, T = 3, nu = 0.6 against the bound") {
    auto r = amplify_run(x, engineered_amplifier(x, 2, 0.6), AmplifierConfig{2, 3, 9}, 200);
    CHECK(r.empirical_fidelity >= amplification_bound(0.6, 3, 2) - 3 * r.sigma);
    CHECK(std::abs(r.empirical_fidelity - r.exact_fidelity) <= 4 * r.sigma);
  }
  SUBCASE("Jordan subspace") {
    for (double nu : {0.4, 0.8})
      for (std::size_t k : {2, 3}) {
        auto jd = amplify_jordan_diagnostic(x, engineered_amplifier(x, k, nu), AmplifierConfig{k, 4, 0});
        CHECK(jd.nu == doctest::Approx(nu).epsilon(1e-10));
        CHECK(jd.max_residual <= 1e-8);
      }
    ChannelDesc g;
    g.dilation = haar_unitary(8, rng);
    g.d_in = g.d_out = 4;
    g.d_anc = g.d_env = 2;
    CHECK(amplify_jordan_diagnostic(x, g, AmplifierConfig{2, 3, 0}).max_residual <= 1e-8);
  }
  CHECK_THROWS_AS(amplify_run(x, ChannelDesc::identity(2), AmplifierConfig{2, 1, 0}, 1), DimensionError);
  CHECK_THROWS_AS(amplify_run(x, engineered_amplifier(x, 2, 0.5), AmplifierConfig{2, 0, 0}, 1), InvalidArgument);
}
