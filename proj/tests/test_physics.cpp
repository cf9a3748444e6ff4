#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ulab/linalg.hpp"
#include "ulab/physics.hpp"
#include "ulab/random.hpp"
#include "ulab/shannon.hpp"
#include "ulab/tensor.hpp"

using namespace ulab;

namespace {

// Moves qubit 0 to the last position.
Circuit rotate_left(unsigned n) {
  Circuit c(n);
  for (unsigned q = 0; q + 1 < n; ++q) c.add(GateKind::SWAP, q, q + 1);
  return c;
}

// Hadamard-test probability of reading 1: (1 - Re<x|U|x>)/2.
double hadamard_p1(const Mat& u, const Vec& x) { return 0.5 * (1.0 - x.dot(u * x).real()); }

Vec superpose(const Vec& c, const Vec& d, int sign) { return (c + double(sign) * d) / std::sqrt(2.0); }

// Four defining equations of the controlled swap, worst residual.
double controlled_swap_error(const Mat& u, const OrthPair& p) {
  const Vec z = basis_vector(2, 0), o = basis_vector(2, 1);
  double e = 0.0;
  e = std::max(e, (u * kron(z, p.C) - kron(z, p.C)).norm());
  e = std::max(e, (u * kron(z, p.D) - kron(z, p.D)).norm());
  e = std::max(e, (u * kron(o, p.C) - kron(o, p.D)).norm());
  e = std::max(e, (u * kron(o, p.D) - kron(o, p.C)).norm());
  return e;
}

}  // namespace

TEST_CASE("black hole channel matches the unitary") {
  Rng rng(1);
  Circuit c = random_circuit(4, 30, rng);
  BlackHoleInstance bh = BlackHoleInstance::from_circuit(c, 2);
  ChannelDesc ch = black_hole_channel(bh);
  ch.validate();
  Mat p = c.unitary();
  for (int a = 0; a < 2; ++a) {
    Vec out = p.col(a * 8);
    // Reduced state on the last two qubits by explicit summation.
    Mat expected = oracle::trace_a(oracle::dm(out), 4, 4);
    Mat in = Mat::Zero(2, 2);
    in(a, a) = 1.0;
    CHECK((run_channel(ch, in) - expected).norm() <= 1e-12);
  }
}

TEST_CASE("black hole decoding") {
  SUBCASE("radiation holds everything") {
    Rng rng(2);
    BlackHoleInstance bh = BlackHoleInstance::from_unitary(Mat::Identity(8, 8), 3);
    BlackHoleDecoding d = bh_decode(bh);
    CHECK(d.epr_fidelity >= 1.0 - 1e-10);
  }
  SUBCASE("radiation holds A") {
    BlackHoleDecoding d = bh_decode(BlackHoleInstance::from_circuit(rotate_left(4), 1));
    CHECK(d.epr_fidelity >= 1.0 - 1e-10);
    CHECK(d.decoupling >= 1.0 - 1e-10);
  }
  SUBCASE("A stays in H") {
    BlackHoleDecoding d = bh_decode(BlackHoleInstance::from_unitary(Mat::Identity(4, 4), 1));
    CHECK(d.epr_fidelity <= 0.5 + 1e-8);
  }
  SUBCASE("black hole and channel views agree") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
      const unsigned n = 2 + unsigned(rng.below(3));
      const unsigned r = 1 + unsigned(rng.below(n));
      BlackHoleDecoding d = bh_decode(BlackHoleInstance::from_circuit(random_circuit(n, 20, rng), r));
      CHECK(std::abs(d.epr_fidelity - d.channel_fidelity) <= 1e-9);
      CHECK(d.epr_fidelity >= d.decoupling - 1e-9);
    }
  }
  SUBCASE("six-qubit Clifford scrambler") {
    bool found = false;
    for (std::uint64_t i = 0; i < 200 && !found; ++i) {
      BlackHoleInstance bh = BlackHoleInstance::from_unitary(random_clifford(6, child_seed(11, "scrambler", i)), 4);
      const double dec = decoupling_fidelity(black_hole_channel(bh));
      if (dec < 0.99) continue;
      found = true;
      BlackHoleDecoding d = bh_decode(bh);
      MESSAGE("seed index " << i << ": decoupling " << d.decoupling << ", epr fidelity " << d.epr_fidelity);
      CHECK(d.epr_fidelity >= 0.98);
      CHECK(std::abs(d.epr_fidelity - d.channel_fidelity) <= 1e-9);
    }
    CHECK(found);
  }
  SUBCASE("exact Clifford decoupling stays finite") {
    // Highly structured inputs once sent the SVD to NaN.
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      BlackHoleInstance bh = BlackHoleInstance::from_unitary(random_clifford(6, child_seed(seed, "scrambler", 0)), 4);
      BlackHoleDecoding d = bh_decode(bh);
      CAPTURE(seed);
      CHECK(std::isfinite(d.epr_fidelity));
      CHECK(d.epr_fidelity >= d.decoupling - 1e-9);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(BlackHoleInstance::from_unitary(Mat::Identity(4, 4), 3), InvalidArgument);
    CHECK_THROWS_AS(BlackHoleInstance::from_unitary(Mat::Identity(3, 3), 1), DimensionError);
    Mat bad = Mat::Identity(4, 4);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(BlackHoleInstance::from_unitary(bad, 1), NumericalError);
  }
}

TEST_CASE("swapping and distinguishing") {
  const Vec zero = basis_vector(2, 0), one = basis_vector(2, 1);
  const Mat x = gate_matrix(GateKind::X);
  SUBCASE("X swaps the basis states") {
    Mat v = swap_to_distinguisher(x, zero, one);
    CHECK(decision_probability(v, kron(zero, superpose(zero, one, +1))) <= 1e-12);
    CHECK(decision_probability(v, kron(zero, superpose(zero, one, -1))) >= 1.0 - 1e-12);
  }
  SUBCASE("Hadamard as a distinguisher") {
    Mat u = distinguisher_to_swap(gate_matrix(GateKind::H));
    CHECK((u - x).norm() <= 1e-12);
  }
  SUBCASE("contract is checked") {
    CHECK_THROWS_AS(swap_to_distinguisher(Mat::Identity(2, 2), zero, one), PromiseViolation);
  }
  SUBCASE("Householder swaps on random pairs") {
    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
      const unsigned n = 1 + unsigned(rng.below(3));
      OrthPair p = random_orth_pair(n, rng);
      Mat u = householder_swap(p.C, p.D);
      CHECK(swap_error(u, p.C, p.D) <= 1e-10);
      Mat v = swap_to_distinguisher(u, p.C, p.D);
      const Vec z = basis_vector(2, 0);
      for (int sign : {+1, -1}) {
        const Vec in = superpose(p.C, p.D, sign);
        const double p1 = decision_probability(v, kron(z, in));
        CHECK(std::abs(p1 - hadamard_p1(u, in)) <= 1e-10);
        CHECK(std::abs(p1 - (sign > 0 ? 0.0 : 1.0)) <= 1e-9);
      }
      // Round trip on |0> (x) span{C, D}.
      Mat back = distinguisher_to_swap(v);
      Vec a = haar_state(2, rng);
      Vec in = a(0) * p.C + a(1) * p.D;
      CHECK((back * kron(z, in) - kron(z, Vec(u * in))).norm() <= 1e-8);
    }
  }
}

TEST_CASE("controlled swap from the Uhlmann unitary") {
  SUBCASE("basis pair gives CNOT on the span") {
    Circuit c(1), d(1);
    d.add(GateKind::X, 0);
    OrthPair p = OrthPair::from_circuits(c, d);
    Mat u = controlled_swap_from_uhlmann(p);
    CHECK(is_unitary(u, 1e-10));
    CHECK((u - gate_matrix(GateKind::CNOT)).norm() <= 1e-8);
  }
  SUBCASE("|00> and an orthogonalized superposition") {
    Vec c = basis_vector(4, 0);
    Vec t(4);
    t << 1.0, 1.0, 0.0, 1.0;
    t /= std::sqrt(3.0);
    Vec d = t - c * c.dot(t);
    d.normalize();
    OrthPair p = OrthPair::from_states(c, d);
    Mat u = controlled_swap_from_uhlmann(p);
    CHECK(controlled_swap_error(u, p) <= 1e-8);
  }
  SUBCASE("random pairs: equations and block structure") {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
      OrthPair p = random_orth_pair(1 + unsigned(t % 3), rng);
      Mat u = controlled_swap_from_uhlmann(p);
      CHECK(is_unitary(u, 1e-9));
      CHECK(controlled_swap_error(u, p) <= 1e-8);
      const auto d = p.C.size();
      Vec a = haar_state(2, rng);
      Vec in = a(0) * p.C + a(1) * p.D;
      // No leakage between control branches on the span.
      CHECK(Vec(u.bottomLeftCorner(d, d) * in).norm() <= 1e-8);
      CHECK(Vec(u.topRightCorner(d, d) * in).norm() <= 1e-8);
    }
  }
  SUBCASE("non-orthogonal pair") {
    Vec c = basis_vector(2, 0);
    Vec d(2);
    d << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK_THROWS_AS(OrthPair::from_states(c, d), PromiseViolation);
  }
}

TEST_CASE("interference detection") {
  SUBCASE("basis pair") {
    OrthPair p = OrthPair::from_states(basis_vector(2, 0), basis_vector(2, 1));
    CHECK(interference_detect(p, superpose(p.C, p.D, +1)) == 0);
    CHECK(interference_detect(p, superpose(p.C, p.D, -1)) == 1);
  }
  SUBCASE("random three-qubit pair") {
    Rng rng(6);
    OrthPair p = random_orth_pair(3, rng);
    Mat u = controlled_swap_from_uhlmann(p);
    const Vec z = basis_vector(2, 0);
    Mat h = kron(gate_matrix(GateKind::H), Mat(Mat::Identity(8, 8)));
    for (int sign : {+1, -1}) {
      // Brute-force outcome probability of the full Hadamard test.
      Vec out = h * u * h * kron(z, superpose(p.C, p.D, sign));
      const double p1 = out.tail(8).squaredNorm();
      CHECK(std::abs(p1 - (sign > 0 ? 0.0 : 1.0)) <= 1e-8);
    }
  }
  SUBCASE("100 random pairs, both signs") {
    Rng rng(7);
    int correct = 0;
    for (int t = 0; t < 100; ++t) {
      OrthPair p = random_orth_pair(1 + unsigned(t % 3), rng);
      Mat u = controlled_swap_from_uhlmann(p);
      correct += interference_detect(u, superpose(p.C, p.D, +1)) == 0;
      correct += interference_detect(u, superpose(p.C, p.D, -1)) == 1;
    }
    CHECK(correct == 200);
  }
  SUBCASE("promise violation") {
    Rng rng(8);
    OrthPair p = random_orth_pair(2, rng);
    CHECK_THROWS_AS(interference_detect(p, p.C), PromiseViolation);
  }
  SUBCASE("json round trip") {
    Circuit c(2), d(2);
    d.add(GateKind::X, 1);
    OrthPair p = pair_from_json(pair_to_json(OrthPair::from_circuits(c, d)));
    CHECK(p.C_circuit.has_value());
    CHECK((p.D - basis_vector(4, 1)).norm() <= 1e-12);
    BlackHoleInstance bh = blackhole_from_json(blackhole_to_json(BlackHoleInstance::from_circuit(rotate_left(3), 1)));
    CHECK(bh.r == 1);
    CHECK(bh_decode(bh).epr_fidelity >= 1.0 - 1e-10);
  }
}
