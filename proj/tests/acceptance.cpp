// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "scenarios.hpp"
#include "ulab/crypto.hpp"
#include "ulab/linalg.hpp"
#include "ulab/physics.hpp"
#include "ulab/protocols.hpp"
#include "ulab/random.hpp"
#include "ulab/shannon.hpp"
#include "ulab/tensor.hpp"
#include "ulab/uhlmann.hpp"

using namespace ulab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

double sigma_of(double p, std::size_t n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / double(n)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void uhlmann_equality(Outcome& o) {
  Rng rng(1001);
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < 200; ++t) {
    const std::size_t dA = 1 + rng.below(8), dB = 1 + rng.below(8);
    UhlmannInstance x = random_raw_instance(dA, dB, rng);
    const double f = fidelity(x.psi.rho_A(), x.phi.rho_A());
    worst = std::max(worst, std::abs(uhlmann_overlap(x, canonical_uhlmann(x).w) - f));
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-8, "overlap deviates from fidelity");
  o.require(secs < 10, "runtime");
  o.detail << "200 instances, max |overlap - F| = " << worst << ", " << secs << " s";
}

void qutrit_example(Outcome& o) {
  lab::ScenarioConfig cfg;
  cfg.scenario = "uhlmann";
  cfg.inputs = {"qutrit"};
  lab::ScenarioReport r = lab::run_scenario(cfg);
  for (const auto& c : r.doc["checks"]) o.require(c["pass"].get<bool>(), c["name"].get<std::string>());
  o.detail << "||W - W~||_inf = " << r.doc["checks"][2]["value"].get<double>();
}

void szk_protocol(Outcome& o) {
  const std::size_t n = 500;
  for (double mu : {0.01, 0.05}) {
    for (std::size_t m : {2, 4}) {
      Rng rng(child_seed(2002, "instance", m));
      UhlmannInstance x = instance_with_fidelity(2, 2, 1 - mu, rng);
      ProverStrategy honest = honest_prover(x, m), ident = identity_prover(x, m);
      std::size_t acc_h = 0, acc_i = 0;
      for (std::size_t t = 0; t < n; ++t) {
        acc_h += szk_run(x, m, honest, child_seed(2002, "honest", t)).accepted;
        acc_i += szk_run(x, m, ident, child_seed(2002, "identity", t)).accepted;
      }
      const double ph = std::pow(1 - mu, double(m));
      const double pi = std::pow(std::norm(x.phi.amp.dot(x.psi.amp)), double(m));
      const double eh = double(acc_h) / n, ei = double(acc_i) / n;
      o.require(eh >= ph - 3 * sigma_of(ph, n), "honest acceptance");
      o.require(std::abs(ei - pi) <= 3 * sigma_of(pi, n), "identity acceptance");
      const double sim = szk_simulator_distance(x, m);
      o.require(sim <= std::sqrt(double(m + 1) * mu) + 1e-9, "simulator distance");
      o.detail << "mu=" << mu << " m=" << m << ": honest " << eh << " (>= " << ph << "), identity " << ei << " (~ "
               << pi << "), sim " << sim << "; ";
    }
  }
}

void soundness(Outcome& o) {
  Rng rng(3003);
  const double mu = 0.01;
  UhlmannInstance x = instance_with_fidelity(2, 2, 1 - mu, rng);
  const Mat target = projector(x.phi.amp);
  std::size_t tested = 0;
  double worst_margin = 1.0;
  for (std::size_t m : {4, 8, 16}) {
    std::vector<ProverStrategy> provers{identity_prover(x, m), partial_prover(x, m, 0, Mat::Identity(2, 2)),
                                        partial_prover(x, m, 3, haar_unitary(2, rng)), noisy_prover(x, m, 0.02),
                                        noisy_prover(x, m, 0.2)};
    for (const auto& p : provers) {
      ProtocolStatistics st = szk_statistics(x, m, p);
      if (st.accept_probability < 0.5) continue;
      ++tested;
      const double env = std::sqrt(4.0 / double(m + 1)) + 5 * std::sqrt(mu) + 0.05;
      const double td = trace_distance(st.conditional_output->m, target);
      worst_margin = std::min(worst_margin, env - td);
      o.require(td <= env, "envelope at m=" + std::to_string(m));
    }
  }
  o.require(tested > 0, "no prover accepted");
  o.detail << tested << " accepted cheating provers over m in {4,8,16}, min envelope margin " << worst_margin;
}

void amplification(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(4004);
  UhlmannInstance x = random_real_instance(2, 2, rng);
  double min_emp = 1.0, max_bound = 0.0;
  int configs = 0;
  for (double nu : {0.4, 0.6, 0.8})
    for (std::size_t k : {2, 4})
      for (std::size_t T : {2, 5}) {
        AmplifierConfig cfg;
        cfg.k = k;
        cfg.T = T;
        cfg.seed = child_seed(4004, "amp", std::size_t(configs));
        AmplifyResult r = amplify_run(x, engineered_amplifier(x, k, nu), cfg, 200);
        o.require(r.empirical_fidelity >= r.bound - 3 * r.sigma, "bound");
        o.require(std::abs(r.empirical_fidelity - r.exact_fidelity) <= 4 * r.sigma + 1.0 / 200, "sampling");
        min_emp = std::min(min_emp, r.empirical_fidelity);
        max_bound = std::max(max_bound, r.bound);
        ++configs;
      }
  const double secs = seconds_since(t0);
  o.require(secs < 300, "runtime");
  o.detail << configs << " configurations, min empirical F " << min_emp << ", max bound " << max_bound << ", " << secs
           << " s";
}

void dme_scaling(Outcome& o) {
  Rng rng(5005);
  const Vec plus = Vec::Constant(2, 1 / std::sqrt(2.0));
  struct Cal {
    DensityOp target, program;
    std::size_t reg;
    double t;
  };
  std::vector<Cal> cal{
      {DensityOp::pure(plus, {2}), DensityOp::pure(basis_vector(2, 0), {2}), 0, 0.5},
      {DensityOp::pure(haar_state(4, rng), {2, 2}), DensityOp(random_density(2, 2, rng), {2}), 1, 0.3},
      {DensityOp(random_density(3, 3, rng), {3}), DensityOp::pure(haar_state(3, rng), {3}), 0, 0.5}};
  for (const auto& c : cal) {
    const Mat exact = dme_exact(c.target, c.reg, c.program, c.t).m;
    std::vector<double> lx, ly;
    for (std::size_t k = 8; k <= 128; k *= 2) {
      lx.push_back(std::log(double(k)));
      ly.push_back(std::log(trace_distance(dme(c.target, c.reg, c.program, c.t, k).m, exact)));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / double(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / double(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    o.require(slope >= -1.25 && slope <= -0.75, "slope");
    o.detail << "slope " << slope << "; ";
  }
}

void decoupling(Outcome& o) {
  Rng rng(6006);
  int checked = 0;
  double worst = -1.0;
  for (unsigned nA = 1; nA <= 3; ++nA)
    for (unsigned nB = 0; nB <= 2; ++nB)
      for (unsigned s = 0; s <= nA && checked < 20; ++s) {
        const std::size_t dA = std::size_t{1} << nA, dB = std::size_t{1} << nB;
        DensityOp rho(random_density(dA * dB, 1 + rng.below(dA * dB), rng), {dA, dB});
        DecouplingResult r = decoupling_experiment(rho, s, 100, child_seed(6006, "config", std::size_t(checked)));
        o.require(r.samples >= 100, "samples");
        o.require(r.lhs_mean <= r.rhs_bound + 3 * r.lhs_sigma, "bound");
        worst = std::max(worst, r.lhs_mean - r.rhs_bound - 3 * r.lhs_sigma);
        ++checked;
      }
  o.require(checked == 20, "configuration count");
  o.detail << checked << " configurations x 100 Cliffords, max (lhs - rhs - 3 sigma) = " << worst;
}

void compression(Outcome& o) {
  Rng rng(7007);
  double pure_worst = 0.0, mixed_fail_min = 1.0, mixed_ok_worst = 0.0, rank2_worst = 0.0;
  for (unsigned m = 1; m <= 4; ++m) {
    const std::size_t d = std::size_t{1} << m;
    DensityOp pure = DensityOp::pure(haar_state(d, rng), {d});
    pure_worst = std::max(pure_worst, roundtrip(compress(pure, 0.1, child_seed(7007, "pure", m)), purify(pure)));
    DensityOp mixed = DensityOp::maximally_mixed(d);
    for (unsigned s = 0; s + 1 < m; ++s)
      mixed_fail_min = std::min(mixed_fail_min, roundtrip(compress(mixed, 0.1, child_seed(7007, "mm", m), s), purify(mixed)));
    mixed_ok_worst = std::max(mixed_ok_worst, roundtrip(compress(mixed, 0.1, child_seed(7007, "mm", m), m), purify(mixed)));
  }
  for (int seed = 0; seed < 20; ++seed) {
    Rng r(child_seed(7007, "rank2", std::size_t(seed)));
    DensityOp rho(random_density(8, 2, r), {8});
    rank2_worst = std::max(rank2_worst, roundtrip(compress(rho, 0.1, child_seed(7007, "codec", std::size_t(seed))), purify(rho)));
  }
  o.require(pure_worst <= 1e-6, "pure sources");
  o.require(mixed_fail_min >= 0.2, "maximally mixed below m - 1");
  o.require(mixed_ok_worst <= 1e-6, "maximally mixed at s = m");
  o.require(rank2_worst <= 0.1, "rank-2 sources");
  o.detail << "pure td " << pure_worst << ", mixed s<m-1 min td " << mixed_fail_min << ", mixed s=m td " << mixed_ok_worst
           << ", rank-2 max td " << rank2_worst;
}

void haar_incompressibility(Outcome& o) {
  Rng rng(8008);
  DensityOp rho(random_density(8, 8, rng), {8});
  for (unsigned s = 0; s <= 2; ++s) {
    CompressionCodec c = compress(rho, 0.1, child_seed(8008, "codec", s), s);
    OverlapEstimate est = haar_overlap(c.E, c.D, 1000, child_seed(8008, "haar", s));
    o.require(est.samples == 1000, "samples");
    o.require(est.mean <= est.bound + 3 * est.sigma, "bound at s=" + std::to_string(s));
    o.detail << "(3," << s << "): " << est.mean << " <= " << est.bound << " + 3*" << est.sigma << "; ";
  }
}

void commitments(Outcome& o) {
  Rng rng(9009);
  double mlc = 1.0, flav = 1.0, tens = 0.0;
  for (int t = 0; t < 500; ++t) {
    const unsigned n = 2 + unsigned(rng.below(3));
    CommitmentScheme s = random_scheme(n, 1 + unsigned(rng.below(n - 1)), rng);
    SecurityReport r = evaluate(s);
    mlc = std::min(mlc, r.hiding_stat - (1 - std::sqrt(r.binding_opt)));
    if (t < 200) flav = std::min(flav, std::sqrt(r.binding_opt) - evaluate(flavor_switch(s)).hiding_stat);
    if (t < 20 && n <= 3) {
      const std::size_t k = 2 + std::size_t(t % 2);
      tens = std::max(tens, std::abs(evaluate(tensor_amplify(s, k)).binding_opt - std::pow(r.binding_opt, double(k))));
    }
  }
  o.require(mlc >= -1e-9, "tradeoff");
  o.require(flav >= -1e-9, "flavor switch");
  o.require(tens <= 1e-9, "tensor exponent");
  o.detail << "min tradeoff margin " << mlc << ", min flavor margin " << flav << ", max tensor error " << tens;
}

void decoding(Outcome& o) {
  Rng rng(1111);
  double worst = 1.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + rng.below(7);
    worst = std::min(worst, decoder_from_uhlmann(ChannelDesc::from_unitary(haar_unitary(d, rng))).fidelity);
  }
  o.require(worst >= 1 - 1e-8, "unitary channels");
  lab::ScenarioConfig cfg;
  cfg.scenario = "blackhole";
  cfg.inputs = {"scrambler"};
  cfg.seed = 11;
  lab::ScenarioReport r = lab::run_scenario(cfg);
  o.require(r.pass, "scrambler");
  const json& m = r.doc["metrics"];
  o.detail << "unitary min F " << worst << "; scrambler decoupling " << m.value("decoupling_fidelity", 0.0) << ", EPR F "
           << m.value("epr_fidelity", 0.0);
}

void interference(Outcome& o) {
  lab::ScenarioConfig cfg;
  cfg.scenario = "interfere";
  cfg.inputs = {"random"};
  cfg.seed = 1212;
  cfg.trials = 100;
  lab::ScenarioReport r = lab::run_scenario(cfg);
  for (const auto& c : r.doc["checks"]) o.require(c["pass"].get<bool>(), c["name"].get<std::string>());
  const json& m = r.doc["metrics"];
  o.detail << m["correct"].get<std::size_t>() << "/" << 2 * m["pairs"].get<std::size_t>() << " correct, equations "
           << m["max_equation_error"].get<double>() << ", round trip " << m["max_roundtrip_error"].get<double>();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"Uhlmann equality", uhlmann_equality},
      {"qutrit discontinuity example", qutrit_example},
      {"zero-knowledge protocol", szk_protocol},
      {"soundness envelope", soundness},
      {"amplification", amplification},
      {"density matrix exponentiation scaling", dme_scaling},
      {"decoupling", decoupling},
      {"compression", compression},
      {"Haar incompressibility", haar_incompressibility},
      {"commitments", commitments},
      {"channel and black-hole decoding", decoding},
      {"interference detection", interference}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    failed += !o.pass;
    std::printf("%s %2zu %-40s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
