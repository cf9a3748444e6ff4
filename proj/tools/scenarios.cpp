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

#include "scenarios.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

#include "ulab/crypto.hpp"
#include "ulab/linalg.hpp"
#include "ulab/physics.hpp"
#include "ulab/protocols.hpp"
#include "ulab/shannon.hpp"
#include "ulab/tensor.hpp"
#include "ulab/uhlmann.hpp"

namespace ulab::lab {

namespace {

class Params {
 public:
  explicit Params(const std::map<std::string, std::string>& p) : p_(p) {}

  bool has(const std::string& k) const { return p_.count(k) != 0; }

  std::string str(const std::string& k, const std::string& def) {
    used_.insert(k);
    auto it = p_.find(k);
    return it == p_.end() ? def : it->second;
  }

  double real(const std::string& k, double def) {
    used_.insert(k);
    auto it = p_.find(k);
    if (it == p_.end()) return def;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(k);
      return v;
    } catch (const std::exception&) {
      throw UsageError("parameter " + k + " expects a number, got '" + it->second + "'");
    }
  }

  std::size_t count(const std::string& k, std::size_t def) {
    const double v = real(k, double(def));
    if (v < 0 || v != std::floor(v)) throw UsageError("parameter " + k + " expects a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  void check_all_used() const {
    for (const auto& [k, v] : p_)
      if (!used_.count(k)) throw UsageError("unknown parameter '" + k + "' for this scenario");
  }

 private:
  const std::map<std::string, std::string>& p_;
  std::set<std::string> used_;
};

struct Context {
  const ScenarioConfig& cfg;
  Params params;
  json metrics = json::object();
  json checks = json::array();
  bool pass = true;

  explicit Context(const ScenarioConfig& c) : cfg(c), params(c.params) {}

  Seed seed() const {
    if (!cfg.seed) throw UsageError("scenario " + cfg.scenario + " is stochastic and needs --seed");
    return *cfg.seed;
  }
  double tol(double def) const { return cfg.tol.value_or(def); }
  std::size_t trials(std::size_t def) const { return cfg.trials.value_or(def); }

  void metric(const std::string& k, json v) { metrics[k] = std::move(v); }

  /// One bound comparison; the formula names the bound next to the value.
  void check(const std::string& name, const std::string& formula, double value, const std::string& rel, double bound) {
    const bool ok = rel == ">=" ? value >= bound : value <= bound;
    pass = pass && ok;
    checks.push_back({{"name", name}, {"formula", formula}, {"value", value}, {"relation", rel}, {"bound", bound}, {"pass", ok}});
  }
};

// The single input: a JSON file if it exists, otherwise a builtin name.
struct Input {
  std::string builtin;
  std::optional<json> file;
};

Input input_of(const ScenarioConfig& cfg, const std::string& def) {
  if (cfg.inputs.size() > 1) throw UsageError("scenario " + cfg.scenario + " takes at most one input");
  Input in;
  if (cfg.inputs.empty()) {
    in.builtin = def;
    return in;
  }
  const std::string& s = cfg.inputs[0];
  if (std::filesystem::exists(s)) {
    in.file = read_json_file(s);
    return in;
  }
  in.builtin = s;
  return in;
}

[[noreturn]] void unknown_builtin(const std::string& scenario, const std::string& name, const std::string& known) {
  throw UsageError("input '" + name + "' is neither a file nor a builtin for " + scenario + " (builtins: " + known + ")");
}

double binom_sigma(double p, std::size_t n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / double(n)); }

// Sources named like pure-3q, maximally-mixed-3q or rank2-3q.
DensityOp builtin_source(const std::string& name, Context& ctx) {
  static const std::regex re("^(pure|maximally-mixed|rank([0-9]+))-([0-9]+)q$");
  std::smatch m;
  if (!std::regex_match(name, m, re)) unknown_builtin(ctx.cfg.scenario, name, "pure-Nq, maximally-mixed-Nq, rankR-Nq");
  const unsigned n = static_cast<unsigned>(std::stoul(m[3]));
  if (n == 0 || n > 12) throw CapExceeded("source qubits", n, 12);
  const std::size_t d = std::size_t{1} << n;
  check_density_cap(d, "source state");
  const std::string kind = m[1];
  if (kind == "maximally-mixed") return DensityOp::maximally_mixed(d);
  Rng rng(child_seed(ctx.seed(), "source"));
  if (kind == "pure") return DensityOp::pure(haar_state(d, rng), {d});
  const std::size_t rank = std::stoul(m[2]);
  if (rank == 0 || rank > d) throw UsageError("rank must lie in [1, 2^n]");
  return DensityOp(random_density(d, rank, rng), {d});
}

DensityOp density_from_json(const json& j) {
  try {
    Mat m = mat_from_json(j.at("rho"));
    Dims dims = j.contains("dims") ? j.at("dims").get<Dims>() : Dims{static_cast<std::size_t>(m.rows())};
    return DensityOp(m, dims);
  } catch (const json::exception& e) {
    throw ParseError(std::string("density: ") + e.what());
  }
}

// ---------------------------------------------------------------- uhlmann

void run_uhlmann(Context& ctx) {
  Input in = input_of(ctx.cfg, "qutrit");
  const double tol = ctx.tol(1e-8);
  UhlmannInstance x;
  bool qutrit = false;
  if (in.file) {
    x = instance_from_json(*in.file);
  } else if (in.builtin == "qutrit") {
    qutrit = true;
    const double eps = ctx.params.real("eps", 0.01);
    if (!(eps > 0 && eps < 1)) throw UsageError("eps must lie in (0, 1)");
    Vec a = Vec::Zero(9), b = Vec::Zero(9);
    a(0) = b(0) = std::sqrt(1 - eps);
    a(4) = a(8) = std::sqrt(eps / 2);
    b(5) = b(7) = std::sqrt(eps / 2);
    x = UhlmannInstance::from_raw(BipartiteState(a, 3, 3), BipartiteState(a, 3, 3));
    UhlmannInstance xt = UhlmannInstance::from_raw(BipartiteState(b, 3, 3), BipartiteState(a, 3, 3));
    Mat w = canonical_uhlmann(x).w, wt = canonical_uhlmann(xt).w;
    Mat swap12 = Mat::Zero(3, 3);
    swap12(0, 0) = swap12(1, 2) = swap12(2, 1) = 1.0;
    ctx.metric("eps", eps);
    ctx.metric("W", to_json(w));
    ctx.metric("W_perturbed", to_json(wt));
    ctx.check("W equals the identity", "max|W - I_3|", (w - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), "<=", 1e-9);
    ctx.check("perturbed W swaps |1> and |2>", "max|W~ - (|0><0| + |1><2| + |2><1|)|", (wt - swap12).cwiseAbs().maxCoeff(),
              "<=", 1e-9);
    ctx.check("canonical isometry is discontinuous", "||W - W~||_inf >= 2", op_norm(w - wt), ">=", 2.0 - 1e-9);
    ctx.check("perturbation is small", "|| |psi> - |psi~> || <= sqrt(2 eps)", (a - b).norm(), "<=",
              std::sqrt(2 * eps) + 1e-12);
  } else if (in.builtin == "random") {
    Rng rng(child_seed(ctx.seed(), "instance"));
    x = random_raw_instance(ctx.params.count("dA", 3), ctx.params.count("dB", 3), rng);
  } else {
    unknown_builtin("uhlmann", in.builtin, "qutrit, random");
  }
  const double eta = ctx.params.real("eta", 0.0);
  InstanceInfo info = validate_instance(x);
  PartialIsometry w = canonical_uhlmann(x, eta);
  const double overlap = uhlmann_overlap(x, w.w);
  const double completed = uhlmann_overlap(x, unitary_completion(w).unitary);
  ctx.metric("dA", info.dA);
  ctx.metric("dB", info.dB);
  ctx.metric("fidelity", info.kappa);
  ctx.metric("overlap_canonical", overlap);
  ctx.metric("overlap_completion", completed);
  ctx.metric("rank", w.rank());
  if (!qutrit) ctx.metric("W", to_json(w.w));
  if (eta == 0.0) {
    ctx.check("Uhlmann equality", "|<phi|(id (x) W)|psi>|^2 = F(rho, sigma)", std::abs(overlap - info.kappa), "<=", tol);
    ctx.check("completion keeps the overlap", "|<phi|(id (x) U)|psi>|^2 = F(rho, sigma)", std::abs(completed - info.kappa),
              "<=", tol);
  } else {
    ctx.check("cutoff overlap", "|<phi|(id (x) W_eta)|psi>|^2 <= F(rho, sigma)", overlap, "<=", info.kappa + tol);
  }
}

// ---------------------------------------------------------------- szk / qip

UhlmannInstance protocol_instance(Context& ctx) {
  Input in = input_of(ctx.cfg, "random");
  if (in.file) return instance_from_json(*in.file);
  if (in.builtin != "random") unknown_builtin(ctx.cfg.scenario, in.builtin, "random");
  const double kappa = ctx.params.real("kappa", 0.98);
  if (!(kappa >= 0 && kappa <= 1)) throw UsageError("kappa must lie in [0, 1]");
  Rng rng(child_seed(ctx.seed(), "instance"));
  return instance_with_fidelity(ctx.params.count("dA", 2), ctx.params.count("dB", 2), kappa, rng);
}

ProverStrategy prover_of(Context& ctx, const UhlmannInstance& x, std::size_t m) {
  const std::string p = ctx.params.str("prover", "honest");
  if (p == "honest") return honest_prover(x, m);
  if (p == "identity") return identity_prover(x, m);
  if (p == "noisy") return noisy_prover(x, m, ctx.params.real("noise", 0.1));
  throw UsageError("prover must be honest, identity or noisy");
}

void run_szk(Context& ctx) {
  UhlmannInstance x = protocol_instance(ctx);
  const std::size_t m = ctx.params.count("m", 4);
  if (m == 0) throw UsageError("m must be positive");
  ProverStrategy prover = prover_of(ctx, x, m);
  const std::size_t n = ctx.trials(500);
  if (n == 0) throw UsageError("--trials must be positive");
  const double kappa = validate_instance(x).kappa, mu = 1 - kappa;
  ProtocolStatistics st = szk_statistics(x, m, prover);
  std::size_t acc = 0;
  for (std::size_t t = 0; t < n; ++t) acc += szk_run(x, m, prover, child_seed(ctx.seed(), "run", t)).accepted;
  const double emp = double(acc) / double(n);
  const double sim = szk_simulator_distance(x, m);
  ctx.metric("m", m);
  ctx.metric("prover", prover.name);
  ctx.metric("kappa", kappa);
  ctx.metric("accept_exact", st.accept_probability);
  ctx.metric("accept_empirical", emp);
  ctx.metric("trials", n);
  ctx.metric("simulator_distance", sim);
  if (prover.label == ProverStrategy::Label::Honest) {
    const double p = std::pow(1 - mu, double(m));
    ctx.check("honest completeness", "accept >= (1 - mu)^m - 3 sigma", emp, ">=", p - 3 * binom_sigma(p, n));
  } else if (prover.label == ProverStrategy::Label::Identity) {
    const double p = std::pow(std::norm(x.phi.amp.dot(x.psi.amp)), double(m));
    ctx.check("identity prover acceptance", "|accept - |<D|C>|^{2m}| <= 3 sigma", std::abs(emp - p), "<=",
              3 * binom_sigma(p, n));
  }
  ctx.check("zero knowledge", "td(simulated, honest) <= sqrt((m + 1) mu)", sim, "<=", std::sqrt(double(m + 1) * mu) + 1e-9);
  if (st.accept_probability >= 0.5 && st.conditional_output) {
    const double td = trace_distance(st.conditional_output->m, projector(x.phi.amp));
    ctx.metric("conditional_output_distance", td);
    ctx.check("soundness envelope", "td(output, |D>) <= sqrt(4/(m+1)) + 5 sqrt(mu) + 0.05", td, "<=",
              std::sqrt(4.0 / double(m + 1)) + 5 * std::sqrt(mu) + 0.05);
  }
}

void run_qip(Context& ctx) {
  UhlmannInstance x = protocol_instance(ctx);
  const std::size_t m = ctx.params.count("m", 3);
  if (m == 0) throw UsageError("m must be positive");
  ProverStrategy prover = prover_of(ctx, x, m);
  QipOracle o;
  o.prep_error = ctx.params.real("prep_error", 0.0);
  o.mode = parse_measure_mode(ctx.params.str("mode", "ideal"));
  o.k_q = ctx.params.count("k_q", 0);
  o.junk_seed = child_seed(ctx.seed(), "junk");
  const std::size_t n = ctx.trials(200);
  if (n == 0) throw UsageError("--trials must be positive");
  ProtocolStatistics st = qip_statistics(x, m, prover, o);
  std::size_t acc = 0;
  for (std::size_t t = 0; t < n; ++t) acc += qip_run(x, m, prover, o, child_seed(ctx.seed(), "run", t)).accepted;
  const double emp = double(acc) / double(n);
  ctx.metric("m", m);
  ctx.metric("prover", prover.name);
  ctx.metric("kappa", validate_instance(x).kappa);
  ctx.metric("prep_error", o.prep_error);
  ctx.metric("accept_exact", st.accept_probability);
  ctx.metric("accept_empirical", emp);
  ctx.metric("trials", n);
  ctx.check("sampled acceptance matches exact", "|accept_empirical - accept_exact| <= 3 sigma + 1/n",
            std::abs(emp - st.accept_probability), "<=", 3 * binom_sigma(st.accept_probability, n) + 1.0 / double(n));
  if (st.conditional_output && st.accept_probability >= 0.5) {
    const double mu = 1 - validate_instance(x).kappa;
    const double td = trace_distance(st.conditional_output->m, projector(x.phi.amp));
    ctx.metric("conditional_output_distance", td);
    ctx.check("soundness envelope", "td(output, |D>) <= sqrt(4/(m+1)) + 5 sqrt(mu) + prep_error + 0.05", td, "<=",
              std::sqrt(4.0 / double(m + 1)) + 5 * std::sqrt(mu) + o.prep_error + 0.05);
  }
}

// ---------------------------------------------------------------- amplify

void run_amplify(Context& ctx) {
  Input in = input_of(ctx.cfg, "random-real");
  UhlmannInstance x;
  if (in.file) {
    x = instance_from_json(*in.file);
  } else if (in.builtin == "random-real") {
    Rng rng(child_seed(ctx.seed(), "instance"));
    x = random_real_instance(ctx.params.count("dA", 2), ctx.params.count("dB", 2), rng);
  } else {
    unknown_builtin("amplify", in.builtin, "random-real");
  }
  const double nu = ctx.params.real("nu", 0.6);
  AmplifierConfig cfg;
  cfg.k = ctx.params.count("k", 2);
  cfg.T = ctx.params.count("T", 3);
  cfg.seed = child_seed(ctx.seed(), "amplifier");
  cfg.validate();
  const std::size_t n = ctx.trials(200);
  if (n == 0) throw UsageError("--trials must be positive");
  ChannelDesc R = engineered_amplifier(x, cfg.k, nu);
  AmplifyResult r = amplify_run(x, R, cfg, n);
  ctx.metric("nu_target", nu);
  ctx.metric("nu", r.nu);
  ctx.metric("k", cfg.k);
  ctx.metric("T", cfg.T);
  ctx.metric("trials", r.trials);
  ctx.metric("empirical_fidelity", r.empirical_fidelity);
  ctx.metric("sigma", r.sigma);
  ctx.metric("exact_fidelity", r.exact_fidelity);
  ctx.check("amplification bound", "F >= 1 - (2(1 - nu)^T + 32 T / sqrt(k)) - 3 sigma", r.empirical_fidelity, ">=",
            r.bound - 3 * r.sigma);
  ctx.check("sampling agrees with the exact value", "|F_empirical - F_exact| <= 4 sigma + 1/n",
            std::abs(r.empirical_fidelity - r.exact_fidelity), "<=", 4 * r.sigma + 1.0 / double(n));
}

// ---------------------------------------------------------------- commit

void run_commit(Context& ctx) {
  Input in = input_of(ctx.cfg, "random");
  const double tol = ctx.tol(1e-8);
  CommitmentScheme s;
  if (in.file) {
    s = scheme_from_json(*in.file);
  } else if (in.builtin == "random") {
    Rng rng(child_seed(ctx.seed(), "scheme"));
    const auto n = static_cast<unsigned>(ctx.params.count("n", 3));
    const auto nc = static_cast<unsigned>(ctx.params.count("n_commit", 1));
    if (nc == 0 || nc >= n) throw UsageError("n_commit must lie in [1, n - 1]");
    s = random_scheme(n, nc, rng, ctx.params.count("gates", 0));
  } else {
    unknown_builtin("commit", in.builtin, "random");
  }
  SecurityReport rep = evaluate(s, uhlmann_attack(s));
  ctx.metric("scheme", scheme_to_json(s));
  ctx.metric("report", to_json(rep));
  ctx.check("Mayers-Lo-Chau tradeoff", "hiding_stat >= 1 - sqrt(binding_opt)", rep.hiding_stat, ">=",
            1 - std::sqrt(rep.binding_opt) - 1e-9);
  ctx.check("canonical attack is optimal", "|F_attack - binding_opt|", std::abs(*rep.binding_attack - rep.binding_opt),
            "<=", tol);
  if (s.n_qubits + 1 <= 10) {
    SecurityReport sw = evaluate(flavor_switch(s));
    ctx.metric("flavor_switched", to_json(sw));
    ctx.check("flavor switch hiding", "hiding'_stat <= sqrt(binding_opt)", sw.hiding_stat, "<=",
              std::sqrt(rep.binding_opt) + 1e-9);
    ctx.check("flavor switch binding", "binding'_opt <= hiding_stat", sw.binding_opt, "<=", rep.hiding_stat + 1e-9);
  }
  const std::size_t k = ctx.params.count("k", 0);
  if (k > 0) {
    SecurityReport amp = evaluate(tensor_amplify(s, k));
    ctx.metric("k", k);
    ctx.metric("amplified", to_json(amp));
    ctx.check("tensor amplification", "|binding_opt(k copies) - binding_opt^k|",
              std::abs(amp.binding_opt - std::pow(rep.binding_opt, double(k))), "<=", 1e-9);
  }
  if (2 * s.dC() * 2 * s.dR() <= 256) {
    ChannelDesc ch = commitment_channel(s);
    const double dec = decoupling_fidelity(ch);
    ctx.metric("channel_decoupling", dec);
  }
}

// ---------------------------------------------------------------- channel

void run_channel(Context& ctx) {
  Input in = input_of(ctx.cfg, "random");
  ChannelDesc ch;
  if (in.file) {
    ch = channel_from_json(*in.file);
  } else if (in.builtin == "random") {
    Rng rng(child_seed(ctx.seed(), "channel"));
    const std::size_t d_in = ctx.params.count("d_in", 2), d_out = ctx.params.count("d_out", 2),
                      d_env = ctx.params.count("d_env", 2);
    if (d_in == 0 || d_in > d_out * d_env || (d_out * d_env) % d_in != 0)
      throw UsageError("need d_in dividing d_out * d_env");
    check_density_cap(d_out * d_env, "channel dilation");
    ch = ChannelDesc::from_isometry(haar_unitary(d_out * d_env, rng).leftCols(static_cast<Eigen::Index>(d_in)), d_out, d_env);
  } else if (in.builtin == "identity") {
    ch = ChannelDesc::identity(ctx.params.count("d", 2));
  } else {
    unknown_builtin("channel", in.builtin, "random, identity");
  }
  const double fdec = decoupling_fidelity(ch);
  DecoderResult d = decoder_from_uhlmann(ch);
  ctx.metric("d_in", ch.d_in);
  ctx.metric("d_out", ch.d_out);
  ctx.metric("d_env", ch.d_env);
  ctx.metric("decoupling_fidelity", fdec);
  ctx.metric("decoder_fidelity", d.fidelity);
  ctx.check("decoupling implies decoding", "F_decoder >= F_decoupling", d.fidelity, ">=", fdec - 1e-9);
  ctx.check("decoding implies decoupling", "F_decoupling >= 1 - 2 sqrt(1 - F_decoder)", fdec, ">=",
            1 - 2 * std::sqrt(std::max(0.0, 1 - d.fidelity)) - 1e-9);
}

// ---------------------------------------------------------------- compress

void run_compress(Context& ctx) {
  Input in = input_of(ctx.cfg, "rank2-3q");
  DensityOp rho;
  std::optional<Circuit> circuit;
  unsigned n_out = 0;
  if (in.file) {
    if (in.file->contains("circuit")) {
      circuit = circuit_from_json(in.file->at("circuit"));
      n_out = in.file->value("n_out", circuit->n_qubits());
      Dims dims = {std::size_t{1} << n_out, circuit->dim() >> n_out};
      rho = DensityOp(reduced_state(circuit->run(), dims, {0}), {dims[0]});
    } else {
      rho = density_from_json(*in.file);
    }
  } else {
    rho = builtin_source(in.builtin, ctx);
  }
  const double delta = ctx.params.real("delta", 0.1);
  std::optional<unsigned> force;
  if (ctx.params.has("s")) force = static_cast<unsigned>(ctx.params.count("s", 0));
  CompressionCodec c = circuit ? compress(*circuit, n_out, delta, ctx.seed(), force) : compress(rho, delta, ctx.seed(), force);
  const double td = roundtrip(c, purify(rho));
  json codec = to_json(c);
  codec.erase("E");
  codec.erase("D");
  ctx.metric("codec", codec);
  ctx.metric("forced_s", force.has_value());
  ctx.metric("roundtrip_td", td);
  if (!force) {
    ctx.check("achievability", "td((D o E)(psi), psi) <= max(delta, min(1, 20 nu^{1/4}))", td, "<=",
              std::max(delta, c.error_bound));
  } else {
    const double eps1 = 2 * std::pow(delta, 0.25);
    ctx.metric("converse_epsilon", eps1);
    if (eps1 < 1) {
      const double need = std::ceil(entropies(rho, eps1).h_max_smoothed - 1e-12);
      ctx.metric("converse_min_s", need);
      if (double(c.s) < need)
        ctx.check("converse", "s < ceil(H_max^{2 delta^{1/4}}) implies td > delta", td, ">=", delta);
    }
  }
  const std::size_t samples = ctx.trials(1000);
  if (samples > 0) {
    OverlapEstimate est = haar_overlap(c.E, c.D, samples, child_seed(ctx.seed(), "haar"));
    ctx.metric("haar_overlap", {{"mean", est.mean}, {"sigma", est.sigma}, {"samples", est.samples}});
    ctx.check("Haar incompressibility", "E Tr((D o E)(theta) theta) <= R/M + 3 sigma", est.mean, "<=",
              est.bound + 3 * est.sigma);
  }
}

// ---------------------------------------------------------------- blackhole

void run_blackhole(Context& ctx) {
  Input in = input_of(ctx.cfg, "scrambler");
  const double promise = ctx.params.real("min_decoupling", 0.99);
  BlackHoleInstance bh;
  bool scrambler = false;
  if (in.file) {
    bh = blackhole_from_json(*in.file);
  } else if (in.builtin == "scrambler") {
    scrambler = true;
    const auto n = static_cast<unsigned>(ctx.params.count("n", 6));
    const auto r = static_cast<unsigned>(ctx.params.count("r", 4));
    const std::size_t scan = ctx.params.count("scan", 200);
    if (n == 0 || n > 10) throw CapExceeded("scrambler qubits", n, 10);
    bool found = false;
    for (std::size_t i = 0; i < scan && !found; ++i) {
      BlackHoleInstance cand = BlackHoleInstance::from_unitary(random_clifford(n, child_seed(ctx.seed(), "scrambler", i)), r);
      if (decoupling_fidelity(black_hole_channel(cand)) >= promise) {
        bh = cand;
        found = true;
        ctx.metric("scrambler_index", i);
      }
    }
    if (!found) {
      ctx.metric("scanned", scan);
      ctx.check("decoupling promise", "some scanned scrambler has F_decoupling >= min_decoupling", 0.0, ">=", 1.0);
      return;
    }
  } else {
    unknown_builtin("blackhole", in.builtin, "scrambler");
  }
  ctx.metric("n", bh.n);
  ctx.metric("r", bh.r);
  const double dec = decoupling_fidelity(black_hole_channel(bh));
  ctx.metric("decoupling_fidelity", dec);
  ctx.check("decoupling promise", "F_decoupling >= min_decoupling", dec, ">=", promise);
  if (dec < promise) return;
  BlackHoleDecoding d = bh_decode(bh);
  ctx.metric("epr_fidelity", d.epr_fidelity);
  ctx.metric("channel_fidelity", d.channel_fidelity);
  ctx.check("decoder meets the decoupling value", "F_EPR >= F_decoupling", d.epr_fidelity, ">=", dec - 1e-9);
  ctx.check("black hole and channel views agree", "|F_EPR - F_channel|", std::abs(d.epr_fidelity - d.channel_fidelity),
            "<=", 1e-9);
  if (scrambler) ctx.check("scrambler decodes", "F_EPR >= 0.98", d.epr_fidelity, ">=", 0.98);
}

// ---------------------------------------------------------------- interfere

void run_interfere(Context& ctx) {
  Input in = input_of(ctx.cfg, "random");
  const double tol = ctx.tol(1e-8);
  std::vector<OrthPair> pairs;
  if (in.file) {
    pairs.push_back(pair_from_json(*in.file));
  } else if (in.builtin == "random") {
    const auto n = static_cast<unsigned>(ctx.params.count("n", 3));
    const std::size_t count = ctx.trials(100);
    for (std::size_t i = 0; i < count; ++i) {
      Rng rng(child_seed(ctx.seed(), "pair", i));
      pairs.push_back(random_orth_pair(n, rng));
    }
  } else {
    unknown_builtin("interfere", in.builtin, "random");
  }
  std::size_t correct = 0;
  double eq_err = 0.0, rt_err = 0.0;
  const Vec z = basis_vector(2, 0), o = basis_vector(2, 1);
  for (const auto& p : pairs) {
    Mat u = controlled_swap_from_uhlmann(p);
    eq_err = std::max({eq_err, (u * kron(z, p.C) - kron(z, p.C)).norm(), (u * kron(z, p.D) - kron(z, p.D)).norm(),
                       (u * kron(o, p.C) - kron(o, p.D)).norm(), (u * kron(o, p.D) - kron(o, p.C)).norm()});
    const Vec plus = (p.C + p.D) / std::sqrt(2.0), minus = (p.C - p.D) / std::sqrt(2.0);
    correct += interference_detect(u, plus) == 0;
    correct += interference_detect(u, minus) == 1;
    Mat hs = householder_swap(p.C, p.D);
    Mat back = distinguisher_to_swap(swap_to_distinguisher(hs, p.C, p.D));
    for (const Vec& v : {p.C, p.D, plus}) rt_err = std::max(rt_err, (back * kron(z, v) - kron(z, Vec(hs * v))).norm());
  }
  ctx.metric("pairs", pairs.size());
  ctx.metric("correct", correct);
  ctx.metric("max_equation_error", eq_err);
  ctx.metric("max_roundtrip_error", rt_err);
  ctx.check("sign decisions", "correct = 2 * pairs", double(correct), ">=", double(2 * pairs.size()));
  ctx.check("controlled swap equations", "max residual of the four equations", eq_err, "<=", tol);
  ctx.check("swap-distinguish round trip", "max || V^dag Z V |0>|x> - |0> U|x> ||", rt_err, "<=", tol);
}

// ---------------------------------------------------------------- entropy

void run_entropy(Context& ctx) {
  Input in = input_of(ctx.cfg, "maximally-mixed-3q");
  DensityOp rho = in.file ? density_from_json(*in.file) : builtin_source(in.builtin, ctx);
  const double eps = ctx.params.real("epsilon", 0.0);
  EntropyReport r = entropies(rho, eps);
  const double lr = std::log2(double(numerical_rank(rho.m, 1e-12)));
  ctx.metric("dims", rho.dims);
  ctx.metric("entropies", to_json(r));
  ctx.check("min-entropy lower bound", "h_min >= -log2 rank", r.h_min, ">=", -lr - 1e-9);
  ctx.check("min below max", "h_min <= h_max", r.h_min, "<=", r.h_max + 1e-9);
  ctx.check("max-entropy upper bound", "h_max <= log2 rank", r.h_max, "<=", lr + 1e-9);
  if (ctx.params.has("s")) {
    const auto s = static_cast<unsigned>(ctx.params.count("s", 0));
    DecouplingResult d = decoupling_experiment(rho, s, ctx.trials(100), child_seed(ctx.seed(), "decoupling"));
    ctx.metric("decoupling", {{"s", s},
                              {"samples", d.samples},
                              {"lhs_mean", d.lhs_mean},
                              {"lhs_sigma", d.lhs_sigma},
                              {"h2_omega", d.h2_omega},
                              {"h2_rho", d.h2_rho}});
    ctx.check("decoupling theorem", "lhs <= 2^{-H2(A'|E)/2 - H2(A|B)/2} + 3 sigma", d.lhs_mean, "<=",
              d.rhs_bound + 3 * d.lhs_sigma);
  }
}

using Runner = std::function<void(Context&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r = {
      {"uhlmann", run_uhlmann},   {"szk", run_szk},           {"qip", run_qip},
      {"amplify", run_amplify},   {"commit", run_commit},     {"channel", run_channel},
      {"compress", run_compress}, {"blackhole", run_blackhole}, {"interfere", run_interfere},
      {"entropy", run_entropy}};
  return r;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"uhlmann",  "szk",      "qip",       "amplify",   "commit",
                                                 "channel",  "compress", "blackhole", "interfere", "entropy"};
  return names;
}

std::pair<std::string, std::string> split_param(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  auto it = runners().find(cfg.scenario);
  if (it == runners().end()) throw UsageError("unknown scenario '" + cfg.scenario + "'");
  const auto start = std::chrono::steady_clock::now();
  Context ctx(cfg);
  it->second(ctx);
  ctx.params.check_all_used();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ScenarioReport out;
  out.pass = ctx.pass;
  json params = json::object();
  for (const auto& [k, v] : cfg.params) params[k] = v;
  out.doc["scenario"] = cfg.scenario;
  out.doc["inputs"] = cfg.inputs;
  out.doc["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  out.doc["params"] = params;
  if (cfg.trials) out.doc["trials"] = *cfg.trials;
  if (cfg.tol) out.doc["tol"] = *cfg.tol;
  out.doc["metrics"] = ctx.metrics;
  out.doc["checks"] = ctx.checks;
  out.doc["pass"] = ctx.pass;
  if (cfg.timing) out.doc["wall_clock_s"] = secs;

  std::size_t ok = 0;
  for (const auto& c : ctx.checks) ok += c["pass"].get<bool>();
  std::ostringstream s;
  s << cfg.scenario << ": " << ok << "/" << ctx.checks.size() << " checks passed in " << secs << " s";
  for (const auto& c : ctx.checks)
    if (!c["pass"].get<bool>())
      s << "\n  FAIL " << c["name"].get<std::string>() << ": " << c["value"].get<double>() << " "
        << c["relation"].get<std::string>() << " " << c["bound"].get<double>() << "  [" << c["formula"].get<std::string>() << "]";
  out.summary = s.str();
  return out;
}

}  // namespace ulab::lab
