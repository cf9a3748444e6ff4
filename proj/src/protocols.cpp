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

#include "ulab/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "ulab/linalg.hpp"
#include "ulab/tensor.hpp"

namespace ulab {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

Vec kron_power(const Vec& v, std::size_t e) {
  Vec r = Vec::Ones(1);
  for (std::size_t i = 0; i < e; ++i) r = kron(r, v);
  return r;
}

Mat kron_power(const Mat& v, std::size_t e) {
  Mat r = Mat::Identity(1, 1);
  for (std::size_t i = 0; i < e; ++i) r = kron(r, v);
  return r;
}

std::size_t factorial(std::size_t n) {
  std::size_t r = 1;
  for (std::size_t i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

std::vector<std::size_t> inverse(const std::vector<std::size_t>& p) {
  std::vector<std::size_t> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = i;
  return q;
}

// Pure state whose registers carry labels, so that register moves made by
// the prover and the verifier can be tracked by name.
struct Labeled {
  Vec psi;
  Dims dims;
  std::vector<int> labels;

  std::size_t pos(int label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error("internal: register label not found");
    return static_cast<std::size_t>(it - labels.begin());
  }

  void reorder(const std::vector<int>& order) {
    std::vector<std::size_t> perm;
    perm.reserve(order.size());
    for (int l : order) perm.push_back(pos(l));
    psi = permute_registers(psi, dims, perm);
    dims = permuted_dims(dims, perm);
    labels = order;
  }
};

constexpr int kEnvLabel = 1 << 20;
int a_label(std::size_t j) { return static_cast<int>(2 * j); }
int b_label(std::size_t j) { return static_cast<int>(2 * j + 1); }

Labeled product_copies(const std::vector<Vec>& pairs, std::size_t dA, std::size_t dB) {
  Labeled s;
  s.psi = kron_all(std::span<const Vec>(pairs));
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    s.dims.push_back(dA);
    s.dims.push_back(dB);
    s.labels.push_back(a_label(j));
    s.labels.push_back(b_label(j));
  }
  return s;
}

// Slot p receives B_{pinv[p]}; the verifier's un-permutation is implicit in
// the labels.
void apply_prover(Labeled& s, const ProverStrategy& prover, const std::vector<std::size_t>& pinv, std::size_t dB) {
  const std::size_t n = pinv.size();
  int env = kEnvLabel;
  if (prover.is_product()) {
    for (std::size_t p = 0; p < n; ++p) {
      const ChannelDesc& ch = prover.slots[p];
      const std::size_t at = s.pos(b_label(pinv[p]));
      Dims nd;
      s.psi = apply_isometry(ch.isometry(), s.psi, s.dims, at, {dB, ch.d_env}, &nd);
      s.dims = nd;
      s.labels.insert(s.labels.begin() + static_cast<std::ptrdiff_t>(at) + 1, env++);
    }
    return;
  }
  const ChannelDesc& ch = *prover.block;
  std::vector<int> order;
  for (std::size_t p = 0; p < n; ++p) order.push_back(b_label(pinv[p]));
  for (int l : s.labels)
    if (std::find(order.begin(), order.end(), l) == order.end()) order.push_back(l);
  s.reorder(order);
  Dims merged{ipow(dB, n)};
  merged.insert(merged.end(), s.dims.begin() + static_cast<std::ptrdiff_t>(n), s.dims.end());
  Dims out(n, dB);
  out.push_back(ch.d_env);
  Dims nd;
  s.psi = apply_isometry(ch.isometry(), s.psi, merged, 0, out, &nd);
  std::vector<int> labels(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
  labels.push_back(env);
  labels.insert(labels.end(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end());
  s.labels = labels;
  s.dims.clear();
  for (std::size_t p = 0; p < n; ++p) s.dims.push_back(dB);
  s.dims.push_back(ch.d_env);
  s.dims.insert(s.dims.end(), nd.begin() + static_cast<std::ptrdiff_t>(n) + 1, nd.end());
}

// Moves A0 B0 and all environments to the front and the test pairs to the back.
std::size_t split_output(Labeled& s, std::size_t m) {
  std::vector<int> order{a_label(0), b_label(0)};
  std::size_t d_front = s.dims[s.pos(a_label(0))] * s.dims[s.pos(b_label(0))];
  for (std::size_t i = 0; i < s.labels.size(); ++i)
    if (s.labels[i] >= kEnvLabel) {
      order.push_back(s.labels[i]);
      d_front *= s.dims[i];
    }
  for (std::size_t j = 1; j <= m; ++j) {
    order.push_back(a_label(j));
    order.push_back(b_label(j));
  }
  s.reorder(order);
  return d_front;
}

// Traces the environment out of a (A0 B0) (x) env vector.
Mat trace_env(const Vec& v, std::size_t d_keep) {
  const std::size_t d_env = static_cast<std::size_t>(v.size()) / d_keep;
  Eigen::Map<const RowMat> z(v.data(), static_cast<Eigen::Index>(d_keep), static_cast<Eigen::Index>(d_env));
  return z * z.adjoint();
}

Mat pair_output(const ChannelDesc& ch, const Vec& pair, std::size_t dA, std::size_t dB) {
  Dims nd;
  Vec out = apply_isometry(ch.isometry(), pair, {dA, dB}, 1, {dB, ch.d_env}, &nd);
  return trace_env(out, dA * dB);
}

double real_trace(const Mat& m) { return m.trace().real(); }

DensityOp normalized(const Mat& m, Dims dims) {
  const double t = real_trace(m);
  if (!(t > 0.0)) throw NumericalError("cannot normalize a state of zero trace");
  Mat r = m / t;
  r = 0.5 * (r + r.adjoint()).eval();
  return DensityOp(r, std::move(dims), 1e-8);
}

json perm_json(const std::vector<std::size_t>& p) { return json(p); }

// Per-slot data for product provers: acceptance on a test copy and the output
// of the input copy, both as functions of the slot.
struct ProductData {
  std::vector<double> a;
  std::vector<Mat> rho;
};

ProductData product_data(const UhlmannInstance& x, const ProverStrategy& prover, double prep_error = 0.0,
                         const Vec& junk = Vec()) {
  ProductData d;
  const Vec& c = x.psi.amp;
  const Vec& dvec = x.phi.amp;
  for (const auto& ch : prover.slots) {
    Mat rc = pair_output(ch, c, x.dA(), x.dB());
    double a = (dvec.adjoint() * rc * dvec)(0, 0).real();
    if (prep_error > 0.0) {
      Mat rj = pair_output(ch, junk, x.dA(), x.dB());
      a = (1.0 - prep_error) * a + prep_error * (dvec.adjoint() * rj * dvec)(0, 0).real();
    }
    d.a.push_back(std::clamp(a, 0.0, 1.0));
    d.rho.push_back(rc);
  }
  return d;
}

ProtocolStatistics product_statistics(const ProductData& d, std::size_t dA, std::size_t dB) {
  const std::size_t n = d.a.size();
  ProtocolStatistics st;
  Mat acc = Mat::Zero(dA * dB, dA * dB);
  double total = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double w = 1.0;
    for (std::size_t q = 0; q < n; ++q)
      if (q != p) w *= d.a[q];
    total += w;
    acc += w * d.rho[p];
  }
  st.accept_probability = total / static_cast<double>(n);
  if (total > 0.0) st.conditional_output = normalized(acc, {dA, dB});
  return st;
}

void check_prover(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover) {
  prover.validate(x.dB(), m + 1);
}

// Dense run for one permutation: returns the unnormalized accepted state on
// A0 B0 (trace = acceptance probability).
Mat dense_accept(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover,
                 const std::vector<std::size_t>& pi) {
  const std::size_t dA = x.dA(), dB = x.dB();
  std::vector<Vec> pairs(m + 1, x.psi.amp);
  Labeled s = product_copies(pairs, dA, dB);
  check_pure_cap(static_cast<std::size_t>(s.psi.size()), "protocol state");
  apply_prover(s, prover, inverse(pi), dB);
  const std::size_t d_front = split_output(s, m);
  const Vec dm = kron_power(x.phi.amp, m);
  const std::size_t cols = static_cast<std::size_t>(dm.size());
  Eigen::Map<const RowMat> z(s.psi.data(), static_cast<Eigen::Index>(d_front), static_cast<Eigen::Index>(cols));
  const Vec out = z * dm.conjugate();
  return trace_env(out, dA * dB);
}

}  // namespace

std::string label_name(ProverStrategy::Label l) {
  switch (l) {
    case ProverStrategy::Label::Honest:
      return "honest";
    case ProverStrategy::Label::Identity:
      return "identity";
    case ProverStrategy::Label::Custom:
      return "custom";
  }
  return "custom";
}

std::size_t ProverStrategy::n_slots(std::size_t dB) const {
  if (is_product()) return slots.size();
  std::size_t n = 0, d = 1;
  while (d < block->d_in) {
    d *= dB;
    ++n;
  }
  if (d != block->d_in) throw DimensionError("block prover dimension is not a power of dB");
  return n;
}

void ProverStrategy::validate(std::size_t dB, std::size_t n, double tol) const {
  if (is_product()) {
    if (slots.size() != n) throw DimensionError("prover has the wrong number of slots");
    for (const auto& ch : slots) {
      ch.validate(tol);
      if (ch.d_in != dB || ch.d_out != dB) throw DimensionError("prover slot must map B to B");
    }
    return;
  }
  block->validate(tol);
  if (block->d_in != ipow(dB, n) || block->d_out != block->d_in)
    throw DimensionError("block prover must map the B block to itself");
}

Mat ProverStrategy::act(const Mat& rho, const Dims& dims, const std::vector<std::size_t>& b_regs) const {
  if (is_product()) {
    if (b_regs.size() != slots.size()) throw DimensionError("one register per slot expected");
    Mat r = rho;
    for (std::size_t p = 0; p < slots.size(); ++p) r = run_channel_on(slots[p], r, dims, b_regs[p]);
    return r;
  }
  std::vector<std::size_t> perm(b_regs);
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (std::find(b_regs.begin(), b_regs.end(), i) == b_regs.end()) perm.push_back(i);
  Mat p = permute_registers(rho, dims, perm);
  Dims pd = permuted_dims(dims, perm);
  std::size_t dT = 1;
  for (std::size_t i = 0; i < b_regs.size(); ++i) dT *= pd[i];
  Dims merged{dT};
  merged.insert(merged.end(), pd.begin() + static_cast<std::ptrdiff_t>(b_regs.size()), pd.end());
  p = run_channel_on(*block, p, merged, 0);
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return permute_registers(p, pd, inv);
}

ChannelDesc partial_depolarizing(std::size_t d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("depolarizing strength must lie in [0, 1]");
  const std::size_t n = d * d;
  Mat v = Mat::Zero(d * n, d);
  const double pi2 = 2.0 * std::numbers::pi / static_cast<double>(d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const double w = (a == 0 && b == 0) ? std::sqrt(1.0 - p + p / static_cast<double>(n))
                                          : std::sqrt(p / static_cast<double>(n));
      const std::size_t e = a * d + b;
      for (std::size_t j = 0; j < d; ++j) {
        // X^a Z^b |j> = omega^{bj} |j + a>
        const cplx ph = std::polar(1.0, pi2 * static_cast<double>(b * j));
        v(((j + a) % d) * n + e, j) += w * ph;
      }
    }
  return ChannelDesc::from_isometry(v, d, n);
}

ProverStrategy honest_prover(const UhlmannInstance& x, std::size_t m, double eta) {
  const Mat u = unitary_completion(canonical_uhlmann(x, eta)).unitary;
  ProverStrategy s;
  s.label = ProverStrategy::Label::Honest;
  s.name = "honest";
  s.slots.assign(m + 1, ChannelDesc::from_unitary(u));
  return s;
}

ProverStrategy identity_prover(const UhlmannInstance& x, std::size_t m) {
  ProverStrategy s;
  s.label = ProverStrategy::Label::Identity;
  s.name = "identity";
  s.slots.assign(m + 1, ChannelDesc::identity(x.dB()));
  return s;
}

ProverStrategy partial_prover(const UhlmannInstance& x, std::size_t m, std::size_t slot, const Mat& deviant) {
  if (slot > m) throw InvalidArgument("slot out of range");
  ProverStrategy s = honest_prover(x, m);
  s.label = ProverStrategy::Label::Custom;
  s.name = "partial";
  s.slots[slot] = ChannelDesc::from_unitary(deviant);
  return s;
}

ProverStrategy noisy_prover(const UhlmannInstance& x, std::size_t m, double p) {
  const Mat u = unitary_completion(canonical_uhlmann(x)).unitary;
  ProverStrategy s;
  s.label = ProverStrategy::Label::Custom;
  s.name = "noisy";
  s.slots.assign(m + 1, compose(ChannelDesc::from_unitary(u), partial_depolarizing(x.dB(), p)));
  return s;
}

ProverStrategy block_prover(ChannelDesc ch, std::string name) {
  ProverStrategy s;
  s.label = ProverStrategy::Label::Custom;
  s.name = std::move(name);
  s.block = std::move(ch);
  return s;
}

ProtocolResult szk_run(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover, Seed seed) {
  if (m < 1) throw InvalidArgument("at least one test copy is required");
  check_prover(x, m, prover);
  Rng rng(child_seed(seed, "szk"));
  const auto pi = random_permutation(m + 1, rng);
  ProtocolResult r;
  r.transcript.push_back({{"round", 1}, {"from", "verifier"}, {"test_copies", m}, {"pi", perm_json(pi)}});
  r.transcript.push_back({{"round", 2}, {"from", "prover"}, {"prover", prover.name}});

  Mat acc;
  if (prover.is_product()) {
    const ProductData d = product_data(x, prover);
    double p = 1.0;
    for (std::size_t j = 1; j <= m; ++j) p *= d.a[pi[j]];
    acc = p * d.rho[pi[0]];
  } else {
    acc = dense_accept(x, m, prover, pi);
  }
  r.accept_probability = std::clamp(real_trace(acc), 0.0, 1.0);
  r.accepted = rng.uniform() < r.accept_probability;
  if (r.accepted) r.output_state = normalized(acc, {x.dA(), x.dB()});
  r.transcript.push_back({{"round", 3},
                          {"from", "verifier"},
                          {"accept_probability", r.accept_probability},
                          {"accepted", r.accepted}});
  return r;
}

ProtocolStatistics szk_statistics(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover) {
  if (m < 1) throw InvalidArgument("at least one test copy is required");
  check_prover(x, m, prover);
  if (prover.is_product()) return product_statistics(product_data(x, prover), x.dA(), x.dB());
  if (m + 1 > 7) throw CapExceeded("permutation enumeration", factorial(m + 1), factorial(7));
  std::vector<std::size_t> pi(m + 1);
  std::iota(pi.begin(), pi.end(), 0);
  Mat acc = Mat::Zero(x.dA() * x.dB(), x.dA() * x.dB());
  std::size_t count = 0;
  do {
    acc += dense_accept(x, m, prover, pi);
    ++count;
  } while (std::next_permutation(pi.begin(), pi.end()));
  acc /= static_cast<double>(count);
  ProtocolStatistics st;
  st.accept_probability = std::clamp(real_trace(acc), 0.0, 1.0);
  if (st.accept_probability > 0.0) st.conditional_output = normalized(acc, {x.dA(), x.dB()});
  return st;
}

DensityOp szk_simulate(const UhlmannInstance& x, std::size_t m) {
  const Vec v = kron_power(x.phi.amp, m + 1);
  check_density_cap(static_cast<std::size_t>(v.size()), "simulator output");
  Dims dims;
  for (std::size_t j = 0; j <= m; ++j) {
    dims.push_back(x.dA());
    dims.push_back(x.dB());
  }
  return DensityOp::pure(v, dims);
}

DensityOp szk_honest_state(const UhlmannInstance& x, std::size_t m, double eta) {
  const Vec v = kron_power(apply_uhlmann(x, eta), m + 1);
  check_density_cap(static_cast<std::size_t>(v.size()), "honest verifier state");
  Dims dims;
  for (std::size_t j = 0; j <= m; ++j) {
    dims.push_back(x.dA());
    dims.push_back(x.dB());
  }
  return DensityOp::pure(v, dims);
}

double szk_simulator_distance(const UhlmannInstance& x, std::size_t m, double eta) {
  const double f = std::norm(x.phi.amp.dot(apply_uhlmann(x, eta)));
  return std::sqrt(std::max(0.0, 1.0 - std::pow(f, static_cast<double>(m + 1))));
}

DensityOp szk_post_prover_state(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover) {
  check_prover(x, m, prover);
  const std::size_t dA = x.dA(), dB = x.dB();
  const std::size_t d = ipow(dA * dB, m + 1);
  check_density_cap(d, "post-prover state");
  if (m + 1 > 7) throw CapExceeded("permutation enumeration", factorial(m + 1), factorial(7));
  std::vector<std::size_t> pi(m + 1);
  std::iota(pi.begin(), pi.end(), 0);
  Mat acc = Mat::Zero(d, d);
  std::size_t count = 0;
  std::vector<int> order;
  for (std::size_t j = 0; j <= m; ++j) {
    order.push_back(a_label(j));
    order.push_back(b_label(j));
  }
  do {
    Labeled s = product_copies(std::vector<Vec>(m + 1, x.psi.amp), dA, dB);
    apply_prover(s, prover, inverse(pi), dB);
    std::vector<int> o = order;
    for (int l : s.labels)
      if (l >= kEnvLabel) o.push_back(l);
    s.reorder(o);
    acc += trace_env(s.psi, d);
    ++count;
  } while (std::next_permutation(pi.begin(), pi.end()));
  Dims dims;
  for (std::size_t j = 0; j <= m; ++j) {
    dims.push_back(dA);
    dims.push_back(dB);
  }
  return normalized(acc / static_cast<double>(count), dims);
}

// ---------------------------------------------------------------------------
// Amplification

void AmplifierConfig::validate() const {
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (T < 1) throw InvalidArgument("T must be at least 1");
}

double amplification_bound(double nu, std::size_t T, std::size_t k) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw InvalidArgument("nu must lie in [0, 1]");
  if (k < 1) throw InvalidArgument("k must be at least 1");
  const double v = 1.0 - (2.0 * std::pow(1.0 - nu, static_cast<double>(T)) +
                          32.0 * static_cast<double>(T) / std::sqrt(static_cast<double>(k)));
  return std::clamp(v, 0.0, 1.0);
}

namespace {

// Register S = A_1..A_k B_1..B_k G, stored flat.
struct AmpSpace {
  std::size_t k, dA, dB, dG, g0;
  Dims dims;
  Mat rt;  // R~ on B_[k] G
  Vec c, d;

  AmpSpace(const UhlmannInstance& x, const ChannelDesc& R, std::size_t k_) : k(k_), dA(x.dA()), dB(x.dB()) {
    R.validate();
    if (R.d_in != ipow(dB, k) || R.d_out != R.d_in || R.d_env != R.d_anc)
      throw DimensionError("amplifier must map the k-fold B block to itself");
    dG = R.d_anc;
    g0 = R.anc_state;
    rt = R.dilation;
    for (std::size_t j = 0; j < k; ++j) dims.push_back(dA);
    for (std::size_t j = 0; j < k; ++j) dims.push_back(dB);
    dims.push_back(dG);
    check_pure_cap(product(dims), "amplifier space");
    c = x.psi.amp;
    d = x.phi.amp;
  }

  std::size_t size() const { return product(dims); }

  // Register order with the pairs in `pairs` first (A_j B_j interleaved).
  std::vector<std::size_t> front(const std::vector<std::size_t>& pairs) const {
    std::vector<std::size_t> perm;
    for (auto j : pairs) {
      perm.push_back(j);
      perm.push_back(k + j);
    }
    for (std::size_t r = 0; r <= 2 * k; ++r)
      if (std::find(perm.begin(), perm.end(), r) == perm.end()) perm.push_back(r);
    return perm;
  }

  Vec initial() const {
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), 0);
    Vec pairs = kron(kron_power(c, k), basis_vector(dG, g0));
    // pairs are in (A_1 B_1 ... A_k B_k G) order; front(all) maps S to that order.
    auto perm = front(all);
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
    return permute_registers(pairs, permuted_dims(dims, perm), inv);
  }

  // |x^J><x^J| on the pairs J, optionally with |g0><g0| on G.
  Vec project(const Vec& psi, const std::vector<std::size_t>& pairs, const Vec& xj, bool on_g) const {
    auto perm = front(pairs);
    const Dims pd = permuted_dims(dims, perm);
    Vec p = permute_registers(psi, dims, perm);
    const std::size_t rows = static_cast<std::size_t>(xj.size());
    const std::size_t cols = size() / rows;
    Eigen::Map<const RowMat> z(p.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Eigen::Matrix<cplx, 1, Eigen::Dynamic> y = xj.adjoint() * z;
    if (on_g)
      for (std::size_t col = 0; col < cols; ++col)
        if (col % dG != g0) y(static_cast<Eigen::Index>(col)) = 0.0;
    RowMat out = xj * y;
    Vec flat = Eigen::Map<const Vec>(out.data(), static_cast<Eigen::Index>(size()));
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
    return permute_registers(flat, pd, inv);
  }

  Vec apply_r(const Vec& psi, bool adjoint) const {
    const std::size_t rows = ipow(dA, k), cols = ipow(dB, k) * dG;
    Eigen::Map<const RowMat> z(psi.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    RowMat out = adjoint ? RowMat(z * rt.conjugate()) : RowMat(z * rt.transpose());
    return Eigen::Map<const Vec>(out.data(), static_cast<Eigen::Index>(size()));
  }

  double pair_overlap(const Vec& psi, std::size_t i) const {
    auto perm = front({i});
    Vec p = permute_registers(psi, dims, perm);
    const std::size_t rows = dA * dB, cols = size() / rows;
    Eigen::Map<const RowMat> z(p.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    return (d.adjoint() * z).squaredNorm();
  }
};

struct LoopOps {
  const AmpSpace& sp;
  std::vector<std::size_t> pairs;  // pairs that P and Q test
  Vec cj, dj;

  LoopOps(const AmpSpace& s, std::vector<std::size_t> pr) : sp(s), pairs(std::move(pr)) {
    cj = kron_power(sp.c, pairs.size());
    dj = kron_power(sp.d, pairs.size());
  }
  Vec P(const Vec& v) const { return sp.project(v, pairs, cj, true); }
  Vec Q(const Vec& v) const { return sp.apply_r(sp.project(sp.apply_r(v, false), pairs, dj, false), true); }
};

constexpr double kBranchFloor = 1e-30;

// Coherent loop with history bits H_j (bit j) and exit flags F_j (bit T + j).
// `visit` sees every intermediate branch state.
template <class Visit>
std::map<std::uint64_t, Vec> run_loop(const LoopOps& ops, std::size_t T, const Vec& v0, Visit&& visit) {
  std::map<std::uint64_t, Vec> br{{0, v0}};
  const std::uint64_t fmask = ((std::uint64_t{1} << T) - 1) << T;
  for (std::size_t j = 0; j < T; ++j) {
    std::map<std::uint64_t, Vec> next;
    for (auto& [key, psi] : br) {
      if (key & fmask) {
        next.emplace(key, std::move(psi));
        continue;
      }
      Vec pp = ops.P(psi);
      Vec rest = psi - pp;
      if (pp.squaredNorm() > kBranchFloor) next.emplace(key | (std::uint64_t{1} << j), std::move(pp));
      if (rest.squaredNorm() > kBranchFloor) next.emplace(key, std::move(rest));
    }
    for (auto& [key, psi] : next)
      if (!(key & fmask)) visit(psi);
    br.clear();
    for (auto& [key, psi] : next) {
      if (key & fmask) {
        br.emplace(key, std::move(psi));
        continue;
      }
      Vec qq = ops.Q(psi);
      Vec rest = psi - qq;
      if (qq.squaredNorm() > kBranchFloor) br.emplace(key | (std::uint64_t{1} << (T + j)), std::move(qq));
      if (rest.squaredNorm() > kBranchFloor) br.emplace(key, std::move(rest));
    }
    for (auto& [key, psi] : br) visit(psi);
  }
  return br;
}

double loop_output_fidelity(const AmpSpace& sp, const LoopOps& ops, std::size_t T, std::size_t i) {
  auto br = run_loop(ops, T, sp.initial(), [](const Vec&) {});
  double f = 0.0;
  for (auto& [key, psi] : br) f += sp.pair_overlap(sp.apply_r(psi, false), i);
  return std::clamp(f, 0.0, 1.0);
}

std::vector<std::size_t> all_but(std::size_t k, std::size_t i) {
  std::vector<std::size_t> r;
  for (std::size_t j = 0; j < k; ++j)
    if (j != i) r.push_back(j);
  return r;
}

}  // namespace

double amplifier_nu(const UhlmannInstance& x, const ChannelDesc& R, std::size_t k) {
  AmpSpace sp(x, R, k);
  std::vector<std::size_t> all(k);
  std::iota(all.begin(), all.end(), 0);
  LoopOps ops(sp, all);
  const Vec v = sp.initial();
  return std::clamp(ops.Q(v).squaredNorm(), 0.0, 1.0);
}

AmplifyResult amplify_run(const UhlmannInstance& x, const ChannelDesc& R, const AmplifierConfig& cfg,
                          std::size_t trials) {
  cfg.validate();
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  AmpSpace sp(x, R, cfg.k);
  AmplifyResult res;
  res.nu = amplifier_nu(x, R, cfg.k);
  res.bound = amplification_bound(res.nu, cfg.T, cfg.k);
  res.trials = trials;
  std::vector<double> f(cfg.k, -1.0);
  auto fid = [&](std::size_t i) {
    if (f[i] < 0.0) f[i] = loop_output_fidelity(sp, LoopOps(sp, all_but(cfg.k, i)), cfg.T, i);
    return f[i];
  };
  Rng rng(child_seed(cfg.seed, "amplify"));
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t i = rng.below(cfg.k);
    if (rng.uniform() < fid(i)) ++hits;
  }
  double exact = 0.0;
  for (std::size_t i = 0; i < cfg.k; ++i) exact += fid(i);
  res.exact_fidelity = exact / static_cast<double>(cfg.k);
  res.empirical_fidelity = static_cast<double>(hits) / static_cast<double>(trials);
  const double p = res.empirical_fidelity;
  res.sigma = std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(trials)) / static_cast<double>(trials));
  return res;
}

JordanDiagnostic amplify_jordan_diagnostic(const UhlmannInstance& x, const ChannelDesc& R, const AmplifierConfig& cfg) {
  cfg.validate();
  AmpSpace sp(x, R, cfg.k);
  std::vector<std::size_t> all(cfg.k);
  std::iota(all.begin(), all.end(), 0);
  LoopOps ops(sp, all);
  const Vec v = sp.initial();
  const Vec qv = ops.Q(v);
  JordanDiagnostic jd;
  jd.nu = std::clamp(qv.squaredNorm(), 0.0, 1.0);
  Vec e2 = qv - v * v.dot(qv);
  const bool two_dim = e2.norm() > 1e-12;
  if (two_dim) e2 /= e2.norm();
  auto visit = [&](const Vec& psi) {
    const double n = psi.norm();
    if (n < 1e-12) return;
    Vec r = psi - v * v.dot(psi);
    if (two_dim) r -= e2 * e2.dot(psi);
    jd.max_residual = std::max(jd.max_residual, r.norm() / n);
  };
  auto br = run_loop(ops, cfg.T, v, visit);
  double f = 0.0;
  for (std::size_t i = 0; i < cfg.k; ++i)
    for (auto& [key, psi] : br) f += sp.pair_overlap(sp.apply_r(psi, false), i);
  jd.hatted_fidelity = std::clamp(f / static_cast<double>(cfg.k), 0.0, 1.0);
  return jd;
}

ChannelDesc engineered_amplifier(const UhlmannInstance& x, std::size_t k, double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw InvalidArgument("nu must lie in [0, 1]");
  const std::size_t dB = x.dB();
  if (dB % 2 != 0) throw DimensionError("engineered amplifier needs an even B dimension");
  const Mat u = unitary_completion(canonical_uhlmann(x)).unitary;
  const std::size_t dk = ipow(dB, k);
  check_density_cap(2 * dk, "amplifier dilation");
  Mat y(2, 2);
  y << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
  const Mat bad = kron(kron(y, Mat::Identity(dB / 2, dB / 2)), Mat::Identity(dk / dB, dk / dB));
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const Mat ctrl = kron(Mat::Identity(dk, dk), p0) + kron(bad, p1);
  const double c = std::sqrt(nu), s = std::sqrt(1.0 - nu);
  Mat ry(2, 2);
  ry << c, -s, s, c;
  ChannelDesc ch;
  ch.dilation = ctrl * kron(kron_power(u, k), Mat::Identity(2, 2)) * kron(Mat::Identity(dk, dk), ry);
  ch.d_in = dk;
  ch.d_anc = 2;
  ch.d_out = dk;
  ch.d_env = 2;
  ch.anc_state = 0;
  return ch;
}

// ---------------------------------------------------------------------------
// Density matrix exponentiation

DensityOp partial_swap(const DensityOp& rho, const DensityOp& sigma, double dt) {
  const std::size_t d = rho.dim();
  if (sigma.dim() != d) throw DimensionError("partial swap needs equal dimensions");
  check_density_cap(d * d, "partial swap");
  Mat swap = Mat::Zero(d * d, d * d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) swap(b * d + a, a * d + b) = 1.0;
  const Mat u = std::cos(dt) * Mat::Identity(d * d, d * d) - cplx(0, std::sin(dt)) * swap;
  const Mat joint = u * kron(rho.m, sigma.m) * u.adjoint();
  return DensityOp(partial_trace(joint, {d, d}, {1}), sigma.dims, 1e-8);
}

namespace {

// tau_rest (x) rho with rho placed on register `reg`.
Mat replace_register(const Mat& tau, const Dims& dims, std::size_t reg, const Mat& rho) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (i != reg) keep.push_back(i);
  const Mat rest = keep.empty() ? Mat::Identity(1, 1) * tau.trace() : partial_trace(tau, dims, keep);
  const Mat joint = kron(rest, rho);
  Dims jd;
  for (auto i : keep) jd.push_back(dims[i]);
  jd.push_back(dims[reg]);
  std::vector<std::size_t> perm(dims.size());
  for (std::size_t j = 0; j < dims.size(); ++j) perm[j] = j < reg ? j : (j == reg ? dims.size() - 1 : j - 1);
  return permute_registers(joint, jd, perm);
}

// One partial swap of register `reg` against a fresh program copy:
// c^2 tau + s^2 tau_rest (x) rho - i c s [rho_reg, tau].
Mat dme_step(const Mat& tau, const Dims& dims, std::size_t reg, const Mat& rho, const Mat& rho_emb, double dt) {
  const double c = std::cos(dt), s = std::sin(dt);
  return c * c * tau + s * s * replace_register(tau, dims, reg, rho) - cplx(0, c * s) * (rho_emb * tau - tau * rho_emb);
}

void check_dme(const DensityOp& target, std::size_t reg, const DensityOp& program) {
  if (reg >= target.dims.size()) throw DimensionError("register out of range");
  if (target.dims[reg] != program.dim()) throw DimensionError("program dimension must match the register");
}

}  // namespace

DensityOp dme(const DensityOp& target, std::size_t reg, const DensityOp& program, double t, std::size_t k) {
  if (k < 1) throw InvalidArgument("dme needs at least one program copy");
  check_dme(target, reg, program);
  const double dt = -2.0 * std::numbers::pi * t / static_cast<double>(k);
  const Mat emb = embed(program.m, target.dims, {reg});
  Mat tau = target.m;
  for (std::size_t i = 0; i < k; ++i) tau = dme_step(tau, target.dims, reg, program.m, emb, dt);
  tau = 0.5 * (tau + tau.adjoint()).eval();
  return DensityOp(tau, target.dims, 1e-8);
}

DensityOp dme_exact(const DensityOp& target, std::size_t reg, const DensityOp& program, double t) {
  check_dme(target, reg, program);
  const Mat u = expi_hermitian(program.m, 2.0 * std::numbers::pi * t);
  return DensityOp(apply_local(u, target.m, target.dims, {reg}), target.dims, 1e-8);
}

double dme_constant() {
  static const double c = [] {
    const Vec plus = Vec::Constant(2, 1.0 / std::sqrt(2.0));
    const DensityOp target = DensityOp::pure(plus, {2});
    const DensityOp program = DensityOp::pure(basis_vector(2, 0), {2});
    const double t = 0.5;
    const DensityOp exact = dme_exact(target, 0, program, t);
    // e k / t^2 increases towards its limit; extrapolate from two large k.
    auto scaled = [&](std::size_t k) {
      return trace_distance(dme(target, 0, program, t, k).m, exact.m) * static_cast<double>(k) / (t * t);
    };
    const double c1 = scaled(1024), c2 = scaled(2048);
    double best = std::max(c2, 2.0 * c2 - c1);
    return best;
  }();
  return c;
}

std::size_t dme_copies_for(double error, double t) {
  if (!(error > 0.0)) throw InvalidArgument("target error must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dme_constant() * t * t / error)));
}

MeasureMode parse_measure_mode(const std::string& s) {
  if (s == "ideal" || s == "ideal_reflection") return MeasureMode::IdealReflection;
  if (s == "dme") return MeasureMode::Dme;
  throw InvalidArgument("unknown measurement mode: " + s);
}

namespace {

std::string mode_name(MeasureMode m) { return m == MeasureMode::Dme ? "dme" : "ideal_reflection"; }

// Blocks X00, X01, X10, X11 of the Hadamard-test state (without the 1/2).
struct HadamardBlocks {
  Mat x00, x01, x10, x11;
};

HadamardBlocks hadamard_blocks(const DensityOp& tau, std::size_t reg, const Vec& psi, std::size_t k_q,
                               MeasureMode mode) {
  HadamardBlocks h;
  h.x00 = tau.m;
  if (mode == MeasureMode::IdealReflection) {
    const Mat w = embed(Mat::Identity(psi.size(), psi.size()) - 2.0 * projector(psi), tau.dims, {reg});
    h.x11 = w * tau.m * w.adjoint();
    h.x10 = w * tau.m;
  } else {
    if (k_q < 1) throw InvalidArgument("dme mode needs at least one program copy");
    const Mat rho = projector(psi);
    const Mat emb = embed(rho, tau.dims, {reg});
    const double dt = -std::numbers::pi / static_cast<double>(k_q);
    const double c = std::cos(dt), s = std::sin(dt);
    Mat x11 = tau.m, x10 = tau.m;
    for (std::size_t i = 0; i < k_q; ++i) {
      x11 = dme_step(x11, tau.dims, reg, rho, emb, dt);
      x10 = c * x10 - cplx(0, s) * (emb * x10);
    }
    h.x11 = x11;
    h.x10 = x10;
  }
  h.x01 = h.x10.adjoint();
  return h;
}

}  // namespace

ApproxMeasureResult approx_measure(const DensityOp& tau, std::size_t reg, const Vec& psi, std::size_t k_q,
                                   MeasureMode mode, Seed seed) {
  if (reg >= tau.dims.size() || static_cast<std::size_t>(psi.size()) != tau.dims[reg])
    throw DimensionError("program state does not match the measured register");
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw InvalidArgument("program state must be normalized");
  const HadamardBlocks h = hadamard_blocks(tau, reg, psi, k_q, mode);
  const Mat minus = 0.25 * (h.x00 + h.x11 - h.x01 - h.x10);
  const Mat plus = 0.25 * (h.x00 + h.x11 + h.x01 + h.x10);
  ApproxMeasureResult r;
  r.prob_b1 = std::clamp(real_trace(minus), 0.0, 1.0);
  if (r.prob_b1 > 1e-15) r.post_state_b1 = normalized(minus, tau.dims);
  Rng rng(child_seed(seed, "approx_measure"));
  r.b = rng.uniform() < r.prob_b1 ? 1 : 0;
  r.post_state = r.b == 1 ? *r.post_state_b1 : normalized(plus, tau.dims);
  return r;
}

// ---------------------------------------------------------------------------
// QIP verifier with an ideal preparation oracle

namespace {

Vec junk_state(const UhlmannInstance& x, Seed s) {
  Rng rng(child_seed(s, "junk"));
  return haar_state(x.dA() * x.dB(), rng);
}

std::size_t oracle_copies(const QipOracle& o) { return o.k_q ? o.k_q : dme_copies_for(0.01); }

// Density over (A0 B0 env) (x) (A1 B1 ... Am Bm), mixed over the preparation
// outcomes of the test copies.
DensityOp qip_dense_state(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover,
                          const QipOracle& o, const std::vector<std::size_t>& pi) {
  const std::size_t dA = x.dA(), dB = x.dB();
  const Vec junk = junk_state(x, o.junk_seed);
  const std::size_t n_comp = o.prep_error > 0.0 ? (std::size_t{1} << m) : 1;
  Mat acc;
  std::size_t d_front = 0, d_test = ipow(dA * dB, m);
  for (std::size_t mask = 0; mask < n_comp; ++mask) {
    double w = 1.0;
    std::vector<Vec> pairs{x.psi.amp};
    for (std::size_t j = 0; j < m; ++j) {
      const bool bad = (mask >> j) & 1;
      w *= bad ? o.prep_error : 1.0 - o.prep_error;
      pairs.push_back(bad ? junk : x.psi.amp);
    }
    if (w == 0.0) continue;
    Labeled s = product_copies(pairs, dA, dB);
    apply_prover(s, prover, inverse(pi), dB);
    d_front = split_output(s, m);
    check_density_cap(d_front * d_test, "qip verifier state");
    if (acc.size() == 0) acc = Mat::Zero(d_front * d_test, d_front * d_test);
    acc += w * s.psi * s.psi.adjoint();
  }
  return DensityOp(acc, {d_front, d_test}, 1e-8);
}

Mat trace_to_output(const Mat& rho, std::size_t d_front, std::size_t d_test, std::size_t dAB) {
  const Mat front = partial_trace(rho, {d_front, d_test}, {0});
  return partial_trace(front, {dAB, d_front / dAB}, {0});
}

bool qip_product_path(const ProverStrategy& prover, const QipOracle& o) {
  return prover.is_product() && o.mode == MeasureMode::IdealReflection;
}

}  // namespace

ProtocolResult qip_run(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover, const QipOracle& oracle,
                       Seed seed) {
  if (m < 1) throw InvalidArgument("at least one test copy is required");
  if (!(oracle.prep_error >= 0.0 && oracle.prep_error <= 1.0)) throw InvalidArgument("prep_error must lie in [0, 1]");
  check_prover(x, m, prover);
  Rng rng(child_seed(seed, "qip"));
  const auto pi = random_permutation(m + 1, rng);
  const std::size_t dAB = x.dA() * x.dB();
  const std::size_t k_q = oracle.mode == MeasureMode::Dme ? oracle_copies(oracle) : 0;
  ProtocolResult r;
  r.transcript.push_back({{"round", 1}, {"from", "oracle"}, {"test_copies", m}, {"prep_error", oracle.prep_error}});
  r.transcript.push_back({{"round", 2}, {"from", "verifier"}, {"pi", perm_json(pi)}});
  r.transcript.push_back({{"round", 3}, {"from", "prover"}, {"prover", prover.name}});

  std::optional<Mat> out;
  if (qip_product_path(prover, oracle)) {
    const ProductData d = product_data(x, prover, oracle.prep_error, junk_state(x, oracle.junk_seed));
    double p = 1.0;
    for (std::size_t j = 1; j <= m; ++j) p *= d.a[pi[j]];
    r.accept_probability = std::clamp(p, 0.0, 1.0);
    r.accepted = rng.uniform() < r.accept_probability;
    if (r.accepted) out = d.rho[pi[0]];
  } else {
    const DensityOp st = qip_dense_state(x, m, prover, oracle, pi);
    const Vec dm = kron_power(x.phi.amp, m);
    const auto meas = approx_measure(st, 1, dm, k_q, oracle.mode, child_seed(seed, "qip-measure"));
    r.accept_probability = meas.prob_b1;
    r.accepted = meas.b == 1;
    if (r.accepted) out = trace_to_output(meas.post_state.m, st.dims[0], st.dims[1], dAB);
  }
  json rec{{"round", 4},
           {"from", "verifier"},
           {"mode", mode_name(oracle.mode)},
           {"k_q", k_q},
           {"prob_b1", r.accept_probability},
           {"accepted", r.accepted}};
  if (out) {
    r.output_state = normalized(*out, {x.dA(), x.dB()});
    rec["td_to_D"] = trace_distance(r.output_state->m, projector(x.phi.amp));
  }
  r.transcript.push_back(rec);
  return r;
}

ProtocolStatistics qip_statistics(const UhlmannInstance& x, std::size_t m, const ProverStrategy& prover,
                                  const QipOracle& oracle) {
  if (m < 1) throw InvalidArgument("at least one test copy is required");
  check_prover(x, m, prover);
  if (qip_product_path(prover, oracle))
    return product_statistics(product_data(x, prover, oracle.prep_error, junk_state(x, oracle.junk_seed)),
                              x.dA(), x.dB());
  if (m + 1 > 7) throw CapExceeded("permutation enumeration", factorial(m + 1), factorial(7));
  std::vector<std::size_t> pi(m + 1);
  std::iota(pi.begin(), pi.end(), 0);
  Mat acc;
  Dims dims;
  std::size_t count = 0;
  do {
    const DensityOp st = qip_dense_state(x, m, prover, oracle, pi);
    if (acc.size() == 0) acc = Mat::Zero(st.dim(), st.dim());
    acc += st.m;
    dims = st.dims;
    ++count;
  } while (std::next_permutation(pi.begin(), pi.end()));
  const DensityOp avg(acc / static_cast<double>(count), dims, 1e-8);
  const std::size_t k_q = oracle.mode == MeasureMode::Dme ? oracle_copies(oracle) : 0;
  const HadamardBlocks h = hadamard_blocks(avg, 1, kron_power(x.phi.amp, m), k_q, oracle.mode);
  const Mat minus = 0.25 * (h.x00 + h.x11 - h.x01 - h.x10);
  ProtocolStatistics st;
  st.accept_probability = std::clamp(real_trace(minus), 0.0, 1.0);
  if (st.accept_probability > 1e-15)
    st.conditional_output = normalized(trace_to_output(minus, dims[0], dims[1], x.dA() * x.dB()), {x.dA(), x.dB()});
  return st;
}

}  // namespace ulab
