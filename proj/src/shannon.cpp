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

#include "ulab/shannon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ulab/linalg.hpp"
#include "ulab/tensor.hpp"
#include "ulab/uhlmann.hpp"

namespace ulab {

namespace {

constexpr double kEigFloor = 1e-13;

RVec clamped_spectrum(const Mat& rho) {
  RVec ev = eigvalsh(rho);
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > kEigFloor * 10 ? ev(i) : 0.0;
  return ev;
}

double h_max_of(const RVec& ev) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::sqrt(std::max(ev(i), 0.0));
  return 2.0 * std::log2(s);
}

// Pseudo-inverse square root of a PSD matrix.
Mat inv_sqrt_psd(const Mat& m) {
  EigH e = eigh(m);
  RVec d(e.values.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = e.values(i) > kEigFloor ? 1.0 / std::sqrt(e.values(i)) : 0.0;
  return e.vectors * d.asDiagonal() * e.vectors.adjoint();
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double sigma_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

}  // namespace

Vec max_entangled(std::size_t d) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(d * d));
  for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i * d + i)) = 1.0 / std::sqrt(double(d));
  return v;
}

double decoupling_fidelity(const ChannelDesc& ch) {
  const std::size_t dA = ch.d_in;
  check_density_cap(ch.d_env * dA, "decoupling_fidelity");
  ChannelDesc comp = complementary(ch);
  Mat phi = projector(max_entangled(dA));
  Mat lhs = run_channel_on(comp, phi, {dA, dA}, 0);
  Mat mixed = Mat::Identity(dA, dA) / double(dA);
  Mat rhs = kron(run_channel(comp, mixed), mixed);
  return fidelity(lhs, rhs);
}

DecoderResult decoder_from_uhlmann(const ChannelDesc& ch) {
  const std::size_t dA = ch.d_in, dB = ch.d_out, dC = ch.d_env;
  check_density_cap(dB * dA * dA, "decoder_from_uhlmann");
  check_density_cap(dC * dA, "decoder_from_uhlmann");
  const Mat V = ch.isometry();  // rows b dC + c
  const std::size_t side = dB * dA * dA;
  const double norm = 1.0 / std::sqrt(double(dA));

  // A side (C, R); B side (B, A', R').
  Vec e = Vec::Zero(static_cast<Eigen::Index>(dC * dA * side));
  Vec f = Vec::Zero(e.size());
  for (std::size_t c = 0; c < dC; ++c)
    for (std::size_t r = 0; r < dA; ++r)
      for (std::size_t b = 0; b < dB; ++b) {
        const std::size_t left = (c * dA + r) * side;
        e(static_cast<Eigen::Index>(left + b * dA * dA)) = V(b * dC + c, r) * norm;
        for (std::size_t rp = 0; rp < dA; ++rp)
          f(static_cast<Eigen::Index>(left + (b * dA + r) * dA + rp)) = V(b * dC + c, rp) * norm * norm;
      }
  UhlmannInstance x = UhlmannInstance::from_raw(BipartiteState(e, dC * dA, side), BipartiteState(f, dC * dA, side));
  Mat U = unitary_completion(canonical_uhlmann(x)).unitary;

  // Input B with ancilla A'R' in |0>; output A', environment (B, R').
  ChannelDesc dec;
  dec.d_in = dB;
  dec.d_anc = dA * dA;
  dec.d_out = dA;
  dec.d_env = dB * dA;
  dec.anc_state = 0;
  dec.dilation = Mat::Zero(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side));
  for (std::size_t b = 0; b < dB; ++b)
    for (std::size_t ap = 0; ap < dA; ++ap)
      for (std::size_t rp = 0; rp < dA; ++rp)
        dec.dilation.row(static_cast<Eigen::Index>(ap * dB * dA + b * dA + rp)) =
            U.row(static_cast<Eigen::Index>((b * dA + ap) * dA + rp));
  return {dec, decoding_fidelity(ch, dec)};
}

double decoding_fidelity(const ChannelDesc& ch, const ChannelDesc& decoder) {
  const std::size_t dA = ch.d_in;
  if (decoder.d_in != ch.d_out || decoder.d_out != dA) throw DimensionError("decoder does not match the channel");
  check_density_cap(ch.d_out * dA, "decoding_fidelity");
  Vec phi = max_entangled(dA);
  Mat rho = run_channel_on(ch, projector(phi), {dA, dA}, 0);
  rho = run_channel_on(decoder, rho, {ch.d_out, dA}, 0);
  return fidelity(phi, rho);
}

ChannelDesc commitment_channel(const CommitmentScheme& s) {
  const std::size_t dC = s.dC(), dR = s.dR();
  check_density_cap(2 * dC * 2 * dR, "commitment_channel");
  const Mat m[2] = {s.split(0), s.split(1)};
  const double h = 1.0 / std::sqrt(2.0);
  // Rows ((a_out, c), (x, r)).
  Mat v = Mat::Zero(static_cast<Eigen::Index>(4 * dC * dR), 2);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t c = 0; c < dC; ++c)
        for (std::size_t r = 0; r < dR; ++r) {
          const std::size_t out = (b ^ x) * dC + c;
          v(static_cast<Eigen::Index>(out * 2 * dR + x * dR + r), static_cast<Eigen::Index>(b)) = h * m[x](c, r);
        }
  return ChannelDesc::from_isometry(v, 2 * dC, 2 * dR);
}

double h_max_smoothed(const RVec& spectrum, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("smoothing epsilon must lie in [0, 1)");
  std::vector<double> ev(spectrum.data(), spectrum.data() + spectrum.size());
  for (double& x : ev) x = std::max(x, 0.0);
  std::sort(ev.begin(), ev.end());
  double dropped = 0.0;
  std::size_t first = 0;
  while (first + 1 < ev.size() && dropped + ev[first] <= epsilon) dropped += ev[first++];
  double s = 0.0;
  for (std::size_t i = first; i < ev.size(); ++i) s += std::sqrt(ev[i] / (1.0 - dropped));
  return 2.0 * std::log2(s);
}

EntropyReport entropies(const DensityOp& rho, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("smoothing epsilon must lie in [0, 1)");
  RVec ev = clamped_spectrum(rho.m);
  EntropyReport r;
  r.h_min = -std::log2(ev.maxCoeff());
  r.h_max = h_max_of(ev);
  r.h2_lower = -std::log2(ev.squaredNorm());
  r.smoothing = epsilon;
  r.h_max_smoothed = h_max_smoothed(ev, epsilon);
  return r;
}

double h2_conditional(const Mat& rho, const Dims& dims, const std::vector<std::size_t>& a) {
  std::vector<std::size_t> b;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (std::find(a.begin(), a.end(), k) == a.end()) b.push_back(k);
  if (b.empty()) return -std::log2((rho * rho).trace().real());
  Mat s = embed(inv_sqrt_psd(partial_trace(rho, dims, b)), dims, b);
  Mat x = s * rho;
  return -std::log2((x * x).trace().real());
}

DecouplingResult decoupling_experiment(const DensityOp& rho, unsigned s, std::size_t samples, Seed seed) {
  if (rho.dims.empty()) throw DimensionError("decoupling_experiment needs register dimensions");
  const std::size_t dA = rho.dims[0];
  const unsigned n = log2_exact(dA);
  if (s > n) throw InvalidArgument("cannot keep more qubits than A has");
  if (samples == 0) throw InvalidArgument("decoupling_experiment needs at least one sample");
  const std::size_t dB = rho.dim() / dA;
  check_density_cap(rho.dim(), "decoupling_experiment");
  const Dims ab = {dA, dB};
  const std::size_t dE = std::size_t{1} << (n - s), dC = dA / dE;
  const Mat rho_B = partial_trace(rho.m, ab, {1});

  DecouplingResult out;
  out.samples = samples;
  std::vector<double> lhs(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    Mat u = random_clifford(n, child_seed(seed, "clifford", i));
    Mat p = apply_local(u, rho.m, ab, {0});
    double total = 0.0;
    for (std::size_t y = 0; y < dE; ++y) {
      Mat m = -rho_B / double(dE);
      for (std::size_t c = 0; c < dC; ++c) {
        const auto off = static_cast<Eigen::Index>((y * dC + c) * dB);
        const auto db = static_cast<Eigen::Index>(dB);
        m += p.block(off, off, db, db);
      }
      total += trace_norm(m);
    }
    lhs[i] = total;
  }
  out.lhs_mean = mean_of(lhs);
  out.lhs_sigma = sigma_of(lhs, out.lhs_mean);

  // Choi state of the measurement channel on E A'.
  Mat omega = Mat::Zero(static_cast<Eigen::Index>(dE * dA), static_cast<Eigen::Index>(dE * dA));
  for (std::size_t y = 0; y < dE; ++y)
    for (std::size_t c = 0; c < dC; ++c) {
      const auto k = static_cast<Eigen::Index>(y * dA + y * dC + c);
      omega(k, k) = 1.0 / double(dA);
    }
  out.h2_omega = h2_conditional(omega, {dE, dA}, {1});
  out.h2_rho = h2_conditional(rho.m, ab, {0});
  out.rhs_bound = std::exp2(-0.5 * out.h2_omega - 0.5 * out.h2_rho);
  return out;
}

BipartiteState purify(const DensityOp& rho) {
  EigH e = eigh(rho.m);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = e.values.size() - 1; i >= 0; --i)
    if (e.values(i) > 1e-12) keep.push_back(i);
  const std::size_t dA = rho.dim(), dR = keep.size();
  Vec amp = Vec::Zero(static_cast<Eigen::Index>(dA * dR));
  double total = 0.0;
  for (std::size_t r = 0; r < dR; ++r) total += e.values(keep[r]);
  for (std::size_t r = 0; r < dR; ++r) {
    const double w = std::sqrt(e.values(keep[r]) / total);
    for (std::size_t a = 0; a < dA; ++a)
      amp(static_cast<Eigen::Index>(a * dR + r)) = w * e.vectors(static_cast<Eigen::Index>(a), keep[r]);
  }
  return BipartiteState(amp, dA, dR);
}

CompressionCodec compress(const DensityOp& rho, double delta, Seed seed, std::optional<unsigned> force_s) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  const std::size_t dA = rho.dim();
  const unsigned n = log2_exact(dA);
  CompressionCodec codec;
  codec.n = n;
  codec.delta = delta;
  const double eps2 = std::pow(delta / 40.0, 4);
  codec.h_max_smoothed = h_max_smoothed(clamped_spectrum(rho.m), eps2);
  if (force_s) {
    if (*force_s > n) throw InvalidArgument("forced s exceeds n");
    codec.s = *force_s;
  } else {
    const double rate = std::ceil(codec.h_max_smoothed + 8.0 * std::log2(4.0 / delta) - 1e-12);
    codec.s = static_cast<unsigned>(std::clamp(rate, 0.0, double(n)));
  }
  codec.nu = std::exp2(-0.5 * (double(codec.s) - codec.h_max_smoothed)) + 8.0 * eps2;
  codec.error_bound = std::min(1.0, 20.0 * std::pow(codec.nu, 0.25));

  const std::size_t dE = std::size_t{1} << (n - codec.s), dC = dA / dE, dF = dE;
  check_density_cap(dA * dE, "compress");
  BipartiteState pur = purify(rho);
  const std::size_t dR = pur.dB;
  const Mat rm = pur.matrix();  // dA x dR
  codec.clifford_seed = child_seed(seed, "clifford");
  const Mat w = random_clifford(n, codec.clifford_seed) * rm;

  std::size_t best = 0;
  double best_alpha = -1.0;
  for (std::size_t y = 0; y < dE; ++y) {
    const double alpha = w.middleRows(static_cast<Eigen::Index>(y * dC), static_cast<Eigen::Index>(dC)).squaredNorm();
    if (alpha > best_alpha + 1e-12) best_alpha = alpha, best = y;
  }
  codec.y_star = best;

  // Both states live on (E, R | E', ...) with B sides of dimension dE dA.
  const std::size_t side = dE * dA;
  Vec f = Vec::Zero(static_cast<Eigen::Index>(dE * dR * side));
  Vec g = Vec::Zero(f.size());
  const double norm = 1.0 / std::sqrt(double(dE));
  for (std::size_t e = 0; e < dE; ++e)
    for (std::size_t r = 0; r < dR; ++r) {
      const std::size_t left = (e * dR + r) * side;
      for (std::size_t a = 0; a < dA; ++a) f(static_cast<Eigen::Index>(left + e * dA + a)) = norm * rm(a, r);
      for (std::size_t c = 0; c < dC; ++c)
        g(static_cast<Eigen::Index>(left + (e * dC + c) * dF)) = w(e * dC + c, r);
    }
  UhlmannInstance x = UhlmannInstance::from_raw(BipartiteState(f, dE * dR, side), BipartiteState(g, dE * dR, side));
  PartialIsometry v = canonical_uhlmann(x);
  const Mat xi = unitary_completion(v).unitary;
  const Mat lambda = unitary_completion(PartialIsometry(v.w.adjoint())).unitary;

  ChannelDesc enc;
  enc.d_in = dA;
  enc.d_anc = dE;
  enc.d_out = dC;
  enc.d_env = dE * dF;
  enc.anc_state = best;
  enc.dilation = Mat::Zero(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side));
  ChannelDesc dec;
  dec.d_in = dC;
  dec.d_anc = dE * dF;
  dec.d_out = dA;
  dec.d_env = dE;
  dec.anc_state = best * dF;
  dec.dilation = Mat::Zero(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side));
  for (std::size_t c = 0; c < dC; ++c)
    for (std::size_t e = 0; e < dE; ++e)
      for (std::size_t fi = 0; fi < dF; ++fi) {
        const auto enc_row = static_cast<Eigen::Index>(c * dE * dF + e * dF + fi);
        const auto xi_row = static_cast<Eigen::Index>(e * dC * dF + c * dF + fi);
        for (std::size_t a = 0; a < dA; ++a) {
          for (std::size_t e2 = 0; e2 < dE; ++e2) {
            const auto col = static_cast<Eigen::Index>(a * dE + e2);
            const auto xcol = static_cast<Eigen::Index>(e2 * dA + a);
            enc.dilation(enc_row, col) = xi(xi_row, xcol);
          }
          for (std::size_t e2 = 0; e2 < dE; ++e2) {
            const auto row = static_cast<Eigen::Index>(a * dE + e2);
            const auto lrow = static_cast<Eigen::Index>(e2 * dA + a);
            dec.dilation(row, enc_row) = lambda(lrow, xi_row);
          }
        }
      }
  codec.E = enc;
  codec.D = dec;
  return codec;
}

CompressionCodec compress(const Circuit& c, unsigned n_out, double delta, Seed seed, std::optional<unsigned> force_s) {
  const unsigned n = c.n_qubits();
  if (n_out == 0 || n_out > n) throw InvalidArgument("n_out must lie in [1, n]");
  const std::size_t dA = std::size_t{1} << n_out;
  check_density_cap(dA, "compress");
  Vec psi = c.run();
  Dims dims = {dA, c.dim() / dA};
  return compress(DensityOp(reduced_state(psi, dims, {0}), {dA}), delta, seed, force_s);
}

double roundtrip(const CompressionCodec& codec, const BipartiteState& purification) {
  const std::size_t dA = purification.dA, dR = purification.dB;
  if (dA != codec.E.d_in) throw DimensionError("purification does not match the codec");
  check_density_cap(dA * dR, "roundtrip");
  Mat psi = projector(purification.amp);
  Mat out = run_channel_on(codec.E, psi, {dA, dR}, 0);
  out = run_channel_on(codec.D, out, {codec.E.d_out, dR}, 0);
  return trace_distance(psi, out);
}

OverlapEstimate haar_overlap(const ChannelDesc& E, const ChannelDesc& D, std::size_t samples, Seed seed) {
  if (D.d_in != E.d_out || D.d_out != E.d_in) throw DimensionError("codec channels do not compose");
  if (samples == 0) throw InvalidArgument("haar_overlap needs at least one sample");
  const std::size_t M = E.d_in;
  std::vector<double> vals(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(child_seed(seed, "haar", i));
    Vec theta = haar_state(M, rng);
    Mat out = run_channel(D, run_channel(E, projector(theta)));
    vals[i] = (theta.adjoint() * out * theta)(0, 0).real();
  }
  OverlapEstimate est;
  est.samples = samples;
  est.mean = mean_of(vals);
  est.sigma = sigma_of(vals, est.mean);
  est.bound = double(E.d_out) / double(M);
  return est;
}

json to_json(const EntropyReport& r) {
  return json{{"h_min", r.h_min},
              {"h_max", r.h_max},
              {"h2_lower", r.h2_lower},
              {"h_max_smoothed", r.h_max_smoothed},
              {"smoothing", r.smoothing}};
}

json to_json(const CompressionCodec& c) {
  return json{{"n", c.n},
              {"s", c.s},
              {"y_star", c.y_star},
              {"clifford_seed", c.clifford_seed},
              {"delta", c.delta},
              {"h_max_smoothed", c.h_max_smoothed},
              {"nu", c.nu},
              {"error_bound", c.error_bound},
              {"E", to_json(c.E)},
              {"D", to_json(c.D)}};
}

}  // namespace ulab
