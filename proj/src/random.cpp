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

#include "ulab/random.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace ulab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Seed child_seed(Seed parent, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(parent ^ h) + index);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t r = eng_();
    if (r < limit) return r % n;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

cplx Rng::cnormal() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im) / std::sqrt(2.0);
}

Vec haar_state(std::size_t d, Rng& rng) {
  Vec v(static_cast<Eigen::Index>(d));
  for (auto& z : v) z = rng.cnormal();
  return v / v.norm();
}

Vec real_random_state(std::size_t d, Rng& rng) {
  Vec v(static_cast<Eigen::Index>(d));
  for (auto& z : v) z = rng.normal();
  return v / v.norm();
}

Mat haar_unitary(std::size_t d, Rng& rng) {
  Mat g(d, d);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.cnormal();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const cplx rii = r(i, i);
    const double a = std::abs(rii);
    if (a > 0) q.col(i) *= rii / a;
  }
  return q;
}

Mat random_density(std::size_t d, std::size_t rank, Rng& rng) {
  Mat g(d, rank);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.cnormal();
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Circuit random_circuit(unsigned n, std::size_t gates, Rng& rng) {
  Circuit c(n);
  for (std::size_t k = 0; k < gates; ++k) {
    const auto kind = static_cast<GateKind>(rng.below(n >= 2 ? 11 : 8));
    if (gate_arity(kind) == 1) {
      c.add(kind, static_cast<unsigned>(rng.below(n)));
    } else {
      const auto a = static_cast<unsigned>(rng.below(n));
      auto b = static_cast<unsigned>(rng.below(n - 1));
      if (b >= a) ++b;
      c.add(kind, a, b);
    }
  }
  return c;
}

namespace {

using Bits = std::vector<std::uint8_t>;

// Symplectic form on (x|z) vectors of length 2n.
int omega(const Bits& a, const Bits& b, unsigned n) {
  int s = 0;
  for (unsigned i = 0; i < n; ++i) s ^= (a[i] & b[n + i]) ^ (a[n + i] & b[i]);
  return s;
}

Bits combo(const std::vector<Bits>& basis, Rng& rng, std::size_t len) {
  Bits v(len, 0);
  for (const auto& b : basis)
    if (rng.coin())
      for (std::size_t i = 0; i < len; ++i) v[i] ^= b[i];
  return v;
}

bool is_zero(const Bits& v) {
  for (auto b : v)
    if (b) return false;
  return true;
}

// Row-reduces a list of vectors and returns a basis of their span.
std::vector<Bits> span_basis(std::vector<Bits> vs) {
  std::vector<Bits> out;
  const std::size_t len = vs.empty() ? 0 : vs[0].size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < len && row < vs.size(); ++col) {
    std::size_t piv = row;
    while (piv < vs.size() && !vs[piv][col]) ++piv;
    if (piv == vs.size()) continue;
    std::swap(vs[row], vs[piv]);
    for (std::size_t r = 0; r < vs.size(); ++r)
      if (r != row && vs[r][col])
        for (std::size_t i = 0; i < len; ++i) vs[r][i] ^= vs[row][i];
    ++row;
  }
  for (std::size_t r = 0; r < row; ++r) out.push_back(vs[r]);
  return out;
}

}  // namespace

CliffordTableau random_clifford_tableau(unsigned n, Rng& rng) {
  const std::size_t len = 2 * static_cast<std::size_t>(n);
  std::vector<Bits> basis;
  for (std::size_t i = 0; i < len; ++i) {
    Bits e(len, 0);
    e[i] = 1;
    basis.push_back(e);
  }
  CliffordTableau t;
  t.n = n;
  t.x.assign(len, Bits(n, 0));
  t.z.assign(len, Bits(n, 0));
  t.sign.assign(len, 0);
  for (unsigned j = 0; j < n; ++j) {
    Bits v;
    do v = combo(basis, rng, len);
    while (is_zero(v));
    Bits w;
    do w = combo(basis, rng, len);
    while (omega(v, w, n) != 1);
    for (unsigned i = 0; i < n; ++i) {
      t.x[j][i] = v[i];
      t.z[j][i] = v[n + i];
      t.x[n + j][i] = w[i];
      t.z[n + j][i] = w[n + i];
    }
    // Project the remaining basis onto the symplectic complement of {v, w}.
    std::vector<Bits> rest;
    for (auto b : basis) {
      const int bw = omega(b, w, n);
      const int bv = omega(b, v, n);
      for (std::size_t i = 0; i < len; ++i) b[i] ^= static_cast<std::uint8_t>((bw & v[i]) ^ (bv & w[i]));
      rest.push_back(b);
    }
    basis = span_basis(rest);
  }
  for (auto& s : t.sign) s = rng.coin() ? 1 : 0;
  return t;
}

Mat pauli_matrix(const Bits& x, const Bits& z, bool sign) {
  const std::size_t n = x.size();
  const std::size_t d = std::size_t{1} << n;
  std::size_t xm = 0, zm = 0;
  int y = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    if (x[q]) xm |= bit;
    if (z[q]) zm |= bit;
    y += x[q] & z[q];
  }
  static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  const cplx phase = ipow[y % 4] * (sign ? -1.0 : 1.0);
  Mat p = Mat::Zero(d, d);
  // X^x Z^z |k> = (-1)^{z.k} |k ^ x>
  for (std::size_t k = 0; k < d; ++k) {
    const int par = __builtin_popcountll(k & zm) & 1;
    p(k ^ xm, k) = phase * (par ? -1.0 : 1.0);
  }
  return p;
}

Mat clifford_unitary(const CliffordTableau& t) {
  const unsigned n = t.n;
  const std::size_t d = std::size_t{1} << n;
  std::vector<Mat> xs, zs;
  for (unsigned j = 0; j < n; ++j) {
    xs.push_back(pauli_matrix(t.x[j], t.z[j], t.sign[j]));
    zs.push_back(pauli_matrix(t.x[n + j], t.z[n + j], t.sign[n + j]));
  }
  // U|0> spans the joint +1 eigenspace of the Z images.
  Mat proj = Mat::Identity(d, d);
  for (const auto& zj : zs) proj = proj * (Mat::Identity(d, d) + zj) * 0.5;
  Vec psi0;
  for (std::size_t k = 0; k < d; ++k) {
    Vec c = proj.col(k);
    if (c.norm() > 0.5 / std::sqrt(static_cast<double>(d))) {
      psi0 = c / c.norm();
      break;
    }
  }
  for (Eigen::Index i = 0; i < psi0.size(); ++i)
    if (std::abs(psi0(i)) > 1e-9) {
      psi0 *= std::conj(psi0(i)) / std::abs(psi0(i));
      break;
    }
  Mat u(d, d);
  for (std::size_t col = 0; col < d; ++col) {
    Vec v = psi0;
    for (unsigned j = 0; j < n; ++j)
      if ((col >> (n - 1 - j)) & 1) v = xs[j] * v;
    u.col(col) = v;
  }
  return u;
}

Mat random_clifford(unsigned n, Seed seed) {
  Rng rng(seed);
  return random_clifford(n, rng);
}

}  // namespace ulab
