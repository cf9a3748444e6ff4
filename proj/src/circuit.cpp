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

#include "ulab/circuit.hpp"

#include <cmath>

#include "ulab/kernels.hpp"

namespace ulab {
namespace {

constexpr std::array<std::string_view, 11> kNames = {"H", "T", "Tdg", "S", "Sdg", "X", "Y", "Z", "CNOT", "CZ", "SWAP"};

struct GateTable {
  std::array<std::array<cplx, 16>, 11> m{};
  GateTable() {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i(0, 1);
    const cplx w = std::polar(1.0, M_PI / 4);
    auto set2 = [&](GateKind k, cplx a, cplx b, cplx c, cplx d) { m[static_cast<int>(k)] = {a, b, c, d}; };
    set2(GateKind::H, r, r, r, -r);
    set2(GateKind::T, 1, 0, 0, w);
    set2(GateKind::Tdg, 1, 0, 0, std::conj(w));
    set2(GateKind::S, 1, 0, 0, i);
    set2(GateKind::Sdg, 1, 0, 0, -i);
    set2(GateKind::X, 0, 1, 1, 0);
    set2(GateKind::Y, 0, -i, i, 0);
    set2(GateKind::Z, 1, 0, 0, -1);
    auto& cx = m[static_cast<int>(GateKind::CNOT)];
    cx[0] = cx[5] = cx[11] = cx[14] = 1;
    auto& cz = m[static_cast<int>(GateKind::CZ)];
    cz[0] = cz[5] = cz[10] = 1;
    cz[15] = -1;
    auto& sw = m[static_cast<int>(GateKind::SWAP)];
    sw[0] = sw[6] = sw[9] = sw[15] = 1;
  }
};

const GateTable& table() {
  static const GateTable t;
  return t;
}

}  // namespace

std::string_view gate_name(GateKind k) { return kNames[static_cast<int>(k)]; }

GateKind parse_gate(std::string_view name) {
  for (std::size_t k = 0; k < kNames.size(); ++k)
    if (kNames[k] == name) return static_cast<GateKind>(k);
  if (name == "CX") return GateKind::CNOT;
  throw InvalidArgument("unknown gate '" + std::string(name) + "'");
}

unsigned gate_arity(GateKind k) { return k >= GateKind::CNOT ? 2 : 1; }

Mat gate_matrix(GateKind k) {
  const unsigned d = gate_arity(k) == 1 ? 2 : 4;
  Mat out(d, d);
  const auto& e = table().m[static_cast<int>(k)];
  for (unsigned r = 0; r < d; ++r)
    for (unsigned c = 0; c < d; ++c) out(r, c) = e[r * d + c];
  return out;
}

Circuit& Circuit::add(GateKind k, unsigned q0) {
  if (gate_arity(k) != 1) throw InvalidArgument(std::string(gate_name(k)) + " needs two qubits");
  if (q0 >= n_) throw DimensionError("gate target " + std::to_string(q0) + " out of range");
  gates_.push_back({k, {q0, 0}});
  return *this;
}

Circuit& Circuit::add(GateKind k, unsigned q0, unsigned q1) {
  if (gate_arity(k) != 2) throw InvalidArgument(std::string(gate_name(k)) + " takes one qubit");
  if (q0 >= n_ || q1 >= n_) throw DimensionError("gate target out of range");
  if (q0 == q1) throw InvalidArgument("two-qubit gate needs distinct targets");
  gates_.push_back({k, {q0, q1}});
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_ != n_) throw DimensionError("cannot append circuits of different width");
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  return *this;
}

void Circuit::apply_inplace(Vec& state) const {
  if (static_cast<std::size_t>(state.size()) != dim())
    throw DimensionError("state has " + std::to_string(state.size()) + " amplitudes, circuit expects " +
                         std::to_string(dim()));
  auto* data = state.data();
  for (const auto& g : gates_) {
    const auto* m = table().m[static_cast<int>(g.kind)].data();
    if (gate_arity(g.kind) == 1)
      kernels::apply_1q(data, n_, g.q[0], m);
    else
      kernels::apply_2q(data, n_, g.q[0], g.q[1], m);
  }
}

Vec Circuit::apply(const Vec& state) const {
  Vec out = state;
  apply_inplace(out);
  return out;
}

Vec Circuit::run(std::size_t index) const {
  check_pure_cap(dim(), "circuit state");
  Vec v = Vec::Zero(static_cast<Eigen::Index>(dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  apply_inplace(v);
  return v;
}

Mat Circuit::unitary() const {
  check_density_cap(dim(), "circuit unitary");
  Mat u(dim(), dim());
  for (std::size_t c = 0; c < dim(); ++c) u.col(c) = run(c);
  return u;
}

Circuit Circuit::inverse() const {
  Circuit out(n_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::T: g.kind = GateKind::Tdg; break;
      case GateKind::Tdg: g.kind = GateKind::T; break;
      case GateKind::S: g.kind = GateKind::Sdg; break;
      case GateKind::Sdg: g.kind = GateKind::S; break;
      default: break;
    }
    out.gates_.push_back(g);
  }
  return out;
}

Circuit Circuit::tensor(const Circuit& a, const Circuit& b) {
  Circuit out = a.widened(a.n_ + b.n_, 0);
  Circuit tail = b.widened(a.n_ + b.n_, a.n_);
  out.gates_.insert(out.gates_.end(), tail.gates_.begin(), tail.gates_.end());
  return out;
}

Circuit Circuit::widened(unsigned n_total, unsigned offset) const {
  if (n_ + offset > n_total) throw DimensionError("widened circuit does not fit");
  Circuit out(n_total);
  for (auto g : gates_) {
    g.q[0] += offset;
    if (gate_arity(g.kind) == 2) g.q[1] += offset;
    out.gates_.push_back(g);
  }
  return out;
}

}  // namespace ulab
