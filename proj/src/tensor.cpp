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

#include "ulab/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace ulab {
namespace {

void check_perm(const Dims& dims, const std::vector<std::size_t>& perm) {
  if (perm.size() != dims.size()) throw DimensionError("permutation length does not match register count");
  std::vector<bool> seen(dims.size(), false);
  for (auto p : perm) {
    if (p >= dims.size() || seen[p]) throw DimensionError("invalid register permutation");
    seen[p] = true;
  }
}

// map[i] = index of input basis element i after the permutation.
std::vector<std::size_t> index_map(const Dims& dims, const std::vector<std::size_t>& perm) {
  check_perm(dims, perm);
  const std::size_t r = dims.size();
  const std::size_t total = product(dims);
  Dims out_dims = permuted_dims(dims, perm);
  std::vector<std::size_t> out_stride(r, 1);
  for (std::size_t j = r; j-- > 1;) out_stride[j - 1] = out_stride[j] * out_dims[j];
  std::vector<std::size_t> in_to_out_stride(r);
  for (std::size_t j = 0; j < r; ++j) in_to_out_stride[perm[j]] = out_stride[j];

  std::vector<std::size_t> map(total);
  std::vector<std::size_t> digit(r, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < total; ++i) {
    map[i] = pos;
    for (std::size_t k = r; k-- > 0;) {
      if (++digit[k] < dims[k]) {
        pos += in_to_out_stride[k];
        break;
      }
      pos -= (dims[k] - 1) * in_to_out_stride[k];
      digit[k] = 0;
    }
  }
  return map;
}

std::vector<std::size_t> front_perm(std::size_t r, const std::vector<std::size_t>& front) {
  std::vector<std::size_t> perm(front);
  std::vector<bool> used(r, false);
  for (auto f : front) {
    if (f >= r) throw DimensionError("register index " + std::to_string(f) + " out of range");
    if (used[f]) throw DimensionError("duplicate register index");
    used[f] = true;
  }
  for (std::size_t k = 0; k < r; ++k)
    if (!used[k]) perm.push_back(k);
  return perm;
}

std::vector<std::size_t> inverse_perm(const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) inv[perm[j]] = j;
  return inv;
}

}  // namespace

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Mat kron_all(std::span<const Mat> factors) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

Vec kron_all(std::span<const Vec> factors) {
  Vec out = Vec::Ones(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

Vec basis_vector(std::size_t d, std::size_t index) {
  if (index >= d) throw DimensionError("basis index out of range");
  Vec v = Vec::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

Dims permuted_dims(const Dims& dims, const std::vector<std::size_t>& perm) {
  Dims out(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) out[j] = dims.at(perm[j]);
  return out;
}

Vec permute_registers(const Vec& psi, const Dims& dims, const std::vector<std::size_t>& perm) {
  if (static_cast<std::size_t>(psi.size()) != product(dims)) throw DimensionError("state size does not match dims");
  auto map = index_map(dims, perm);
  Vec out(psi.size());
  for (std::size_t i = 0; i < map.size(); ++i) out(map[i]) = psi(i);
  return out;
}

Mat permute_registers(const Mat& op, const Dims& dims, const std::vector<std::size_t>& perm) {
  if (static_cast<std::size_t>(op.rows()) != product(dims) || op.rows() != op.cols())
    throw DimensionError("operator size does not match dims");
  auto map = index_map(dims, perm);
  Mat out(op.rows(), op.cols());
  for (std::size_t j = 0; j < map.size(); ++j)
    for (std::size_t i = 0; i < map.size(); ++i) out(map[i], map[j]) = op(i, j);
  return out;
}

Mat matricize(const Vec& psi, const Dims& dims, const std::vector<std::size_t>& rows) {
  auto perm = front_perm(dims.size(), rows);
  Vec v = permute_registers(psi, dims, perm);
  std::size_t dr = 1;
  for (auto r : rows) dr *= dims[r];
  const std::size_t dc = product(dims) / dr;
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(v.data(), dr, dc);
}

Mat partial_trace(const Mat& rho, const Dims& dims, std::vector<std::size_t> keep) {
  if (static_cast<std::size_t>(rho.rows()) != product(dims) || rho.rows() != rho.cols())
    throw DimensionError("operator size does not match dims");
  std::sort(keep.begin(), keep.end());
  auto perm = front_perm(dims.size(), keep);
  auto map = index_map(dims, perm);
  std::vector<std::size_t> inv(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) inv[map[i]] = i;
  std::size_t dk = 1;
  for (auto k : keep) dk *= dims[k];
  const std::size_t dt = map.size() / dk;
  Mat out = Mat::Zero(dk, dk);
  for (std::size_t b = 0; b < dk; ++b)
    for (std::size_t a = 0; a < dk; ++a) {
      cplx s = 0;
      for (std::size_t t = 0; t < dt; ++t) s += rho(inv[a * dt + t], inv[b * dt + t]);
      out(a, b) = s;
    }
  return out;
}

Mat reduced_state(const Vec& psi, const Dims& dims, std::vector<std::size_t> keep) {
  std::sort(keep.begin(), keep.end());
  Mat m = matricize(psi, dims, keep);
  return m * m.adjoint();
}

namespace {

// Shared core for local application: moves `targets` to the front, multiplies
// the leading block by `op` (possibly rectangular), and restores the order with
// the new registers `out_dims` in place of the targets.
Vec apply_front(const Mat& op, const Vec& psi, const Dims& dims, const std::vector<std::size_t>& targets,
                const Dims& out_dims, Dims* new_dims) {
  Mat m = matricize(psi, dims, targets);
  if (op.cols() != m.rows()) throw DimensionError("operator does not match target registers");
  Mat r = op * m;
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor rr = r;
  Vec v = Eigen::Map<const Vec>(rr.data(), rr.size());

  auto perm = front_perm(dims.size(), targets);
  Dims front_dims = out_dims;
  std::vector<std::size_t> rest(perm.begin() + static_cast<std::ptrdiff_t>(targets.size()), perm.end());
  for (auto k : rest) front_dims.push_back(dims[k]);

  // Build the final layout: registers of `dims`, with the block of targets
  // replaced by `out_dims` at the position of the first target.
  std::vector<std::size_t> order;  // order[j] = index into front_dims
  Dims final_dims;
  const std::size_t first = targets.empty() ? dims.size() : *std::min_element(targets.begin(), targets.end());
  std::size_t rest_pos = out_dims.size();
  bool placed = false;
  for (std::size_t k = 0; k <= dims.size(); ++k) {
    if (!placed && k == first) {
      for (std::size_t j = 0; j < out_dims.size(); ++j) {
        order.push_back(j);
        final_dims.push_back(out_dims[j]);
      }
      placed = true;
    }
    if (k == dims.size()) break;
    if (std::find(targets.begin(), targets.end(), k) != targets.end()) continue;
    order.push_back(rest_pos);
    final_dims.push_back(front_dims[rest_pos]);
    ++rest_pos;
  }
  if (new_dims) *new_dims = final_dims;
  return permute_registers(v, front_dims, order);
}

}  // namespace

Vec apply_local(const Mat& op, const Vec& psi, const Dims& dims, const std::vector<std::size_t>& targets) {
  if (op.rows() != op.cols()) throw DimensionError("apply_local expects a square operator");
  if (static_cast<std::size_t>(psi.size()) != product(dims)) throw DimensionError("state size does not match dims");
  auto perm = front_perm(dims.size(), targets);
  Vec v = permute_registers(psi, dims, perm);
  std::size_t dT = 1;
  for (auto t : targets) dT *= dims[t];
  if (static_cast<std::size_t>(op.cols()) != dT) throw DimensionError("operator does not match target registers");
  const auto dR = static_cast<Eigen::Index>(product(dims) / dT);
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor> m(v.data(), static_cast<Eigen::Index>(dT), dR);
  RowMajor r = op * m;
  m = r;
  return permute_registers(v, permuted_dims(dims, perm), inverse_perm(perm));
}

Vec apply_isometry(const Mat& v, const Vec& psi, const Dims& dims, std::size_t target, const Dims& out_dims,
                   Dims* new_dims) {
  if (static_cast<std::size_t>(v.rows()) != product(out_dims)) throw DimensionError("isometry output dims mismatch");
  return apply_front(v, psi, dims, {target}, out_dims, new_dims);
}

namespace {

Mat conj_front(const Mat& op, const Mat& rho, std::size_t dT, std::size_t dR) {
  const auto dOut = static_cast<std::size_t>(op.rows());
  Mat left = Mat::Zero(dOut * dR, rho.cols());
  for (std::size_t a = 0; a < dOut; ++a)
    for (std::size_t b = 0; b < dT; ++b) {
      const cplx c = op(a, b);
      if (c == cplx(0)) continue;
      left.middleRows(a * dR, dR) += c * rho.middleRows(b * dR, dR);
    }
  Mat out = Mat::Zero(dOut * dR, dOut * dR);
  for (std::size_t a = 0; a < dOut; ++a)
    for (std::size_t b = 0; b < dT; ++b) {
      const cplx c = std::conj(op(a, b));
      if (c == cplx(0)) continue;
      out.middleCols(a * dR, dR) += c * left.middleCols(b * dR, dR);
    }
  return out;
}

}  // namespace

Mat apply_local(const Mat& op, const Mat& rho, const Dims& dims, const std::vector<std::size_t>& targets) {
  if (op.rows() != op.cols()) throw DimensionError("apply_local expects a square operator");
  auto perm = front_perm(dims.size(), targets);
  Mat p = permute_registers(rho, dims, perm);
  std::size_t dT = 1;
  for (auto t : targets) dT *= dims[t];
  if (static_cast<std::size_t>(op.cols()) != dT) throw DimensionError("operator does not match target registers");
  const std::size_t dR = product(dims) / dT;
  Mat q = conj_front(op, p, dT, dR);
  return permute_registers(q, permuted_dims(dims, perm), inverse_perm(perm));
}

Mat apply_isometry(const Mat& v, const Mat& rho, const Dims& dims, std::size_t target, const Dims& out_dims,
                   Dims* new_dims) {
  if (static_cast<std::size_t>(v.rows()) != product(out_dims)) throw DimensionError("isometry output dims mismatch");
  auto perm = front_perm(dims.size(), {target});
  Mat p = permute_registers(rho, dims, perm);
  const std::size_t dT = dims.at(target);
  if (static_cast<std::size_t>(v.cols()) != dT) throw DimensionError("isometry does not match target register");
  const std::size_t dR = product(dims) / dT;
  Mat q = conj_front(v, p, dT, dR);
  // q is laid out as (out_dims..., remaining registers in order).
  Dims front_dims = out_dims;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (k != target) front_dims.push_back(dims[k]);
  std::vector<std::size_t> order;
  Dims final_dims;
  std::size_t rest = out_dims.size();
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (k == target) {
      for (std::size_t j = 0; j < out_dims.size(); ++j) {
        order.push_back(j);
        final_dims.push_back(out_dims[j]);
      }
    } else {
      order.push_back(rest);
      final_dims.push_back(front_dims[rest]);
      ++rest;
    }
  }
  if (new_dims) *new_dims = final_dims;
  return permute_registers(q, front_dims, order);
}

Mat embed(const Mat& op, const Dims& dims, const std::vector<std::size_t>& targets) {
  auto perm = front_perm(dims.size(), targets);
  std::size_t dT = 1;
  for (auto t : targets) dT *= dims[t];
  if (static_cast<std::size_t>(op.rows()) != dT || op.rows() != op.cols())
    throw DimensionError("operator does not match target registers");
  Mat full = kron(op, Mat::Identity(product(dims) / dT, product(dims) / dT));
  return permute_registers(full, permuted_dims(dims, perm), inverse_perm(perm));
}

}  // namespace ulab
