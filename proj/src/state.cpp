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

#include "ulab/state.hpp"

#include <algorithm>
#include <cmath>

#include "ulab/linalg.hpp"
#include "ulab/tensor.hpp"

namespace ulab {

BipartiteState::BipartiteState(Vec amplitudes, std::size_t a, std::size_t b)
    : amp(std::move(amplitudes)), dA(a), dB(b) {
  if (dA == 0 || dB == 0) throw DimensionError("register dimensions must be positive");
  if (static_cast<std::size_t>(amp.size()) != dA * dB)
    throw DimensionError("state length " + std::to_string(amp.size()) + " does not equal dA*dB = " +
                         std::to_string(dA * dB));
  check_pure_cap(dA * dB, "bipartite state");
  if (std::abs(amp.norm() - 1.0) > 1e-10) throw NumericalError("state is not normalized");
}

Mat BipartiteState::matrix() const {
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(amp.data(), dA, dB);
}

Mat BipartiteState::rho_A() const {
  Mat m = matrix();
  return m * m.adjoint();
}

Mat BipartiteState::rho_B() const {
  Mat m = matrix();
  return (m.adjoint() * m).transpose();
}

DensityOp::DensityOp(Mat matrix, Dims d, double tol) : m(std::move(matrix)), dims(std::move(d)) {
  if (dims.empty()) dims = {static_cast<std::size_t>(m.rows())};
  if (static_cast<std::size_t>(m.rows()) != product(dims)) throw DimensionError("density dims do not match matrix");
  check_density(m, tol);
}

DensityOp DensityOp::pure(const Vec& psi, Dims dims) { return DensityOp(projector(psi), std::move(dims)); }

DensityOp DensityOp::maximally_mixed(std::size_t d) {
  return DensityOp(Mat::Identity(d, d) / static_cast<double>(d), {d});
}

DensityOp DensityOp::reduce(std::vector<std::size_t> keep) const {
  std::sort(keep.begin(), keep.end());
  Dims kd;
  for (auto k : keep) {
    if (k >= dims.size()) throw DimensionError("register index " + std::to_string(k) + " out of range");
    kd.push_back(dims[k]);
  }
  DensityOp out;
  out.m = partial_trace(m, dims, keep);
  out.dims = kd;
  return out;
}

}  // namespace ulab
