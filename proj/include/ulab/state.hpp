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

#ifndef ULAB_STATE_HPP
#define ULAB_STATE_HPP

#include "ulab/core.hpp"

namespace ulab {

/// Pure state on A (x) B.
struct BipartiteState {
  Vec amp;
  std::size_t dA = 1;
  std::size_t dB = 1;

  BipartiteState() = default;
  /// Validates the split and the normalization.
  BipartiteState(Vec amplitudes, std::size_t dA, std::size_t dB);

  Dims dims() const { return {dA, dB}; }
  /// Reduced state on A.
  Mat rho_A() const;
  /// Reduced state on B.
  Mat rho_B() const;
  /// Amplitudes as a dA x dB matrix.
  Mat matrix() const;
};

/// Mixed state with a register split.
struct DensityOp {
  Mat m;
  Dims dims;

  DensityOp() = default;
  /// Validates shape, Hermiticity, positivity and trace.
  DensityOp(Mat matrix, Dims dims, double tol = 1e-10);
  static DensityOp pure(const Vec& psi, Dims dims);
  static DensityOp maximally_mixed(std::size_t d);

  std::size_t dim() const { return static_cast<std::size_t>(m.rows()); }
  DensityOp reduce(std::vector<std::size_t> keep) const;
};

}  // namespace ulab

#endif  // ULAB_STATE_HPP
