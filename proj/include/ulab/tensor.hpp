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

// Register bookkeeping on dense vectors and matrices: Kronecker products,
// register permutations, partial traces and local operator application.

#ifndef ULAB_TENSOR_HPP
#define ULAB_TENSOR_HPP

#include <span>

#include "ulab/core.hpp"

namespace ulab {

Mat kron(const Mat& a, const Mat& b);
Vec kron(const Vec& a, const Vec& b);
Mat kron_all(std::span<const Mat> factors);
Vec kron_all(std::span<const Vec> factors);

/// Computational basis vector |index> in dimension d.
Vec basis_vector(std::size_t d, std::size_t index);

/// Reorders tensor legs. Output register j is input register perm[j].
Vec permute_registers(const Vec& psi, const Dims& dims, const std::vector<std::size_t>& perm);
Mat permute_registers(const Mat& op, const Dims& dims, const std::vector<std::size_t>& perm);

/// Dimensions after permute_registers.
Dims permuted_dims(const Dims& dims, const std::vector<std::size_t>& perm);

/// Partial trace keeping the listed registers (kept in ascending order).
Mat partial_trace(const Mat& rho, const Dims& dims, std::vector<std::size_t> keep);

/// Reduced density matrix of a pure state on the listed registers.
Mat reduced_state(const Vec& psi, const Dims& dims, std::vector<std::size_t> keep);

/// Applies `op` to the listed registers (in the listed order) of a pure state.
Vec apply_local(const Mat& op, const Vec& psi, const Dims& dims, const std::vector<std::size_t>& targets);

/// Conjugates a density matrix by `op` acting on the listed registers.
Mat apply_local(const Mat& op, const Mat& rho, const Dims& dims, const std::vector<std::size_t>& targets);

/// Applies a (possibly rectangular) map on one register. The register is
/// replaced in place by the registers `out_dims`; `new_dims` receives the result.
Vec apply_isometry(const Mat& v, const Vec& psi, const Dims& dims, std::size_t target, const Dims& out_dims,
                   Dims* new_dims = nullptr);
Mat apply_isometry(const Mat& v, const Mat& rho, const Dims& dims, std::size_t target, const Dims& out_dims,
                   Dims* new_dims = nullptr);

/// Embeds `op` on the listed registers into the full space (identity elsewhere).
Mat embed(const Mat& op, const Dims& dims, const std::vector<std::size_t>& targets);

/// Matricizes a pure state into (kept registers) x (remaining registers).
Mat matricize(const Vec& psi, const Dims& dims, const std::vector<std::size_t>& rows);

}  // namespace ulab

#endif  // ULAB_TENSOR_HPP
