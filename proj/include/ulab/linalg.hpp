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

#ifndef ULAB_LINALG_HPP
#define ULAB_LINALG_HPP

#include "ulab/core.hpp"

namespace ulab {

/// Band below the cutoff inside which singular values count as "not above".
inline constexpr double kCutoffBand = 1e-12;

Mat outer(const Vec& a, const Vec& b);
inline Mat projector(const Vec& v) { return outer(v, v); }

struct EigH {
  RVec values;  // ascending
  Mat vectors;
};
EigH eigh(const Mat& h);
RVec eigvalsh(const Mat& h);
RVec singular_values(const Mat& m);

/// Square root of a PSD matrix; negative eigenvalues are clamped to zero.
Mat sqrtm_psd(const Mat& rho);
/// f applied to a Hermitian matrix through its eigendecomposition.
Mat hermitian_function(const Mat& h, double (*f)(double));
/// exp(i * theta * H) for Hermitian H.
Mat expi_hermitian(const Mat& h, double theta);

/// Squared fidelity (sum of singular values of sqrt(rho) sqrt(sigma))^2, clamped to [0,1].
double fidelity(const Mat& rho, const Mat& sigma);
/// <psi|sigma|psi>.
double fidelity(const Vec& psi, const Mat& sigma);
double fidelity(const Vec& psi, const Vec& phi);
double trace_distance(const Mat& rho, const Mat& sigma);
double trace_distance(const Vec& psi, const Vec& phi);
double trace_norm(const Mat& m);
double op_norm(const Mat& m);

/// U sgn_eta(S) V^dagger for M = U S V^dagger.
Mat sgn_eta(const Mat& m, double eta);
/// Polar-style completion U_f V_f^dagger of a partial isometry.
Mat polar_completion(const Mat& w);
/// Orthonormal basis of the orthogonal complement of the column span.
Mat complement_basis(const Mat& cols, double tol = 1e-10);
/// Completes an isometry (orthonormal columns) to a unitary by appending columns.
Mat complete_isometry(const Mat& v);

double unitarity_error(const Mat& u);
bool is_unitary(const Mat& u, double tol = 1e-10);
double hermiticity_error(const Mat& m);
std::size_t numerical_rank(const Mat& m, double tol = 1e-10);

/// Throws NumericalError unless rho is Hermitian, PSD and unit trace within tol.
void check_density(const Mat& rho, double tol = 1e-10);
/// Projector conditioned state Lambda rho Lambda / Tr(Lambda rho).
Mat condition(const Mat& rho, const Mat& lambda);

}  // namespace ulab

#endif  // ULAB_LINALG_HPP
