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

#include "ulab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace ulab {
namespace {

struct Svd {
  Mat u;
  RVec s;
  Mat v;
};

Svd svd_full(const Mat& m) {
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  // BDCSVD can lose orthogonality on clustered spectra; Jacobi does not.
  auto drift = [](const Mat& u) { return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff(); };
  // Written so that NaN output also takes the fallback.
  if (!(drift(out.u) <= 1e-11 && drift(out.v) <= 1e-11 && out.s.allFinite())) {
    Eigen::JacobiSVD<Mat> jac(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out = {jac.matrixU(), jac.singularValues(), jac.matrixV()};
    if (!(out.u.allFinite() && out.v.allFinite() && out.s.allFinite())) throw NumericalError("SVD produced non-finite values");
  }
  return out;
}

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

Mat outer(const Vec& a, const Vec& b) { return a * b.adjoint(); }

EigH eigh(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h));
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

RVec eigvalsh(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(h), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition did not converge");
  return es.eigenvalues();
}

RVec singular_values(const Mat& m) {
  Eigen::BDCSVD<Mat> svd(m);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  RVec s = svd.singularValues();
  // Values-only BDCSVD occasionally misplaces clustered values; the
  // Frobenius identity catches that cheaply.
  const double fro = m.squaredNorm();
  if (!(std::abs(s.squaredNorm() - fro) <= 1e-10 * std::max(1.0, fro))) s = Eigen::JacobiSVD<Mat>(m).singularValues();
  if (!s.allFinite()) throw NumericalError("SVD produced non-finite values");
  return s;
}

Mat hermitian_function(const Mat& h, double (*f)(double)) {
  auto e = eigh(h);
  RVec fv = e.values.unaryExpr(f);
  return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

Mat sqrtm_psd(const Mat& rho) {
  auto e = eigh(rho);
  // Eigenvalues inside the rounding band of the decomposition are zero; a
  // 1e-17 artefact would otherwise contribute 3e-9 after the square root.
  const double top = e.values.size() ? std::max(0.0, e.values.maxCoeff()) : 0.0;
  const double band = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(rho.rows()) * top;
  RVec s = e.values.unaryExpr([band](double x) { return x > band ? std::sqrt(x) : 0.0; });
  return e.vectors * s.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

Mat expi_hermitian(const Mat& h, double theta) {
  auto e = eigh(h);
  Vec ph(e.values.size());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, theta * e.values(i));
  return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

double fidelity(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw DimensionError("fidelity: dimension mismatch");
  const double tol = 1e-8;
  if (eigvalsh(rho).minCoeff() < -tol || eigvalsh(sigma).minCoeff() < -tol)
    throw NumericalError("fidelity: input is not positive semidefinite");
  const double s = singular_values(sqrtm_psd(rho) * sqrtm_psd(sigma)).sum();
  return std::clamp(s * s, 0.0, 1.0);
}

double fidelity(const Vec& psi, const Mat& sigma) {
  if (psi.size() != sigma.rows()) throw DimensionError("fidelity: dimension mismatch");
  return std::clamp(psi.dot(sigma * psi).real(), 0.0, 1.0);
}

double fidelity(const Vec& psi, const Vec& phi) {
  if (psi.size() != phi.size()) throw DimensionError("fidelity: dimension mismatch");
  return std::clamp(std::norm(psi.dot(phi)), 0.0, 1.0);
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimensionError("trace distance: dimension mismatch");
  return std::clamp(0.5 * eigvalsh(rho - sigma).cwiseAbs().sum(), 0.0, 1.0);
}

double trace_distance(const Vec& psi, const Vec& phi) {
  const double f = fidelity(psi, phi);
  return std::sqrt(std::max(0.0, 1.0 - f));
}

double trace_norm(const Mat& m) { return singular_values(m).sum(); }

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).maxCoeff();
}

Mat sgn_eta(const Mat& m, double eta) {
  if (!m.allFinite()) throw NumericalError("sgn_eta: non-finite entries");
  auto s = svd_full(m);
  const Eigen::Index r = std::min(m.rows(), m.cols());
  Mat out = Mat::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < r; ++i)
    if (s.s(i) > eta + kCutoffBand) out += s.u.col(i) * s.v.col(i).adjoint();
  return out;
}

Mat polar_completion(const Mat& w) {
  if (w.rows() != w.cols()) throw DimensionError("polar completion needs a square matrix");
  auto s = svd_full(w);
  return s.u * s.v.adjoint();
}

Mat complement_basis(const Mat& cols, double tol) {
  const Eigen::Index d = cols.rows();
  if (cols.cols() == 0) return Mat::Identity(d, d);
  auto s = svd_full(cols);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.s.size(); ++i)
    if (s.s(i) > tol) ++rank;
  return s.u.rightCols(d - rank);
}

Mat complete_isometry(const Mat& v) {
  Mat out(v.rows(), v.rows());
  out.leftCols(v.cols()) = v;
  Mat comp = complement_basis(v);
  if (comp.cols() != v.rows() - v.cols()) throw NumericalError("complete_isometry: columns are not independent");
  out.rightCols(comp.cols()) = comp;
  return out;
}

double unitarity_error(const Mat& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

bool is_unitary(const Mat& u, double tol) { return unitarity_error(u) <= tol; }

double hermiticity_error(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::size_t numerical_rank(const Mat& m, double tol) {
  auto s = singular_values(m);
  return static_cast<std::size_t>((s.array() > tol).count());
}

void check_density(const Mat& rho, double tol) {
  if (rho.rows() != rho.cols()) throw NumericalError("density operator is not square");
  if (hermiticity_error(rho) > tol) throw NumericalError("density operator is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > tol) throw NumericalError("density operator trace is not 1");
  if (eigvalsh(rho).minCoeff() < -tol) throw NumericalError("density operator has negative eigenvalues");
}

Mat condition(const Mat& rho, const Mat& lambda) {
  Mat out = lambda * rho * lambda.adjoint();
  const double p = out.trace().real();
  if (p <= 0) throw NumericalError("conditioning on a zero-probability outcome");
  return out / p;
}

}  // namespace ulab
