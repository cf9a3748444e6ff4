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

#ifndef ULAB_CORE_HPP
#define ULAB_CORE_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ulab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Register dimensions of a tensor-product space. The first register is the
/// most significant one, i.e. index = ((i0 * d1) + i1) * d2 + i2 ...
using Dims = std::vector<std::size_t>;

/// Tolerance for exact constructions.
inline constexpr double kExactTol = 1e-9;
/// Tolerance used for statistical estimates.
inline constexpr double kStatTol = 1e-6;
/// Largest total dimension handled with dense density matrices.
inline constexpr std::size_t kDensityDimCap = 4096;
/// Largest pure-state dimension.
inline constexpr std::size_t kPureDimCap = std::size_t{1} << 20;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a requested object would exceed the dense-simulation caps.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::size_t size, std::size_t cap)
      : Error(what + ": size " + std::to_string(size) + " exceeds cap " +
              std::to_string(cap)),
        size_(size),
        cap_(cap) {}
  std::size_t size() const noexcept { return size_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t size_;
  std::size_t cap_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

inline std::size_t product(const Dims& dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

inline bool is_power_of_two(std::size_t d) { return d != 0 && (d & (d - 1)) == 0; }

inline unsigned log2_exact(std::size_t d) {
  if (!is_power_of_two(d)) throw DimensionError("dimension " + std::to_string(d) + " is not a power of two");
  unsigned n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  return n;
}

inline void check_density_cap(std::size_t d, const char* what) {
  if (d > kDensityDimCap) throw CapExceeded(what, d, kDensityDimCap);
}

inline void check_pure_cap(std::size_t d, const char* what) {
  if (d > kPureDimCap) throw CapExceeded(what, d, kPureDimCap);
}

}  // namespace ulab

#endif  // ULAB_CORE_HPP
