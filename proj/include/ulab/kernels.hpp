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

// State-vector gate kernels. Qubit 0 is the most significant bit.

#ifndef ULAB_KERNELS_HPP
#define ULAB_KERNELS_HPP

#include <complex>
#include <cstddef>

namespace ulab::kernels {

using c64 = std::complex<double>;

enum class Backend { Scalar, Avx2 };

/// Best backend supported by the running CPU (resolved once).
Backend active_backend();
bool avx2_available();
const char* backend_name(Backend b);

/// m is a row-major 2x2 matrix.
void apply_1q(Backend b, c64* state, unsigned n, unsigned q, const c64* m);
/// m is a row-major 4x4 matrix on (q0, q1) with q0 the high bit of the local index.
void apply_2q(Backend b, c64* state, unsigned n, unsigned q0, unsigned q1, const c64* m);

inline void apply_1q(c64* state, unsigned n, unsigned q, const c64* m) { apply_1q(active_backend(), state, n, q, m); }
inline void apply_2q(c64* state, unsigned n, unsigned q0, unsigned q1, const c64* m) {
  apply_2q(active_backend(), state, n, q0, q1, m);
}

namespace scalar {
void apply_1q(c64* state, unsigned n, unsigned q, const c64* m);
void apply_2q(c64* state, unsigned n, unsigned q0, unsigned q1, const c64* m);
}  // namespace scalar

namespace avx2 {
void apply_1q(c64* state, unsigned n, unsigned q, const c64* m);
void apply_2q(c64* state, unsigned n, unsigned q0, unsigned q1, const c64* m);
}  // namespace avx2

}  // namespace ulab::kernels

#endif  // ULAB_KERNELS_HPP
