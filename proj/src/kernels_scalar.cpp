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

#include "ulab/kernels.hpp"

#include <utility>

namespace ulab::kernels {

namespace scalar {

void apply_1q(c64* state, unsigned n, unsigned q, const c64* m) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t s = std::size_t{1} << (n - 1 - q);
  for (std::size_t base = 0; base < dim; base += 2 * s)
    for (std::size_t i = base; i < base + s; ++i) {
      const c64 a = state[i];
      const c64 b = state[i + s];
      state[i] = m[0] * a + m[1] * b;
      state[i + s] = m[2] * a + m[3] * b;
    }
}

void apply_2q(c64* state, unsigned n, unsigned q0, unsigned q1, const c64* m) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t s0 = std::size_t{1} << (n - 1 - q0);
  const std::size_t s1 = std::size_t{1} << (n - 1 - q1);
  const std::size_t mask = s0 | s1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const std::size_t idx[4] = {i, i | s1, i | s0, i | s0 | s1};
    c64 v[4];
    for (int k = 0; k < 4; ++k) v[k] = state[idx[k]];
    for (int r = 0; r < 4; ++r)
      state[idx[r]] = m[4 * r] * v[0] + m[4 * r + 1] * v[1] + m[4 * r + 2] * v[2] + m[4 * r + 3] * v[3];
  }
}

}  // namespace scalar

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend b = avx2_available() ? Backend::Avx2 : Backend::Scalar;
  return b;
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void apply_1q(Backend b, c64* state, unsigned n, unsigned q, const c64* m) {
  if (b == Backend::Avx2 && avx2_available())
    avx2::apply_1q(state, n, q, m);
  else
    scalar::apply_1q(state, n, q, m);
}

void apply_2q(Backend b, c64* state, unsigned n, unsigned q0, unsigned q1, const c64* m) {
  if (b == Backend::Avx2 && avx2_available())
    avx2::apply_2q(state, n, q0, q1, m);
  else
    scalar::apply_2q(state, n, q0, q1, m);
}

}  // namespace ulab::kernels
