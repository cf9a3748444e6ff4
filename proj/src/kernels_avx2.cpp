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

// Built with -mavx2 -mfma. Only reached through the runtime dispatcher.

#include <immintrin.h>

#include "ulab/kernels.hpp"

namespace ulab::kernels::avx2 {
namespace {

struct Coef {
  __m256d re;
  __m256d im;
};

inline Coef coef(c64 c) { return {_mm256_set1_pd(c.real()), _mm256_set1_pd(c.imag())}; }

// Two packed complex numbers times a broadcast complex scalar.
inline __m256d cmul(__m256d v, const Coef& c) {
  const __m256d sw = _mm256_permute_pd(v, 0b0101);
  return _mm256_fmaddsub_pd(v, c.re, _mm256_mul_pd(sw, c.im));
}

inline __m256d load(const c64* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store(c64* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

}  // namespace

void apply_1q(c64* state, unsigned n, unsigned q, const c64* m) {
  const std::size_t s = std::size_t{1} << (n - 1 - q);
  if (s < 2) {
    scalar::apply_1q(state, n, q, m);
    return;
  }
  const std::size_t dim = std::size_t{1} << n;
  const Coef m0 = coef(m[0]), m1 = coef(m[1]), m2 = coef(m[2]), m3 = coef(m[3]);
  for (std::size_t base = 0; base < dim; base += 2 * s)
    for (std::size_t i = base; i < base + s; i += 2) {
      const __m256d a = load(state + i);
      const __m256d b = load(state + i + s);
      store(state + i, _mm256_add_pd(cmul(a, m0), cmul(b, m1)));
      store(state + i + s, _mm256_add_pd(cmul(a, m2), cmul(b, m3)));
    }
}

void apply_2q(c64* state, unsigned n, unsigned q0, unsigned q1, const c64* m) {
  const std::size_t s0 = std::size_t{1} << (n - 1 - q0);
  const std::size_t s1 = std::size_t{1} << (n - 1 - q1);
  if (s0 < 2 || s1 < 2) {
    scalar::apply_2q(state, n, q0, q1, m);
    return;
  }
  Coef c[16];
  for (int k = 0; k < 16; ++k) c[k] = coef(m[k]);
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = s0 | s1;
  // Both strides are >= 2, so i and i+1 share the bits of s0 and s1.
  for (std::size_t i = 0; i < dim; i += 2) {
    if (i & mask) continue;
    const std::size_t idx[4] = {i, i | s1, i | s0, i | s0 | s1};
    __m256d v[4];
    for (int k = 0; k < 4; ++k) v[k] = load(state + idx[k]);
    for (int r = 0; r < 4; ++r) {
      __m256d acc = cmul(v[0], c[4 * r]);
      acc = _mm256_add_pd(acc, cmul(v[1], c[4 * r + 1]));
      acc = _mm256_add_pd(acc, cmul(v[2], c[4 * r + 2]));
      acc = _mm256_add_pd(acc, cmul(v[3], c[4 * r + 3]));
      store(state + idx[r], acc);
    }
  }
}

}  // namespace ulab::kernels::avx2
