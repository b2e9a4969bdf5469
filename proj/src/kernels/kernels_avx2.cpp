// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "qpos/kernels.hpp"

#include <immintrin.h>

#include <limits>
#include <vector>

namespace qpos::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double bilinear(const double* s, const double* b, const double* c, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (b[i] == 0.0) continue;
    acc += b[i] * dot(s + i * n, c, n);
  }
  return acc;
}

MaxAffineResult max_affine(const double* slopes, const double* offsets, std::size_t m,
                           std::size_t n, const double* x) {
  MaxAffineResult best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < m; ++i) {
    const double v = dot(slopes + i * n, x, n) - offsets[i];
    if (v > best.value) best = {v, i};
  }
  return best;
}

double min_quadratic_gap(const double* s, const double* points, std::size_t m, std::size_t n,
                         const double* x) {
  std::vector<double> diff(n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double* p = points + i * n;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      _mm256_storeu_pd(diff.data() + j,
                       _mm256_sub_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(p + j)));
    }
    for (; j < n; ++j) diff[j] = x[j] - p[j];
    const double v = 0.5 * bilinear(s, diff.data(), diff.data(), n);
    if (v < best) best = v;
  }
  return best;
}

}  // namespace qpos::kernels::avx2
