#include "qpos/kernels.hpp"

#include <limits>
#include <vector>

namespace qpos::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
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
    for (std::size_t j = 0; j < n; ++j) diff[j] = x[j] - p[j];
    const double v = 0.5 * bilinear(s, diff.data(), diff.data(), n);
    if (v < best) best = v;
  }
  return best;
}

}  // namespace qpos::kernels::scalar
