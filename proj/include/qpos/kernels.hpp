#ifndef QPOS_KERNELS_HPP
#define QPOS_KERNELS_HPP

#include <cstddef>
#include <span>
#include <string_view>

// Dense inner loops shared by every module. Each kernel has a scalar
// reference implementation and, when the CPU supports it, an AVX2/FMA
// variant. The variant is chosen once at first use; QPOS_KERNELS=scalar
// forces the reference path.
namespace qpos::kernels {

enum class Isa { kScalar, kAvx2 };

struct MaxAffineResult {
  double value;
  std::size_t argmax;
};

// Σ a[i] b[i]
double dot(std::span<const double> a, std::span<const double> b);

// bᵀ S c for a dense symmetric n×n matrix stored contiguously (row == column major).
double bilinear(std::span<const double> s, std::span<const double> b, std::span<const double> c);

// max over rows i of (slopes[i,:]·x − offsets[i]); slopes is m×n row-major.
MaxAffineResult max_affine(std::span<const double> slopes, std::span<const double> offsets,
                           std::span<const double> x);

// min over rows i of ½ (x − p_i)ᵀ S (x − p_i); points is m×n row-major.
double min_quadratic_gap(std::span<const double> s, std::span<const double> points,
                         std::span<const double> x);

Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
// Pins the dispatch target (tests and benchmarks). Throws if unavailable.
void force_isa(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double bilinear(const double* s, const double* b, const double* c, std::size_t n);
MaxAffineResult max_affine(const double* slopes, const double* offsets, std::size_t m,
                           std::size_t n, const double* x);
double min_quadratic_gap(const double* s, const double* points, std::size_t m, std::size_t n,
                         const double* x);
}  // namespace scalar

#if defined(QPOS_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double bilinear(const double* s, const double* b, const double* c, std::size_t n);
MaxAffineResult max_affine(const double* slopes, const double* offsets, std::size_t m,
                           std::size_t n, const double* x);
double min_quadratic_gap(const double* s, const double* points, std::size_t m, std::size_t n,
                         const double* x);
}  // namespace avx2
#endif

}  // namespace qpos::kernels

#endif  // QPOS_KERNELS_HPP
