#include "qpos/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qpos::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(QPOS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("QPOS_KERNELS"); env != nullptr) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands have mismatched lengths");
}

}  // namespace

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) { return isa == Isa::kScalar || cpu_has_avx2(); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw std::runtime_error("requested kernel ISA is not available");
  selected().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same(a.size(), b.size());
#if defined(QPOS_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  return scalar::dot(a.data(), b.data(), a.size());
}

double bilinear(std::span<const double> s, std::span<const double> b, std::span<const double> c) {
  check_same(b.size(), c.size());
  check_same(s.size(), b.size() * b.size());
#if defined(QPOS_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return avx2::bilinear(s.data(), b.data(), c.data(), b.size());
#endif
  return scalar::bilinear(s.data(), b.data(), c.data(), b.size());
}

MaxAffineResult max_affine(std::span<const double> slopes, std::span<const double> offsets,
                           std::span<const double> x) {
  const std::size_t m = offsets.size();
  const std::size_t n = x.size();
  check_same(slopes.size(), m * n);
#if defined(QPOS_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2)
    return avx2::max_affine(slopes.data(), offsets.data(), m, n, x.data());
#endif
  return scalar::max_affine(slopes.data(), offsets.data(), m, n, x.data());
}

double min_quadratic_gap(std::span<const double> s, std::span<const double> points,
                         std::span<const double> x) {
  const std::size_t n = x.size();
  check_same(s.size(), n * n);
  if (n == 0 || points.size() % n != 0) throw std::invalid_argument("bad point block");
  const std::size_t m = points.size() / n;
#if defined(QPOS_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2)
    return avx2::min_quadratic_gap(s.data(), points.data(), m, n, x.data());
#endif
  return scalar::min_quadratic_gap(s.data(), points.data(), m, n, x.data());
}

}  // namespace qpos::kernels
