#include "doctest.h"
#include "qpos/affine.hpp"
#include "qpos/fitzpatrick.hpp"
#include "qpos/minimal_convex.hpp"
#include "qpos/ssdb.hpp"
#include "test_support.hpp"

using namespace qpos;
using qpos::test::vec;

namespace {

AffineSet identity_line() {
  return AffineSet(make_monotone_space(1), Vector::Zero(2), Matrix(vec({1, 1})));
}

std::vector<Vector> identity_samples(double half, int n) {
  std::vector<Vector> pts;
  for (int i = 0; i < n; ++i) {
    const double t = -half + 2 * half * i / (n - 1);
    pts.push_back(vec({t, t}));
  }
  return pts;
}

}  // namespace

TEST_CASE("fund_ineq_check examples") {
  const PointSet a(make_monotone_space(1), {vec({0, 0}), vec({1, 1})});
  const MaxAffineFn phi = phi_build(a);
  const Verdict v = fund_ineq_check(phi, vec({0, 1}), vec({1, 1}), 0.5);
  CHECK(v.holds());
  CHECK(v.value == doctest::Approx(0.0).epsilon(1e-12));
  // α = 1: max{f(x), q(x)} ≥ q(x).
  CHECK(fund_ineq_check(phi, vec({3, -1}), vec({9, 9}), 1.0).holds());
  // α = 0: max{f^@(y), q(y)} ≥ q(y).
  const Verdict z = fund_ineq_check(phi, vec({9, 9}), vec({0.5, 0.5}), 0.0);
  CHECK(z.holds());
  CHECK(z.value == doctest::Approx(0.25));
  CHECK_THROWS_AS(fund_ineq_check(phi, vec({0, 0}), vec({0, 0}), 1.5), ArgumentError);
}

TEST_CASE("fund_ineq_check on random max-affine functions") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> unit(0, 1);
  int finite = 0;
  for (int draw = 0; draw < 10000; ++draw) {
    const int n = 1 + draw % 6;
    const Matrix r = Matrix(test::uniform_vector(rng, n * n, -1, 1).reshaped(n, n));
    const Matrix s = r + r.transpose() + 0.1 * Matrix::Identity(n, n);
    const SpacePtr sp = make_space(s);
    const int m = 1 + draw % 8;
    const RowMatrix slopes =
        RowMatrix(test::uniform_vector(rng, m * n, -2, 2).reshaped<Eigen::RowMajor>(m, n));
    const MaxAffineFn f(sp, slopes, test::uniform_vector(rng, m, -1, 1));
    const Vector x = test::uniform_vector(rng, n, -2, 2);
    Vector y = test::uniform_vector(rng, n, -2, 2);
    if (draw % 2 == 0) {
      // S y inside the convex hull of the slopes, so f^@(y) is finite.
      Vector w(m);
      for (int i = 0; i < m; ++i) w(i) = unit(rng);
      w /= w.sum();
      const Vector target = slopes.transpose() * w;
      const Eigen::FullPivLU<Matrix> lu(s);
      if (!lu.isInvertible()) continue;
      y = lu.solve(target);
      if ((s * y - target).norm() > 1e-10) continue;
      ++finite;
    }
    const Verdict v = fund_ineq_check(f, x, y, unit(rng));
    CHECK(v.holds());
  }
  CHECK(finite >= 4000);
}

TEST_CASE("envelope sandwich") {
  const ConvexFunction f = phi_affine_function(identity_line());
  const BoxGrid box = BoxGrid::cube(2, 2, 0.1);
  std::mt19937_64 rng(79);
  for (int spike = 0; spike < 10; ++spike) {
    // Half of the spikes sit on the line, where f^@ is finite.
    Vector x = test::uniform_vector(rng, 2, -1.5, 1.5);
    if (spike % 2 == 0) x(1) = x(0);
    const EnvelopeQuery e = make_envelope(f, x, box);
    const double cap = std::max(f.conjugate(x), test::monotone_q(x));
    if (spike % 2 == 0)
      CHECK(e.cap == doctest::Approx(cap));
    else
      CHECK(e.cap == kInf);
    CHECK(envelope_eval(e, x) <= e.cap + 1e-9);
    for (int i = 0; i < 100; ++i) {
      const Vector y = test::uniform_vector(rng, 2, -2, 2);
      const double h = envelope_eval(e, y);
      CHECK(h <= f.value(y) + 1e-12);
      CHECK(h >= test::monotone_q(y) - 1e-8);
    }
  }
}

TEST_CASE("minimal_selfconj_probe") {
  const PointSet m(make_monotone_space(1), identity_samples(2, 41));
  std::vector<Vector> probes;
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> diag(-2, 2);
  for (int i = 0; i < 100; ++i) {
    probes.push_back(test::uniform_vector(rng, 2, -2, 2));
    const double t = diag(rng);
    probes.push_back(vec({t, t}));
  }
  const Verdict v = minimal_selfconj_probe(m, probes);
  CHECK(v.holds());
  CHECK(v.value >= -1e-8);
  const PointSet single(make_monotone_space(1), {vec({0.5, 0.5})});
  CHECK(minimal_selfconj_probe(single, {vec({0.5, 0.5}), vec({1, 2})}).holds());
  const Verdict out = minimal_selfconj_probe(single, {vec({1, 2}), vec({3, 3})});
  CHECK(out.undecided());
}

TEST_CASE("convmin_check") {
  const BoxGrid box = BoxGrid::cube(2, 2, 0.1);
  std::mt19937_64 rng(89);
  std::vector<Vector> probes;
  for (int i = 0; i < 40; ++i) probes.push_back(test::uniform_vector(rng, 2, -1.5, 1.5));
  const Verdict v = convmin_check(phi_affine_function(identity_line()), probes, box);
  CHECK(v.holds());
  CHECK(v.grid_certified);

  const ConvexFunction g = g0_function(make_hilbert_ssdb(2));
  const Verdict vg = convmin_check(g, {vec({0.5, -0.3}), vec({1, 1})}, box);
  CHECK(vg.holds());
  const ConvMinValue cm = convmin_eval(g, vec({1, 1}), box);
  CHECK(cm.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cm.split_residual <= 1e-8);

  const PointSet origin(make_monotone_space(1), {vec({0, 0})});
  CHECK_THROWS_AS(convmin_check(as_convex(phi_build(origin)), probes, box), PreconditionError);
}
