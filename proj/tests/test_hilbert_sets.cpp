#include "doctest.h"
#include "qpos/fitzpatrick.hpp"
#include "qpos/hilbert_sets.hpp"
#include "test_support.hpp"

using namespace qpos;
using qpos::test::vec;

namespace {

ClosedSetDescriptor two_points() { return ClosedSetDescriptor::finite({vec({-1}), vec({1})}); }

BoxGrid grid1(double pitch = 0.01) { return BoxGrid(vec({-1}), vec({1}), pitch); }
BoxGrid grid2(double pitch = 0.05) { return BoxGrid::cube(2, 1, pitch); }

}  // namespace

TEST_CASE("descriptor distances") {
  const auto cross = ClosedSetDescriptor::axis_cross();
  CHECK(cross.distance(vec({1, 2})) == 1.0);
  CHECK(cross.contains(vec({0, 5})));
  const auto seg = ClosedSetDescriptor::segments({{vec({0, 0}), vec({2, 0})}});
  CHECK(seg.distance(vec({1, 1})) == doctest::Approx(1.0));
  CHECK(seg.distance(vec({3, 0})) == doctest::Approx(1.0));
  CHECK(two_points().distance(vec({0.25})) == doctest::Approx(0.75));
  CHECK_THROWS_AS(ClosedSetDescriptor::finite({}), ArgumentError);
  CHECK(to_string(DescriptorKind::kAxisCross) == "axis_cross");
}

TEST_CASE("phi_closed_eval") {
  CHECK(phi_closed_eval(two_points(), vec({0})) == doctest::Approx(-0.5));
  CHECK(phi_closed_eval(two_points(), vec({1})) == doctest::Approx(0.5));
  CHECK(phi_closed_eval(ClosedSetDescriptor::axis_cross(), vec({1, 2})) == doctest::Approx(2.0));
}

TEST_CASE("phi_closed_eval matches phi_build on finite sets") {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + trial % 3;
    std::vector<Vector> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(test::uniform_vector(rng, k, -1, 1));
    const auto a = ClosedSetDescriptor::finite(pts);
    const PointSet ps(a.space(), pts);
    CHECK(is_q_positive(ps).holds());
    const MaxAffineFn phi = phi_build(ps);
    for (int i = 0; i < 100; ++i) {
      const Vector x = test::uniform_vector(rng, k, -2, 2);
      CHECK(std::abs(phi_closed_eval(a, x) - phi(x)) <= 1e-10);
    }
  }
}

TEST_CASE("phi_conj_closed_eval") {
  const auto a = two_points();
  CHECK(phi_conj_closed_eval(a, vec({0}), grid1()).value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(phi_conj_closed_eval(a, vec({1}), grid1()).value == doctest::Approx(0.5).epsilon(1e-6));
  const BoxSup s = phi_conj_closed_eval(ClosedSetDescriptor::axis_cross(), vec({1, 1}), grid2());
  CHECK(s.value > 1.0 + 1e-3);

  // Finite sets: compare with the exact LP conjugate inside the hull.
  std::mt19937_64 rng(137);
  const std::vector<Vector> pts{vec({-1, 0}), vec({1, 0.5}), vec({0, 1})};
  const auto f = ClosedSetDescriptor::finite(pts);
  const MaxAffineFn phi = phi_build(PointSet(f.space(), pts));
  for (int i = 0; i < 10; ++i) {
    Vector w = test::uniform_vector(rng, 3, 0.05, 1);
    w /= w.sum();
    const Vector b = w(0) * pts[0] + w(1) * pts[1] + w(2) * pts[2];
    const double lp = conj_eval(phi, b).value;
    const BoxSup g = phi_conj_closed_eval(f, b, grid2());
    // The objective is a min of affine functions of b with slopes 2(x − aᵢ), so a
    // grid point within half a diagonal pitch of the maximizer loses at most this much.
    double slope = 0.0;
    for (const Vector& p : pts) slope = std::max(slope, 2.0 * (b - p).norm());
    CHECK(g.value <= lp + 1e-9);
    CHECK(lp - g.value <= 0.5 * slope * 0.05 * std::sqrt(2.0) * 0.5);
  }
}

TEST_CASE("conjugate never drops below q") {
  std::mt19937_64 rng(139);
  const auto cross = ClosedSetDescriptor::axis_cross();
  for (int i = 0; i < 20; ++i) {
    const Vector x = test::uniform_vector(rng, 2, -1, 1);
    CHECK(phi_conj_closed_eval(cross, x, grid2(0.1)).value >= 0.5 * x.squaredNorm() - 1e-12);
  }
}

TEST_CASE("g_phi_closed_member") {
  const auto cross = ClosedSetDescriptor::axis_cross();
  CHECK(g_phi_closed_member(cross, vec({0, 1.5}), grid2()).holds());
  const Verdict off = g_phi_closed_member(cross, vec({1, 1}), grid2());
  CHECK(off.fails());
  CHECK(g_phi_closed_member(two_points(), vec({0}), grid1()).holds());
}

TEST_CASE("axis cross: G equals A on a 41x41 grid") {
  const auto cross = ClosedSetDescriptor::axis_cross();
  const BoxGrid probe(vec({-2, -2}), vec({2, 2}), 0.1);
  int wrong = 0;
  probe.for_each_point([&](const Vector& x) {
    const bool in_a = std::min(std::abs(x(0)), std::abs(x(1))) <= 1e-9;
    wrong += g_phi_closed_member(cross, x, BoxGrid::cube(2, 1, 0.1)).holds() != in_a;
  });
  CHECK(probe.point_count() == 41 * 41);
  CHECK(wrong == 0);
}

TEST_CASE("closed representation through h") {
  const auto origin = ClosedSetDescriptor::finite({vec({0})});
  const BoxSup h = closed_repr_h_eval(origin, vec({1}), grid1(0.05));
  CHECK((h.unbounded || h.value > 0.5 + 1e-3));
  CHECK(closed_repr_h_eval(origin, vec({0}), grid1(0.05)).value == doctest::Approx(0.0));

  std::vector<Vector> probes;
  for (int i = -6; i <= 6; ++i) probes.push_back(vec({0.5 * i}));
  CHECK(closed_repr_check(two_points(), probes, grid1(0.05)).holds());
  const auto seg = intervals_descriptor({{0.0, 1.0}, {2.0, 3.0}});
  CHECK(closed_repr_check(seg, probes, grid1(0.05)).holds());

  std::vector<Vector> p2;
  for (double a : {-1.0, 0.0, 0.5, 1.0})
    for (double b : {-1.0, 0.0, 0.7}) p2.push_back(vec({a, b}));
  CHECK(closed_repr_check(ClosedSetDescriptor::axis_cross(), p2, grid2(0.1)).holds());
}

TEST_CASE("midpoint_ball_check") {
  const auto cross = ClosedSetDescriptor::axis_cross();
  const Verdict c = midpoint_ball_check(cross, vec({1, 0}), vec({0, 1}));
  CHECK(c.holds());
  CHECK(c.value == doctest::Approx(std::sqrt(0.5) - 0.5));
  const auto seg = ClosedSetDescriptor::segments({{vec({0, 0}), vec({1, 1})}});
  CHECK(midpoint_ball_check(seg, vec({0, 0}), vec({1, 1})).holds());
  const Verdict t = midpoint_ball_check(two_points(), vec({-1}), vec({1}));
  CHECK(t.fails());
  CHECK(t.value == doctest::Approx(0.0));
  CHECK_THROWS_AS(midpoint_ball_check(two_points(), vec({1}), vec({1})), PreconditionError);
  CHECK_THROWS_AS(midpoint_ball_check(two_points(), vec({0}), vec({1})), PreconditionError);
}

TEST_CASE("line corollary") {
  std::vector<double> net;
  for (int i = -10; i <= 40; ++i) net.push_back(0.1 * i);
  const BoxGrid g = grid1(0.02);
  const Verdict unit = line_corollary_check({{0.0, 1.0}}, net, g);
  CHECK(unit.holds());
  CHECK(unit.value == 0.0);
  const Verdict pts = line_corollary_check({{-1.0, -1.0}, {1.0, 1.0}}, net, g);
  CHECK(pts.holds());
  CHECK(pts.value >= 1.0);
  const Verdict two = line_corollary_check({{0.0, 1.0}, {2.0, 3.0}}, net, g);
  CHECK(two.holds());
  CHECK(two.value >= 1.0);
}
