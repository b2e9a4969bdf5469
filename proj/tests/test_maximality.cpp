#include "doctest.h"
#include "qpos/fitzpatrick.hpp"
#include "qpos/maximality.hpp"
#include "test_support.hpp"

using namespace qpos;
using qpos::test::vec;

namespace {

AffineSet line(double a, double b) {
  return AffineSet(make_monotone_space(1), Vector::Zero(2), Matrix(vec({a, b})));
}

BoxGrid square(double half, double pitch) { return BoxGrid::cube(2, half, pitch); }

}  // namespace

TEST_CASE("premax_certify on the origin singleton") {
  const PointSet p(make_monotone_space(1), {vec({0, 0})});
  const PremaxReport r = premax_certify(p, square(2, 0.1));
  REQUIRE(r.phi_dominates_q.fails());
  CHECK(r.phi_dominates_q.value == doctest::Approx(4.0));
  const Vector w = r.phi_dominates_q.witness.at(0);
  CHECK(test::monotone_q(w) == doctest::Approx(4.0));
  CHECK(r.classification == PremaxClass::kNotPremaximal);
  REQUIRE(r.pi_positive.fails());
  REQUIRE(r.pi_positive.witness.size() == 2);
  const Vector b1 = r.pi_positive.witness[0], b2 = r.pi_positive.witness[1];
  CHECK(test::monotone_q(b1) >= -1e-9);
  CHECK(test::monotone_q(b2) >= -1e-9);
  CHECK(test::monotone_q(b1 - b2) < -1e-9);
  CHECK(to_string(r.classification) == "NOT_PREMAXIMAL");
}

TEST_CASE("premax_certify on the identity graph") {
  const PremaxReport r = premax_certify(line(1, 1), square(3, 0.05));
  CHECK(r.phi_dominates_q.holds());
  CHECK(r.phi_dominates_q.grid_certified);
  CHECK(r.classification == PremaxClass::kViaPhiDominance);
  REQUIRE(r.maximal_superset);
  CHECK(r.maximal_superset(vec({0.7, 0.7})));
  CHECK_FALSE(r.maximal_superset(vec({0.7, 0.8})));
}

TEST_CASE("premax_certify on the horizontal line") {
  const AffineSet h = line(1, 0);
  const PremaxReport r = premax_certify(h, square(2, 0.1));
  CHECK(r.classification == PremaxClass::kViaAffinePi);
  REQUIRE(r.pi_affine);
  CHECK(same_affine_set(*r.pi_affine, h));
  REQUIRE(r.phi_domain);
  CHECK(same_affine_set(*r.phi_domain, h));
  CHECK(r.domain_is_pi.holds());
  CHECK(r.pi_positive.holds());
  // Φ_P is +∞ off the line, so a full-space scan would be meaningless.
  CHECK(phi_affine_eval(h, vec({0, 1})) == kInf);
}

TEST_CASE("premaximal classification implies a q-positive pi net") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    const PointSet p(make_monotone_space(1), test::random_monotone_points(rng, 1, 3));
    const BoxGrid box = square(2, 0.1);
    const PremaxReport r = premax_certify(p, box);
    if (r.classification == PremaxClass::kViaPhiDominance || r.classification == PremaxClass::kViaAffinePi)
      CHECK(net_q_positive(p.space(), pi_net(p, box)).holds());
    if (r.phi_dominates_q.holds()) {
      for (const Vector& b : pi_net(p, box))
        CHECK(std::abs(phi_build(p)(b) - q_value(p.space(), b)) <= 1e-8);
    }
  }
}

TEST_CASE("premax_certify rejects sets that are not q-positive") {
  const PointSet bad(make_monotone_space(1), {vec({0, 1}), vec({1, 0})});
  CHECK_THROWS_AS(premax_certify(bad, square(1, 0.1)), PreconditionError);
}

TEST_CASE("phi_affine_eval examples") {
  CHECK(phi_affine_eval(line(1, 1), vec({1, 1})) == doctest::Approx(1.0));
  CHECK(phi_affine_eval(line(1, 0), vec({0, 1})) == kInf);
}

TEST_CASE("third_polar_check") {
  const BoxGrid grid = square(2, 0.25);
  const std::vector<Vector> probes = grid.points();
  CHECK(third_polar_check(PointSet(make_monotone_space(1), {vec({0, 0})}), probes).holds());
  CHECK(third_polar_check(PointSet(make_monotone_space(1), {vec({0, 0}), vec({1, 1})}), probes)
            .holds());
  std::mt19937_64 rng(67);
  const PointSet a(make_monotone_space(2), test::random_monotone_points(rng, 2, 5));
  std::vector<Vector> p4;
  for (int i = 0; i < 400; ++i) p4.push_back(test::uniform_vector(rng, 4, -1.5, 1.5));
  CHECK(third_polar_check(a, p4).holds());
}

TEST_CASE("extension_continuum") {
  const PointSet p(make_monotone_space(1), {vec({0, 0})});
  const ExtensionFamily f = extension_continuum(p, vec({1, 0}), vec({0, 1}), 101);
  CHECK(f.verified.holds());
  REQUIRE(f.points.size() == 101);
  CHECK((f.points.front() - vec({0, 1})).norm() == 0.0);
  CHECK((f.points.back() - vec({1, 0})).norm() == 0.0);
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const double l = f.lambdas[i];
    CHECK(test::monotone_q(f.points[i]) == doctest::Approx(l * (1 - l)));
    for (std::size_t j = 0; j < i; ++j) {
      const double d = f.lambdas[i] - f.lambdas[j];
      CHECK(std::abs(test::monotone_q(f.points[i] - f.points[j]) + d * d) <= 1e-12);
    }
  }
  CHECK(f.max_identity_residual <= 1e-12);
  CHECK(f.min_margin >= 0.0);
  CHECK_THROWS_AS(extension_continuum(p, vec({1, 0}), vec({1, 0}), 5), PreconditionError);
  CHECK_THROWS_AS(extension_continuum(p, vec({1, -1}), vec({0, 1}), 5), PreconditionError);
}

TEST_CASE("ni_type_check examples") {
  const BoxGrid box = square(2, 0.1);
  const NiReport id = ni_type_check(line(1, 1), box);
  CHECK(id.ni.holds());
  CHECK(id.ni.grid_certified);
  CHECK(id.agree);

  const NiReport origin = ni_type_check(PointSet(make_monotone_space(1), {vec({0, 0})}), box);
  CHECK(origin.ni.fails());
  CHECK(origin.agree);
  // inf over the single point at (y*, y**) = (1, 1) is (0 − 1)(0 − 1) = 1.
  CHECK(origin.ni.value >= 1.0 - 1e-9);

  const NiReport empty = ni_type_check(PointSet(make_monotone_space(1), {vec({0, 0})}), BoxGrid{});
  CHECK(empty.ni.undecided());

  Matrix s = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(ni_type_check(PointSet(make_space(s), {vec({0, 0})}), box), ArgumentError);
}

TEST_CASE("NI agrees with the swapped Fitzpatrick condition on random samples") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet a(make_monotone_space(1), test::random_monotone_points(rng, 1, 6));
    const NiReport r = ni_type_check(a, square(2, 0.1));
    CHECK(r.agree);
    CHECK(r.ni.status == r.phi_dominates_q.status);
  }
}

TEST_CASE("swap matrix and model detection") {
  const Matrix s = swap_matrix(2);
  CHECK((s * s - Matrix::Identity(4, 4)).norm() == 0.0);
  CHECK(is_monotone_model(*make_monotone_space(3)));
  CHECK_FALSE(is_monotone_model(*make_space(Matrix::Identity(2, 2))));
}
