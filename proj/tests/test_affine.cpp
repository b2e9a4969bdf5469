#include "doctest.h"
#include "qpos/affine.hpp"
#include "test_support.hpp"

using namespace qpos;
using qpos::test::vec;

namespace {

Matrix col(const Vector& v) { return Matrix(v); }

AffineSet line(double a, double b) {
  return AffineSet(make_monotone_space(1), Vector::Zero(2), col(vec({a, b})));
}

// Affine subsets of the graph of x ↦ T x + c, T + Tᵀ ⪰ 0; d = k gives the whole graph.
AffineSet random_monotone_affine(std::mt19937_64& rng, int k, int d) {
  const Matrix l = Matrix(test::uniform_vector(rng, k * k, -1, 1).reshaped(k, k));
  const Matrix w = Matrix(test::uniform_vector(rng, k * k, -1, 1).reshaped(k, k));
  const Matrix t = l * l.transpose() + 0.5 * Matrix::Identity(k, k) + (w - w.transpose());
  Matrix full(2 * k, k);
  full << Matrix::Identity(k, k), t;
  const Matrix g = Matrix(test::uniform_vector(rng, k * k, -1, 1).reshaped(k, k));
  const Matrix mix = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(k, d);
  Vector x0(2 * k);
  const Vector x = test::uniform_vector(rng, k, -1, 1);
  x0 << x, t * x + test::uniform_vector(rng, k, -0.3, 0.3);
  return AffineSet(make_monotone_space(k), x0, full * mix);
}

}  // namespace

TEST_CASE("affine set construction") {
  CHECK_THROWS_AS(AffineSet(make_monotone_space(1), vec({0, 0}), col(vec({0, 0}))), ArgumentError);
  CHECK_THROWS_AS(AffineSet(make_monotone_space(1), vec({0, 0, 0}), Matrix(3, 0)), ArgumentError);
  const AffineSet s = AffineSet::singleton(make_monotone_space(1), vec({1, 2}));
  CHECK(s.dim() == 0);
  CHECK(s.contains(vec({1, 2})));
  CHECK_FALSE(s.contains(vec({1, 2.1})));
  CHECK(line(1, 1).contains(vec({-3, -3})));
}

TEST_CASE("affine_is_q_positive") {
  CHECK(affine_is_q_positive(line(1, 1)).holds());
  CHECK(affine_is_q_positive(line(1, -1)).fails());
  CHECK(affine_is_q_positive(AffineSet::singleton(make_monotone_space(1), vec({0, 0}))).holds());
}

TEST_CASE("affine_pi") {
  const PiDescription d = affine_pi(line(1, 1));
  CHECK(d.quadratic_residual(vec({1, 2})) == doctest::Approx(-0.25));
  CHECK_FALSE(d.contains(vec({1, 2})));
  // Oracle: q((1,2) − (t,t)) = (1 − t)(2 − t) is negative at t = 1.5.
  CHECK((1 - 1.5) * (2 - 1.5) < 0.0);
  CHECK(d.contains(vec({1, 1})));
  CHECK(d.quadratic_residual(vec({1, 1})) == doctest::Approx(0.0).epsilon(1e-12));

  const PiDescription cone = affine_pi(AffineSet::singleton(make_monotone_space(1), vec({0, 0})));
  CHECK(cone.contains(vec({1, 1})));
  CHECK_FALSE(cone.contains(vec({1, -1})));

  CHECK_THROWS_AS(affine_pi(line(1, -1)), PreconditionError);
}

TEST_CASE("affine_pi agrees with sampled pi_member") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = 1 + trial % 2;
    const int d = 1 + trial % k;
    const AffineSet a = random_monotone_affine(rng, k, d);
    REQUIRE(affine_is_q_positive(a).holds());
    const PiDescription pi = affine_pi(a);
    const PointSet sample(a.space_ptr(), a.sample(12.0, d == 1 ? 481 : 121));
    int agree = 0, decided = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vector b = a.at(test::uniform_vector(rng, d, -3, 3)) +
                       test::uniform_vector(rng, 2 * k, -1, 1);
      const double exact = pi.quadratic_residual(b);
      // The sampled stand-in only sees minimizers inside its parameter box and
      // cannot resolve residuals near zero.
      if (pi.linear_ok(b) && std::abs(exact) < 5e-2) continue;
      const AffineMin m = min_q_over_affine(a.space(), b - a.anchor(), a.basis());
      if (!m.minus_infinity && m.argmin.cwiseAbs().maxCoeff() > 10.0) continue;
      ++decided;
      agree += pi.contains(b) == pi_member(sample, b).holds();
    }
    CHECK(agree == decided);
    CHECK(decided >= 500);
  }
}

TEST_CASE("affine_is_maximal") {
  CHECK(affine_is_maximal(line(1, 1)).holds());
  const Verdict s = affine_is_maximal(AffineSet::singleton(make_monotone_space(1), vec({0, 0})));
  REQUIRE(s.fails());
  REQUIRE_FALSE(s.witness.empty());
  const Vector w = s.witness[0];
  CHECK(test::monotone_q(w) >= -1e-9);
  CHECK(w.norm() > 1e-6);
  CHECK(affine_is_maximal(line(1, 0)).holds());
}

TEST_CASE("maximal affine sets reject every outside probe") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + trial % 3;
    const AffineSet a = random_monotone_affine(rng, k, k);
    REQUIRE(affine_is_maximal(a).holds());
    const PiDescription pi = affine_pi(a);
    for (int i = 0; i < 1000; ++i) {
      const Vector b = test::uniform_vector(rng, 2 * k, -2, 2);
      if (!a.contains(b)) CHECK_FALSE(pi.contains(b));
    }
    // Directions are closed under negation and scaling by construction.
    const Vector x = a.at(Vector::Ones(k));
    CHECK(a.contains(a.anchor() - (x - a.anchor())));
    CHECK(a.contains(a.anchor() + 3.0 * (x - a.anchor())));
  }
}

TEST_CASE("affine_pi_shape") {
  const PiShape id = affine_pi_shape(line(1, 1));
  CHECK(id.affine);
  const PiShape cone = affine_pi_shape(AffineSet::singleton(make_monotone_space(1), vec({0, 0})));
  REQUIRE_FALSE(cone.affine);
  REQUIRE(cone.witness_pair.size() == 2);
  const PiDescription d = affine_pi(AffineSet::singleton(make_monotone_space(1), vec({0, 0})));
  CHECK(d.contains(cone.witness_pair[0]));
  CHECK(d.contains(cone.witness_pair[1]));
  CHECK(test::monotone_q(cone.witness_pair[0] - cone.witness_pair[1]) < -1e-9);
}

TEST_CASE("phi_affine_eval") {
  CHECK(phi_affine_eval(line(1, 1), vec({1, 1})) == doctest::Approx(1.0));
  CHECK(phi_affine_eval(line(1, 0), vec({0, 1})) == kInf);
  CHECK(phi_affine_eval(line(1, 0), vec({5, 0})) == doctest::Approx(0.0));
  const SpacePtr m1 = make_monotone_space(1);
  const Vector p = vec({2, -1});
  const Vector x = vec({0.5, 3});
  CHECK(phi_affine_eval(AffineSet::singleton(m1, p), x) ==
        doctest::Approx(pairing(*m1, x, p) - q_value(*m1, p)));
  // Closed form (x + x*)²/4 for the identity graph.
  std::mt19937_64 rng(59);
  for (int i = 0; i < 200; ++i) {
    const Vector b = test::uniform_vector(rng, 2, -3, 3);
    CHECK(phi_affine_eval(line(1, 1), b) == doctest::Approx((b(0) + b(1)) * (b(0) + b(1)) / 4));
  }
}

TEST_CASE("phi_affine_domain and conjugate") {
  const AffineSet h = line(1, 0);
  CHECK(same_affine_set(phi_affine_domain(h), h));
  CHECK(phi_affine_conj(h, vec({2, 0})) == doctest::Approx(0.0));
  CHECK(phi_affine_conj(h, vec({2, 1})) == kInf);
  const AffineSet id = line(1, 1);
  CHECK(phi_affine_domain(id).dim() == 2);
}

TEST_CASE("maximal_convex_affinity_falsifier") {
  const SpacePtr m1 = make_monotone_space(1);
  auto identity = [](const Vector& b) { return std::abs(b(0) - b(1)) <= 1e-9; };
  std::vector<Vector> diag;
  for (double t : {-1.0, 0.5, 1.0, 2.0}) diag.push_back(vec({t, t}));
  CHECK(maximal_convex_affinity_falsifier(*m1, identity, vec({0, 0}), diag).holds());

  auto ray = [](const Vector& b) { return std::abs(b(0) - b(1)) <= 1e-9 && b(0) >= -1e-12; };
  std::vector<Vector> on_ray;
  for (double t : {0.0, 0.5, 1.0, 2.0}) on_ray.push_back(vec({t, t}));
  const Verdict r = maximal_convex_affinity_falsifier(*m1, ray, vec({0, 0}), on_ray);
  REQUIRE(r.fails());
  CHECK(r.witness.at(0)(0) < 0.0);
  for (const Vector& p : on_ray) CHECK(test::monotone_q(r.witness[0] - p) >= 0.0);

  const SpacePtr m2 = make_monotone_space(2);
  auto ball = [](const Vector& b) { return b.norm() <= 1.0 + 1e-12; };
  std::vector<Vector> in_ball{vec({0.5, 0, 0.5, 0}), vec({0, 0.4, 0, 0.4}), vec({0.3, 0.3, 0.3, 0.3})};
  CHECK(maximal_convex_affinity_falsifier(*m2, ball, Vector::Zero(4), in_ball).fails());
}

TEST_CASE("map_affine swaps coordinates") {
  const SpacePtr m1 = make_monotone_space(1);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const AffineSet h = line(1, 0);
  const AffineSet v = map_affine(h, swap, m1);
  CHECK(v.contains(vec({0, 7})));
  CHECK_FALSE(v.contains(vec({7, 0})));
}
