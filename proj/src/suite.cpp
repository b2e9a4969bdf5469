#include "qpos/suite.hpp"

#include "qpos/affine.hpp"
#include "qpos/fitzpatrick.hpp"
#include "qpos/hilbert_sets.hpp"
#include "qpos/kernels.hpp"
#include "qpos/lipschitz.hpp"
#include "qpos/maximality.hpp"
#include "qpos/minimal_convex.hpp"
#include "qpos/scenario.hpp"
#include "qpos/ssdb.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace qpos::cli {

namespace {

using Rng = std::mt19937_64;

// Pass/fail accumulator that keeps the first counterexample.
class Tally {
 public:
  void expect(bool ok, const std::function<std::string()>& why) {
    ++evaluations_;
    if (ok) return;
    ++failures_;
    if (first_.empty()) first_ = why();
  }
  void note(std::string s) { note_ = std::move(s); }
  long evaluations() const { return evaluations_; }
  long failures() const { return failures_; }
  std::string detail() const {
    if (failures_ == 0) return note_;
    return std::to_string(failures_) + " failure(s); first: " + first_;
  }

 private:
  long evaluations_ = 0;
  long failures_ = 0;
  std::string first_;
  std::string note_;
};

std::string fmt(const Vector& v) {
  std::ostringstream s;
  s << std::setprecision(6) << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v(i);
  s << ")";
  return s.str();
}

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec1(double a) { return Vector::Constant(1, a); }

Vector uniform(Rng& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// ⟨x, x*⟩ coordinatewise: independent of the library's quadratic form.
double mq(const Vector& b) {
  const Eigen::Index k = b.size() / 2;
  double s = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) s += b(i) * b(k + i);
  return s;
}

// max over a of mq(x + a) − mq(x) − 2 mq(a), i.e. ⌊x, a⌋ − q(a).
double phi_oracle(const std::vector<Vector>& pts, const Vector& x) {
  double best = -kInf;
  for (const Vector& a : pts) best = std::max(best, mq(x + a) - mq(x) - 2.0 * mq(a));
  return best;
}

// Graph of x ↦ T x + c with T = LLᵀ + W (W skew): monotone.
std::vector<Vector> monotone_points(Rng& rng, int k, int m) {
  const Matrix l = Matrix(uniform(rng, k * k, -1.0, 1.0).reshaped(k, k));
  const Matrix w0 = Matrix(uniform(rng, k * k, -1.0, 1.0).reshaped(k, k));
  const Matrix t = l * l.transpose() + (w0 - w0.transpose());
  const Vector c = uniform(rng, k, -0.5, 0.5);
  std::vector<Vector> pts;
  for (int i = 0; i < m; ++i) {
    const Vector x = uniform(rng, k, -1.0, 1.0);
    Vector p(2 * k);
    p << x, t * x + c;
    pts.push_back(p);
  }
  return pts;
}

Vector convex_combination(Rng& rng, const std::vector<Vector>& pts) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(pts.size());
  double total = 0.0;
  for (double& x : w) total += (x = unit(rng));
  Vector b = Vector::Zero(pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) b += (w[i] / total) * pts[i];
  return b;
}

bool in_set(const PointSet& a, const Vector& b) {
  for (const Vector& p : a.points())
    if ((p - b).norm() == 0.0) return true;
  return false;
}

AffineSet monotone_line(double slope, double offset) {
  return AffineSet(make_monotone_space(1), vec2(0.0, offset), Matrix(vec2(1.0, slope)));
}

// Battery shared by the Fitzpatrick checks: 50 q-positive sets in the monotone
// model, B of dimension 2..8, 2..10 points, 200 probes each (half in conv A).
struct BatteryInstance {
  PointSet a;
  std::vector<Vector> probes;
  std::vector<bool> in_hull_by_construction;
};

std::vector<BatteryInstance> fitzpatrick_battery(std::uint64_t seed) {
  Rng rng(seed * 1000003ULL + 11);
  std::vector<BatteryInstance> out;
  for (int i = 0; i < 50; ++i) {
    const int k = 1 + i % 4;
    const int m = 2 + i % 9;
    PointSet a(make_monotone_space(k), monotone_points(rng, k, m));
    BatteryInstance inst{a, {}, {}};
    for (int j = 0; j < 200; ++j) {
      const bool inside = j % 2 == 0;
      inst.probes.push_back(inside ? convex_combination(rng, a.points())
                                   : uniform(rng, 2 * k, -1.5, 1.5));
      inst.in_hull_by_construction.push_back(inside);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

// ---- core ----------------------------------------------------------------

void core_quadratic_form(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 1);
  for (int i = 0; i < 2000; ++i) {
    const int k = 1 + i % 4;
    const SpacePtr s = make_monotone_space(k);
    const Vector b = uniform(rng, 2 * k, -3, 3), c = uniform(rng, 2 * k, -3, 3);
    const double q = q_value(*s, b);
    t.expect(std::abs(q - mq(b)) <= 1e-12 * (1.0 + std::abs(mq(b))),
             [&] { return "q" + fmt(b) + " = " + num(q) + ", oracle " + num(mq(b)); });
    t.expect(std::abs(pairing(*s, b, c) - pairing(*s, c, b)) <= 1e-12 * (1.0 + b.norm() * c.norm()),
             [&] { return "pairing not symmetric at " + fmt(b); });
    const double pol = q_value(*s, b + c) - q_value(*s, b) - q_value(*s, c) - pairing(*s, b, c);
    t.expect(std::abs(pol) <= 1e-10 * (1.0 + b.squaredNorm() + c.squaredNorm()),
             [&] { return "polarization residual " + num(pol) + " at " + fmt(b); });
  }
}

void core_q_positivity(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 2);
  for (int i = 0; i < 200; ++i) {
    const int k = 1 + i % 3;
    const PointSet a(make_monotone_space(k), monotone_points(rng, k, 2 + i % 6));
    t.expect(is_q_positive(a).holds(), [&] { return "monotone sample reported not q-positive"; });
    for (const Vector& p : a.points())
      t.expect(pi_member(a, p).holds(), [&] { return "point of A outside A^pi: " + fmt(p); });
    // A decreasing pair breaks q-positivity.
    const Vector x = uniform(rng, k, 0.2, 1.0);
    Vector p0 = Vector::Zero(2 * k), p1(2 * k);
    p1 << x, -x;
    const PointSet bad(make_monotone_space(k), {p0, p1});
    const Verdict v = is_q_positive(bad);
    t.expect(v.fails() && v.witness.size() == 2 && mq(v.witness[0] - v.witness[1]) < 0.0,
             [&] { return "decreasing pair " + fmt(p1) + " not refuted with a valid witness"; });
  }
}

void core_pi_oracle(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 3);
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + i % 3;
    const PointSet a(make_monotone_space(k), monotone_points(rng, k, 2 + i % 5));
    for (int j = 0; j < 20; ++j) {
      const Vector b = uniform(rng, 2 * k, -1.5, 1.5);
      double gap = kInf;
      for (const Vector& p : a.points()) gap = std::min(gap, mq(b - p));
      if (std::abs(gap) <= 1e-8) continue;
      t.expect(pi_member(a, b).holds() == (gap > 0.0),
               [&] { return "pi_member disagrees with the oracle at " + fmt(b); });
    }
  }
}

void core_kernels(std::uint64_t seed, Tally& t) {
#if defined(QPOS_HAVE_AVX2)
  if (!kernels::isa_available(kernels::Isa::kAvx2)) {
    t.note("AVX2 not available on this CPU; scalar path only");
    return;
  }
  Rng rng(seed * 7919 + 4);
  for (std::size_t n = 1; n <= 19; ++n)
    for (std::size_t m : {1u, 2u, 5u, 13u}) {
      const Vector a = uniform(rng, static_cast<Eigen::Index>(n), -2, 2);
      const Vector b = uniform(rng, static_cast<Eigen::Index>(n), -2, 2);
      const Matrix r = Matrix(uniform(rng, static_cast<Eigen::Index>(n * n), -1, 1)
                                  .reshaped(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
      const Matrix s = r + r.transpose();
      const Vector pts = uniform(rng, static_cast<Eigen::Index>(m * n), -2, 2);
      const Vector offs = uniform(rng, static_cast<Eigen::Index>(m), -1, 1);
      auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x)); };
      const double d0 = kernels::scalar::dot(a.data(), b.data(), n);
      const double d1 = kernels::avx2::dot(a.data(), b.data(), n);
      t.expect(close(d0, d1), [&] { return "dot differs at n=" + std::to_string(n); });
      const double q0 = kernels::scalar::bilinear(s.data(), a.data(), b.data(), n);
      const double q1 = kernels::avx2::bilinear(s.data(), a.data(), b.data(), n);
      t.expect(close(q0, q1), [&] { return "bilinear differs at n=" + std::to_string(n); });
      const auto m0 = kernels::scalar::max_affine(pts.data(), offs.data(), m, n, a.data());
      const auto m1 = kernels::avx2::max_affine(pts.data(), offs.data(), m, n, a.data());
      t.expect(close(m0.value, m1.value), [&] { return "max_affine differs at n=" + std::to_string(n); });
      const double g0 = kernels::scalar::min_quadratic_gap(s.data(), pts.data(), m, n, a.data());
      const double g1 = kernels::avx2::min_quadratic_gap(s.data(), pts.data(), m, n, a.data());
      t.expect(close(g0, g1), [&] { return "min_quadratic_gap differs at n=" + std::to_string(n); });
    }
#else
  (void)seed;
  t.note("built without AVX2 kernels; scalar path only");
#endif
}

void core_numerics(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 5);
  for (int i = 0; i < 200; ++i) {
    const int k = 1 + i % 4, m = 2 + i % 6;
    const Matrix cols = Matrix(uniform(rng, k * m, -1, 1).reshaped(k, m));
    const Vector costs = uniform(rng, m, -1, 1);
    Vector w = uniform(rng, m, 0.1, 1);
    w /= w.sum();
    const Vector target = cols * w;
    const LpSolution s = lp_min({costs, cols, target});
    t.expect(s.feasible && s.value <= costs.dot(w) + 1e-9,
             [&] { return "LP minimum above a feasible point's cost"; });
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) perm[static_cast<std::size_t>(j)] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix pc(k, m);
    Vector pcost(m);
    for (int j = 0; j < m; ++j) {
      pc.col(j) = cols.col(perm[static_cast<std::size_t>(j)]);
      pcost(j) = costs(perm[static_cast<std::size_t>(j)]);
    }
    const LpSolution sp = lp_min({pcost, pc, target});
    t.expect(sp.feasible && std::abs(sp.value - s.value) <= 1e-9 * (1.0 + std::abs(s.value)),
             [&] { return "LP value changes under column permutation"; });

    const int n = 2 + i % 4, d = 1 + i % n;
    const Matrix r = Matrix(uniform(rng, n * n, -1, 1).reshaped(n, n));
    const Matrix sym = r + r.transpose();
    const Matrix v = Matrix(uniform(rng, n * d, -1, 1).reshaped(n, d));
    const Matrix h = v.transpose() * sym * v;
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().minCoeff();
    if (std::abs(lmin) < 1e-6) continue;
    t.expect(psd_on_subspace(sym, v).holds() == (lmin > 0.0),
             [&] { return "psd_on_subspace disagrees with the eigenvalue oracle"; });
  }
}

// ---- fitzpatrick -----------------------------------------------------------

void fitz_conjugate_bounds(std::uint64_t seed, Tally& t) {
  for (const BatteryInstance& inst : fitzpatrick_battery(seed)) {
    const PointSet& a = inst.a;
    const MaxAffineFn phi = phi_build(a);
    for (const Vector& p : a.points()) {
      const double q = mq(p);
      t.expect(std::abs(phi(p) - q) <= 1e-8,
               [&] { return "Phi != q on A at " + fmt(p) + ": " + num(phi(p)) + " vs " + num(q); });
      const double c = conj_eval(phi, p).value;
      t.expect(std::abs(c - q) <= 1e-8,
               [&] { return "Phi^@ != q on A at " + fmt(p) + ": " + num(c) + " vs " + num(q); });
    }
    for (const Vector& b : inst.probes) {
      const ConjugateQuery c = conj_eval(phi, b);
      if (!c.finite()) continue;
      t.expect(phi(b) <= c.value + 1e-8, [&] { return "Phi > Phi^@ at " + fmt(b); });
      t.expect(mq(b) <= c.value + 1e-8, [&] { return "q > Phi^@ at " + fmt(b); });
    }
  }
}

void fitz_conjugate_domain(std::uint64_t seed, Tally& t) {
  for (const BatteryInstance& inst : fitzpatrick_battery(seed)) {
    const MaxAffineFn phi = phi_build(inst.a);
    for (std::size_t j = 0; j < inst.probes.size(); ++j) {
      const Vector& b = inst.probes[j];
      const bool finite = conj_eval(phi, b).finite();
      t.expect(finite == conv_w_hull_member(inst.a, b).holds(),
               [&] { return "conjugate domain and hull membership disagree at " + fmt(b); });
      if (inst.in_hull_by_construction[j])
        t.expect(finite, [&] { return "conjugate infinite at a convex combination " + fmt(b); });
    }
  }
}

void fitz_inclusion_chain(std::uint64_t seed, Tally& t) {
  for (const BatteryInstance& inst : fitzpatrick_battery(seed)) {
    const PointSet& a = inst.a;
    const MaxAffineFn phi = phi_build(a);
    std::vector<Vector> probes = a.points();
    for (std::size_t i = 0; i + 1 < a.size(); ++i) probes.push_back(0.5 * (a[i] + a[i + 1]));
    probes.insert(probes.end(), inst.probes.begin(), inst.probes.end());
    for (const Vector& b : probes) {
      const bool in_a = in_set(a, b);
      const bool repr = repr_hull_member(a, phi, b).holds();
      const bool g = g_phi_member(a, phi, b).holds();
      const bool pi = pi_member(a, b).holds();
      const bool hull = conv_w_hull_member(a, b).holds();
      t.expect(!in_a || repr, [&] { return "point of A outside P_q(Phi^@): " + fmt(b); });
      t.expect(!repr || g, [&] { return "P_q(Phi^@) not inside G_Phi at " + fmt(b); });
      t.expect(!g || (pi && hull), [&] { return "G_Phi not inside A^pi ∩ conv A at " + fmt(b); });
    }
  }
}

void fitz_mu_equivalence(std::uint64_t seed, Tally& t) {
  long compared = 0;
  Rng rng(seed * 7919 + 6);
  for (const BatteryInstance& inst : fitzpatrick_battery(seed)) {
    const PointSet& a = inst.a;
    std::vector<Vector> probes = inst.probes;
    // Perturbations of A points land on both sides of the boundary.
    for (std::size_t i = 0; i < 50; ++i)
      probes[2 * i + 1] = a[i % a.size()] + uniform(rng, a.space().dim(), -0.05, 0.05);
    for (const Vector& b : probes) {
      const double diff = phi_oracle(a.points(), b) - mq(b);
      double gap = kInf;
      for (const Vector& p : a.points()) gap = std::min(gap, mq(b - p));
      const bool pi = pi_member(a, b).holds();
      ++compared;
      if (std::abs(diff) > 1e-8)
        t.expect(pi == (diff < 0.0), [&] {
          return "pi_member = " + std::string(pi ? "HOLDS" : "FAILS") + " but Phi - q = " + num(diff) +
                 " at " + fmt(b);
        });
      if (std::abs(gap) > 1e-8)
        t.expect(pi == (gap > 0.0), [&] { return "pi_member disagrees with min q(b - a) at " + fmt(b); });
    }
  }
  t.note(std::to_string(compared) + " probe evaluations");
}

// ---- affine ---------------------------------------------------------------

void affine_pi_oracle(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 7);
  std::uniform_real_distribution<double> slope(0.2, 3.0);
  int in = 0, out = 0;
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + i % 2;
    // Direction (u, T u) with T positive semidefinite, so q(v) ≥ 0.
    const Vector u = uniform(rng, k, -1, 1);
    const Matrix l = Matrix(uniform(rng, k * k, -1, 1).reshaped(k, k));
    Vector v(2 * k);
    v << u, (l * l.transpose() + slope(rng) * Matrix::Identity(k, k)) * u;
    const Vector x0 = uniform(rng, 2 * k, -0.5, 0.5);
    const AffineSet a(make_monotone_space(k), x0, Matrix(v));
    const PiDescription d = affine_pi(a);
    const double qv = mq(v);
    for (int j = 0; j < 50; ++j) {
      const Vector b = x0 + uniform(rng, 2 * k, -1.0, 1.0);
      const Vector r = b - x0;
      // inf over τ of q(r − τ v) = q(r) − ⌊r, v⌋² / (4 q(v)), with ⌊r, v⌋ = mq(r + v) − mq(r) − mq(v).
      const double cross = mq(r + v) - mq(r) - qv;
      const double inf = mq(r) - cross * cross / (4.0 * qv);
      if (std::abs(inf) <= 1e-6) continue;
      const bool member = d.contains(b);
      (inf > 0 ? in : out)++;
      t.expect(member == (inf > 0.0), [&] {
        return "exact A^pi membership " + std::string(member ? "true" : "false") + " but inf q = " +
               num(inf) + " at " + fmt(b);
      });
    }
  }
  t.expect(in >= 100 && out >= 100, [&] {
    return "unbalanced probes: " + std::to_string(in) + " inside, " + std::to_string(out) + " outside";
  });
}

void affine_maximality(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 8);
  std::uniform_real_distribution<double> slope(0.1, 5.0), off(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double s = slope(rng), c = off(rng);
    const AffineSet up = monotone_line(s, c);
    t.expect(affine_is_q_positive(up).holds(), [&] { return "increasing line not q-positive"; });
    t.expect(affine_is_maximal(up).holds(), [&] { return "increasing line not maximal, slope " + num(s); });
    const AffineSet down = monotone_line(-s, c);
    t.expect(affine_is_q_positive(down).fails(), [&] { return "decreasing line q-positive, slope " + num(-s); });
  }
  const SpacePtr m1 = make_monotone_space(1);
  t.expect(affine_is_maximal(AffineSet::singleton(m1, vec2(0, 0))).fails(),
           [&] { return "singleton reported maximal"; });
  t.expect(affine_is_maximal(monotone_line(0.0, 0.0)).holds(), [&] { return "horizontal line not maximal"; });
}

// ---- maximality -----------------------------------------------------------

void max_third_polar(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 9);
  const std::vector<Vector> probes = BoxGrid::cube(2, 2.0, 0.1).points();
  for (int i = 0; i < 20; ++i) {
    const PointSet a(make_monotone_space(1), monotone_points(rng, 1, 1 + i % 5));
    const Verdict v = third_polar_check(a, probes, 0.1);
    t.expect(v.holds(), [&] { return "third polar net differs for instance " + std::to_string(i) + ": " + v.note; });
  }
}

void max_extension_continuum(std::uint64_t, Tally& t) {
  const PointSet p(make_monotone_space(1), {vec2(0, 0)});
  const ExtensionFamily f = extension_continuum(p, vec2(1, 0), vec2(0, 1), 101);
  t.expect(f.verified.holds() && f.points.size() == 101,
           [&] { return "family not verified: " + f.verified.note; });
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const double l = f.lambdas[i];
    t.expect(std::abs(mq(f.points[i]) - l * (1 - l)) <= 1e-12,
             [&] { return "q(x_lambda) wrong at lambda " + num(l); });
    const PointSet ext = p.with_point(f.points[i]);
    t.expect(is_q_positive(ext).holds(), [&] { return "P ∪ {x_lambda} not q-positive at " + num(l); });
    for (std::size_t j = 0; j < i; ++j) {
      const double d = f.lambdas[i] - f.lambdas[j];
      t.expect(std::abs(mq(f.points[i] - f.points[j]) + d * d) <= 1e-12,
               [&] { return "pairwise identity fails at " + num(l); });
    }
  }
}

void max_premax_trichotomy(std::uint64_t, Tally& t) {
  const PremaxReport id = premax_certify(monotone_line(1.0, 0.0), BoxGrid::cube(2, 3.0, 0.05));
  t.expect(id.classification == PremaxClass::kViaPhiDominance && id.phi_dominates_q.grid_certified,
           [&] { return "identity graph: " + std::string(to_string(id.classification)); });

  const AffineSet h = monotone_line(0.0, 0.0);
  const PremaxReport hr = premax_certify(h, BoxGrid::cube(2, 2.0, 0.1));
  t.expect(hr.classification == PremaxClass::kViaAffinePi,
           [&] { return "horizontal line: " + std::string(to_string(hr.classification)); });
  t.expect(hr.phi_domain.has_value() && same_affine_set(*hr.phi_domain, h) && hr.domain_is_pi.holds(),
           [&] { return "horizontal line: dom Phi_P != P"; });

  const PremaxReport o = premax_certify(PointSet(make_monotone_space(1), {vec2(0, 0)}), BoxGrid::cube(2, 2.0, 0.1));
  t.expect(o.classification == PremaxClass::kNotPremaximal,
           [&] { return "origin: " + std::string(to_string(o.classification)); });
  const std::vector<Vector>& w = o.pi_positive.witness;
  t.expect(w.size() == 2 && mq(w[0]) >= -1e-9 && mq(w[1]) >= -1e-9 && mq(w[0] - w[1]) < -1e-9,
           [&] { return "origin: witness pair invalid"; });
}

void max_ni_equivalence(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 10);
  const BoxGrid box = BoxGrid::cube(2, 2.0, 0.1);
  for (int i = 0; i < 20; ++i) {
    const PointSet a(make_monotone_space(1), monotone_points(rng, 1, 1 + i % 6));
    const NiReport r = ni_type_check(a, box);
    t.expect(r.agree && r.ni.status == r.phi_dominates_q.status, [&] {
      return "instance " + std::to_string(i) + ": NI " + std::string(to_string(r.ni.status)) + ", Phi >= q " +
             std::string(to_string(r.phi_dominates_q.status));
    });
  }
  const NiReport id = ni_type_check(monotone_line(1.0, 0.0), box);
  t.expect(id.agree && id.ni.holds(), [&] { return "identity line: NI not HOLDS"; });
}

// ---- minimal --------------------------------------------------------------

void min_fund_ineq(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 11);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int draw = 0; draw < 10000; ++draw) {
    const int n = 1 + draw % 6, m = 1 + draw % 8;
    const Matrix r = Matrix(uniform(rng, n * n, -1, 1).reshaped(n, n));
    const Matrix s = r + r.transpose() + 0.1 * Matrix::Identity(n, n);
    const RowMatrix slopes = RowMatrix(uniform(rng, m * n, -2, 2).reshaped<Eigen::RowMajor>(m, n));
    const MaxAffineFn f(make_space(s), slopes, uniform(rng, m, -1, 1));
    const Vector x = uniform(rng, n, -2, 2);
    Vector y = uniform(rng, n, -2, 2);
    if (draw % 2 == 0) {
      Vector w = uniform(rng, m, 0, 1);
      w /= w.sum();
      const Eigen::FullPivLU<Matrix> lu(s);
      if (lu.isInvertible()) y = lu.solve(Vector(slopes.transpose() * w));
    }
    const double alpha = unit(rng);
    const Verdict v = fund_ineq_check(f, x, y, alpha);
    t.expect(v.holds(), [&] { return "violation " + num(v.value) + " at draw " + std::to_string(draw); });
  }
}

void min_envelope(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 12);
  std::uniform_real_distribution<double> slope(0.5, 2.0), off(-0.5, 0.5), pos(-1.0, 1.0);
  const BoxGrid box = BoxGrid::cube(2, 2.0, 0.1);
  for (int i = 0; i < 10; ++i) {
    const double s = slope(rng), c = off(rng);
    const ConvexFunction f = phi_affine_function(monotone_line(s, c));
    const double x0 = pos(rng);
    const Vector x = vec2(x0, s * x0 + c);
    const EnvelopeQuery e = make_envelope(f, x, box);
    t.expect(std::isfinite(e.cap) && envelope_eval(e, x) <= e.cap + 1e-9,
             [&] { return "spike value above the cap for f " + std::to_string(i); });
    for (int j = 0; j < 100; ++j) {
      const Vector y = uniform(rng, 2, -2, 2);
      const double h = envelope_eval(e, y), fy = f.value(y);
      t.expect(h <= fy + 1e-12, [&] { return "h > f at " + fmt(y); });
      t.expect(fy >= mq(y) - 1e-8, [&] { return "f < q at " + fmt(y); });
      t.expect(h >= mq(y) - 1e-8, [&] { return "h < q at " + fmt(y) + ": " + num(h) + " vs " + num(mq(y)); });
    }
  }
}

void min_convmin(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 13);
  std::vector<Vector> probes;
  for (int i = 0; i < 200; ++i) probes.push_back(uniform(rng, 2, -1.5, 1.5));
  const ConvexFunction f = phi_affine_function(monotone_line(1.0, 0.0));
  const BoxGrid box = BoxGrid::cube(2, 2.0, 0.1);
  const Verdict v = convmin_check(f, probes, box);
  t.expect(v.holds() && v.grid_certified, [&] { return "convmin below q: " + v.note; });
  // Independent spot check: conv min{f, f^@} ≥ q at each probe.
  for (const Vector& p : {vec2(1, 1), vec2(-0.5, 0.7), vec2(1.2, -1.1)}) {
    const ConvMinValue cm = convmin_eval(f, p, box);
    t.expect(cm.value >= mq(p) - 1e-6, [&] { return "convmin < q at " + fmt(p); });
  }
}

// ---- ssdb -----------------------------------------------------------------

void ssdb_isometry(std::uint64_t seed, Tally& t) {
  for (int k = 1; k <= 5; ++k) {
    const SsdbSpace m = make_monotone_ssdb(k);
    t.expect(m.isometry_residual() < 1e-10, [&] { return "residual " + num(m.isometry_residual()); });
    const double r = isometry_sample_residual(m, 200, static_cast<unsigned>(seed + k));
    t.expect(r < 1e-10, [&] { return "sampled residual " + num(r) + " at k=" + std::to_string(k); });
  }
}

void ssdb_decomposition(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 14);
  const SsdbSpace m = make_monotone_ssdb(1);
  const AffineSet id(m.base_ptr(), Vector::Zero(2), Matrix(vec2(1, 1)));
  for (int i = 0; i < 1000; ++i) {
    const Vector x = uniform(rng, 2, -5, 5);
    const SumDecomposition d = decompose_sum(m, id, x);
    const double s = 0.5 * (x(0) + x(1)), r = 0.5 * (x(0) - x(1));
    t.expect(d.residual < 1e-10 && (d.a + d.c - x).norm() < 1e-10, [&] { return "a + c != x at " + fmt(x); });
    t.expect((d.a - vec2(s, s)).norm() <= 1e-10 && (d.c - vec2(r, -r)).norm() <= 1e-10,
             [&] { return "closed form not reproduced at " + fmt(x); });
    t.expect(pq_g0_member(m, d.c, Sign::kMinus).holds(), [&] { return "c outside P_{-q}(g0) at " + fmt(x); });
  }
}

void ssdb_pq_sum(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 15);
  for (int k = 1; k <= 3; ++k) {
    const SsdbSpace m = make_monotone_ssdb(k);
    const AffineSet plus = pq_g0_set(m, Sign::kPlus);
    for (int i = 0; i < 100; ++i) {
      const Vector x = uniform(rng, 2 * k, -3, 3);
      const SumDecomposition d = decompose_sum(m, plus, x);
      t.expect((d.a + d.c - x).norm() < 1e-10, [&] { return "a + c != x at " + fmt(x); });
      t.expect(pq_g0_member(m, d.a, Sign::kPlus).holds() && pq_g0_member(m, d.c, Sign::kMinus).holds(),
               [&] { return "summands outside P_{±q}(g0) at " + fmt(x); });
      // On P_q(g0): q = g0, i.e. ⟨x, x*⟩ = ½‖(x, x*)‖².
      t.expect(std::abs(mq(d.a) - 0.5 * d.a.squaredNorm()) <= 1e-9,
               [&] { return "q != g0 on the plus summand at " + fmt(x); });
      t.expect(std::abs(mq(d.c) + 0.5 * d.c.squaredNorm()) <= 1e-9,
               [&] { return "-q != g0 on the minus summand at " + fmt(x); });
    }
  }
}

// ---- lipschitz ------------------------------------------------------------

void lip_equivalence(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 16);
  std::uniform_real_distribution<double> kd(0.5, 2.0);
  int pass = 0, fail = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n1 = 1 + trial % 3, n2 = 1 + (trial / 3) % 2, m = 2 + trial % 5;
    const double k = kd(rng);
    std::vector<Vector> d, v;
    for (int i = 0; i < m; ++i) {
      d.push_back(uniform(rng, n1, -1, 1));
      v.push_back(uniform(rng, n2, -0.4 * k, 0.4 * k));
    }
    bool oracle = true;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if ((v[i] - v[j]).squaredNorm() > k * k * (d[i] - d[j]).squaredNorm() + 2e-9) oracle = false;
    const GraphSet g(LipschitzSpace(k, n1, n2), d, v);
    (oracle ? pass : fail)++;
    t.expect(lipschitz_check(g).holds() == oracle, [&] { return "lipschitz_check disagrees, trial " + std::to_string(trial); });
    t.expect(is_q_positive(g.points()).holds() == oracle,
             [&] { return "is_q_positive disagrees, trial " + std::to_string(trial); });
  }
  t.expect(pass >= 100 && fail >= 100, [&] { return "unbalanced graphs"; });
}

void lip_phi_graph(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 17);
  std::uniform_real_distribution<double> kd(0.5, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n1 = 1 + trial % 3, n2 = 1 + trial % 2;
    const double k = kd(rng);
    std::vector<Vector> d, v;
    for (int i = 0; i < 4; ++i) {
      d.push_back(uniform(rng, n1, -1, 1));
      v.push_back(uniform(rng, n2, -1, 1));
    }
    const GraphSet g(LipschitzSpace(k, n1, n2), d, v);
    const MaxAffineFn phi = phi_build(g.points());
    for (int i = 0; i < 20; ++i) {
      const Vector x1 = uniform(rng, n1, -2, 2), x2 = uniform(rng, n2, -2, 2);
      const double a = phi_graph_eval(g, x1, x2), b = phi(g.lspace().join(x1, x2));
      // Oracle: max over i of K²⟨x1, d_i⟩ − ⟨x2, v_i⟩ − ½(K²‖d_i‖² − ‖v_i‖²).
      double o = -kInf;
      for (std::size_t j = 0; j < d.size(); ++j)
        o = std::max(o, k * k * x1.dot(d[j]) - x2.dot(v[j]) -
                            0.5 * (k * k * d[j].squaredNorm() - v[j].squaredNorm()));
      t.expect(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)), [&] { return "closed form differs from phi_build"; });
      t.expect(std::abs(a - o) <= 1e-10 * (1.0 + std::abs(o)), [&] { return "closed form differs from the oracle"; });
    }
  }
}

void lip_identity_example(std::uint64_t, Tally& t) {
  std::vector<double> ts;
  for (int i = 0; i <= 20; ++i) ts.push_back(i / 20.0);
  const Verdict v = identity_example_check(ts, {vec2(2, 2), vec2(-0.5, -0.5), vec2(0.5, 0.6)});
  t.expect(v.holds(), [&] { return v.note; });
  const LipschitzSpace ls(1.0, 1, 1);
  const PointSet a(ls.space(), {vec2(0, 0), vec2(1, 1)});
  for (double s : ts)
    t.expect(repr_hull_member(a, vec2(s, s)).holds(), [&] { return "(t,t) not representable at t=" + num(s); });
  for (const Vector& b : {vec2(2, 2), vec2(-0.5, -0.5), vec2(0.5, 0.6)})
    t.expect(repr_hull_member(a, b).fails(), [&] { return "off-probe representable: " + fmt(b); });
}

// ---- hilbert --------------------------------------------------------------

void hil_closed_formula(std::uint64_t seed, Tally& t) {
  Rng rng(seed * 7919 + 18);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + trial % 3;
    std::vector<Vector> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(uniform(rng, k, -1, 1));
    const auto a = ClosedSetDescriptor::finite(pts);
    const MaxAffineFn phi = phi_build(PointSet(a.space(), pts));
    for (int i = 0; i < 100; ++i) {
      const Vector x = uniform(rng, k, -2, 2);
      double d2 = kInf;
      for (const Vector& p : pts) d2 = std::min(d2, (x - p).squaredNorm());
      const double oracle = 0.5 * x.squaredNorm() - 0.5 * d2;
      t.expect(std::abs(phi_closed_eval(a, x) - phi(x)) <= 1e-10, [&] { return "closed form != phi_build at " + fmt(x); });
      t.expect(std::abs(phi(x) - oracle) <= 1e-10, [&] { return "phi_build != distance oracle at " + fmt(x); });
    }
  }
}

void hil_two_points(std::uint64_t, Tally& t) {
  const auto a = ClosedSetDescriptor::finite({vec1(-1), vec1(1)});
  const BoxGrid g(vec1(-1), vec1(1), 0.01);
  const double phi0 = phi_closed_eval(a, vec1(0));
  t.expect(std::abs(phi0 + 0.5) <= 1e-6, [&] { return "Phi_A(0) = " + num(phi0); });
  const double conj0 = phi_conj_closed_eval(a, vec1(0), g).value;
  t.expect(std::abs(conj0 - 0.5) <= 1e-6, [&] { return "Phi_A^@(0) = " + num(conj0); });
  t.expect(g_phi_closed_member(a, vec1(0), g).holds(), [&] { return "0 not in G_Phi_A"; });
  t.expect(midpoint_ball_check(a, vec1(-1), vec1(1)).fails(), [&] { return "midpoint ball meets A"; });
}

void hil_cross(std::uint64_t, Tally& t) {
  const auto cross = ClosedSetDescriptor::axis_cross();
  const BoxGrid probe(vec2(-2, -2), vec2(2, 2), 0.1);
  const BoxGrid inner = BoxGrid::cube(2, 1, 0.1);
  long count = 0;
  probe.for_each_point([&](const Vector& x) {
    ++count;
    const bool in_a = std::min(std::abs(x(0)), std::abs(x(1))) <= 1e-3;
    t.expect(g_phi_closed_member(cross, x, inner).holds() == in_a, [&] { return "misclassified " + fmt(x); });
  });
  t.expect(count == 41 * 41, [&] { return "grid has " + std::to_string(count) + " points"; });
}

void hil_line_corollary(std::uint64_t, Tally& t) {
  std::vector<double> net;
  for (int i = -10; i <= 40; ++i) net.push_back(0.1 * i);
  const BoxGrid g(vec1(-1), vec1(1), 0.02);
  const Verdict unit = line_corollary_check({{0.0, 1.0}}, net, g);
  t.expect(unit.holds() && unit.value == 0.0, [&] { return "[0,1]: " + unit.note; });
  const Verdict pts = line_corollary_check({{-1.0, -1.0}, {1.0, 1.0}}, net, g);
  t.expect(pts.holds() && pts.value >= 1.0, [&] { return "{-1,1}: " + pts.note; });
  const Verdict two = line_corollary_check({{0.0, 1.0}, {2.0, 3.0}}, net, g);
  t.expect(two.holds() && two.value >= 1.0, [&] { return "[0,1]∪[2,3]: " + two.note; });
}

struct CheckDef {
  const char* suite;
  const char* name;
  void (*fn)(std::uint64_t, Tally&);
};

const std::vector<CheckDef>& registry() {
  static const std::vector<CheckDef> defs = {
      {"core", "quadratic_form_oracle", core_quadratic_form},
      {"core", "q_positivity", core_q_positivity},
      {"core", "pi_member_oracle", core_pi_oracle},
      {"core", "kernel_equivalence", core_kernels},
      {"core", "numerics", core_numerics},
      {"fitzpatrick", "conjugate_bounds", fitz_conjugate_bounds},
      {"fitzpatrick", "conjugate_domain", fitz_conjugate_domain},
      {"fitzpatrick", "inclusion_chain", fitz_inclusion_chain},
      {"fitzpatrick", "pi_phi_equivalence", fitz_mu_equivalence},
      {"affine", "pi_exact_vs_oracle", affine_pi_oracle},
      {"affine", "line_maximality", affine_maximality},
      {"maximality", "third_polar_nets", max_third_polar},
      {"maximality", "extension_continuum", max_extension_continuum},
      {"maximality", "premax_trichotomy", max_premax_trichotomy},
      {"maximality", "ni_equivalence", max_ni_equivalence},
      {"minimal", "fundamental_inequality", min_fund_ineq},
      {"minimal", "envelope_sandwich", min_envelope},
      {"minimal", "convmin_identity", min_convmin},
      {"ssdb", "isometry", ssdb_isometry},
      {"ssdb", "decomposition", ssdb_decomposition},
      {"ssdb", "pq_sum", ssdb_pq_sum},
      {"lipschitz", "graph_equivalence", lip_equivalence},
      {"lipschitz", "phi_graph_closed_form", lip_phi_graph},
      {"lipschitz", "identity_example", lip_identity_example},
      {"hilbert", "closed_formula", hil_closed_formula},
      {"hilbert", "two_point_values", hil_two_points},
      {"hilbert", "axis_cross", hil_cross},
      {"hilbert", "line_corollary", hil_line_corollary},
  };
  return defs;
}

}  // namespace

int SuiteReport::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; }));
}

int SuiteReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

std::vector<std::string> suite_names() {
  return {"core", "fitzpatrick", "affine", "maximality", "minimal", "ssdb", "lipschitz", "hilbert", "all"};
}

bool is_known_suite(const std::string& name) {
  const auto names = suite_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (!is_known_suite(name)) throw ScenarioError("unknown suite \"" + name + "\"");
  SuiteReport report;
  report.name = name;
  report.seed = seed;
  for (const CheckDef& def : registry()) {
    if (name != "all" && name != def.suite) continue;
    CheckResult r;
    r.suite = def.suite;
    r.name = def.name;
    Tally t;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      def.fn(seed, t);
      r.passed = t.failures() == 0;
      r.detail = t.detail();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    r.evaluations = t.evaluations();
    report.checks.push_back(std::move(r));
  }
  return report;
}

int run_suite_cli(const std::string& name, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  if (!is_known_suite(name)) {
    err << "error: unknown suite \"" << name << "\" (known:";
    for (const std::string& n : suite_names()) err << " " << n;
    err << ")\n";
    return 2;
  }
  const SuiteReport r = run_suite(name, seed);
  for (const CheckResult& c : r.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.suite << "." << c.name << " [" << c.evaluations
        << " checks, " << std::fixed << std::setprecision(1) << c.wall_ms << " ms]";
    out.unsetf(std::ios::fixed);
    if (!c.detail.empty()) out << " " << c.detail;
    out << "\n";
  }
  out << "suite " << name << " seed " << seed << ": " << r.passed() << " passed, " << r.failed()
      << " failed\n";
  return r.failed() == 0 ? 0 : 1;
}

}  // namespace qpos::cli
