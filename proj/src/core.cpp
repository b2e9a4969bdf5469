#include "qpos/core.hpp"

#include "qpos/kernels.hpp"
#include "qpos/numerics.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace qpos {

namespace {

std::atomic<bool> g_flip{false};

std::span<const double> span_of(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::span<const double> span_of(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

namespace testing {
void set_q_sign_flip(bool on) { g_flip.store(on); }
bool q_sign_flipped() { return g_flip.load(std::memory_order_relaxed); }
}  // namespace testing

SsdSpace::SsdSpace(Matrix s) : s_(std::move(s)) {
  if (s_.rows() == 0 || s_.rows() != s_.cols()) throw ArgumentError("form matrix must be square");
  if (!s_.allFinite()) throw ArgumentError("form matrix must be finite");
  for (Eigen::Index i = 0; i < s_.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (s_(i, j) != s_(j, i)) throw ArgumentError("form matrix must be exactly symmetric");
  neg_s_ = -s_;
  const SymmetricEigen eig = jacobi_eigen(s_);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  degenerate_ = eig.values.cwiseAbs().minCoeff() < 1e-10 * scale;
}

double SsdSpace::pairing(const Vector& b, const Vector& c) const {
  require_dim(b, dim(), "pairing");
  require_dim(c, dim(), "pairing");
  return kernels::bilinear(span_of(s_), span_of(b), span_of(c));
}

double SsdSpace::q(const Vector& b) const {
  require_dim(b, dim(), "q_value");
  const double v = 0.5 * kernels::bilinear(span_of(s_), span_of(b), span_of(b));
  return testing::q_sign_flipped() ? -v : v;
}

Vector SsdSpace::apply(const Vector& b) const {
  require_dim(b, dim(), "apply");
  return s_ * b;
}

double SsdSpace::min_q_gap(std::span<const double> points, const Vector& x) const {
  require_dim(x, dim(), "min_q_gap");
  const Matrix& s = testing::q_sign_flipped() ? neg_s_ : s_;
  return kernels::min_quadratic_gap(span_of(s), points, span_of(x));
}

SpacePtr make_space(Matrix s) { return std::make_shared<const SsdSpace>(std::move(s)); }

SpacePtr make_monotone_space(int k) {
  if (k <= 0) throw ArgumentError("monotone model needs k ≥ 1");
  Matrix s = Matrix::Zero(2 * k, 2 * k);
  s.topRightCorner(k, k).setIdentity();
  s.bottomLeftCorner(k, k).setIdentity();
  return make_space(std::move(s));
}

PointSet::PointSet(SpacePtr space, std::vector<Vector> points)
    : space_(std::move(space)), points_(std::move(points)) {
  if (!space_) throw ArgumentError("point set needs a space");
  if (points_.empty()) throw ArgumentError("point set must be nonempty");
  const Eigen::Index n = space_->dim();
  for (const Vector& p : points_) require_dim(p, n, "point set");
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if ((points_[i] - points_[j]).norm() <= 1e-12)
        throw ArgumentError("duplicate points at indices " + std::to_string(j) + " and " +
                            std::to_string(i));
  packed_.reserve(points_.size() * static_cast<std::size_t>(n));
  for (const Vector& p : points_) packed_.insert(packed_.end(), p.data(), p.data() + n);
}

PointSet PointSet::with_point(const Vector& p) const {
  std::vector<Vector> pts = points_;
  pts.push_back(p);
  return PointSet(space_, std::move(pts));
}

double pairing(const SsdSpace& space, const Vector& b, const Vector& c) {
  return space.pairing(b, c);
}

double q_value(const SsdSpace& space, const Vector& b) { return space.q(b); }

Verdict is_q_positive(const PointSet& a) {
  const double eps = tolerance();
  const SsdSpace& sp = a.space();
  double worst = kInf;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double v = sp.q(a[i] - a[j]);
      if (v < worst) {
        worst = v;
        wi = i;
        wj = j;
      }
    }
  }
  if (a.size() < 2 || worst >= -eps) {
    Verdict v = Verdict::Holds();
    v.value = a.size() < 2 ? 0.0 : worst;
    return v;
  }
  Verdict v = Verdict::Fails({a[wi], a[wj]}, "q(a_i - a_j) < 0");
  v.value = worst;
  return v;
}

Verdict pi_member(const PointSet& a, const Vector& b) {
  require_dim(b, a.space().dim(), "pi_member");
  const double eps = tolerance();
  const SsdSpace& sp = a.space();
  double worst = kInf;
  std::size_t wi = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = sp.q(b - a[i]);
    if (v < worst) {
      worst = v;
      wi = i;
    }
  }
  if (worst >= -eps) {
    Verdict v = Verdict::Holds();
    v.value = worst;
    return v;
  }
  Verdict v = Verdict::Fails({a[wi]}, "q(b - a) < 0");
  v.value = worst;
  return v;
}

Verdict conv_w_hull_member(const PointSet& a, const Vector& b) {
  const SsdSpace& sp = a.space();
  require_dim(b, sp.dim(), "conv_w_hull_member");
  if (sp.form().isZero(0.0)) return Verdict::Holds("w(B,B) is indiscrete");
  SimplexLp lp;
  lp.costs = Vector::Zero(static_cast<Eigen::Index>(a.size()));
  lp.moments.resize(sp.dim(), static_cast<Eigen::Index>(a.size()));
  if (sp.degenerate()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      lp.moments.col(static_cast<Eigen::Index>(i)) = sp.apply(a[i]);
    lp.target = sp.apply(b);
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) lp.moments.col(static_cast<Eigen::Index>(i)) = a[i];
    lp.target = b;
  }
  const LpSolution sol = lp_min(lp);
  if (sol.feasible) {
    Verdict v = Verdict::Holds(sp.degenerate() ? "S b in S conv A" : "b in conv A");
    v.witness.clear();
    return v;
  }
  return Verdict::Fails({b}, "outside the w(B,B)-closed convex hull");
}

}  // namespace qpos
