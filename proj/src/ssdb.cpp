#include "qpos/ssdb.hpp"

#include "qpos/numerics.hpp"

#include <cmath>
#include <random>

namespace qpos {

SsdbSpace::SsdbSpace(SpacePtr base, Matrix norm, std::string kind)
    : base_(std::move(base)), g_(std::move(norm)), kind_(std::move(kind)) {
  if (!base_) throw ArgumentError("SSDB space needs a base space");
  const Eigen::Index n = base_->dim();
  if (g_.rows() != n || g_.cols() != n) throw ArgumentError("norm matrix must be n×n");
  if (!g_.isApprox(g_.transpose(), 1e-14)) throw ArgumentError("norm matrix must be symmetric");
  Eigen::LLT<Matrix> llt(g_);
  if (llt.info() != Eigen::Success) throw ArgumentError("norm matrix must be positive definite");
  g_inv_ = llt.solve(Matrix::Identity(n, n));
  const Matrix& s = base_->form();
  residual_ = (s * g_inv_ * s - g_).cwiseAbs().maxCoeff();
  if (residual_ > 1e-8)
    throw PreconditionError("b -> S b is not an isometry for this norm (S G^-1 S != G)");
}

double SsdbSpace::norm(const Vector& b) const {
  require_dim(b, dim(), "norm");
  return std::sqrt(b.dot(g_ * b));
}

double SsdbSpace::dual_norm(const Vector& b_star) const {
  require_dim(b_star, dim(), "dual norm");
  return std::sqrt(b_star.dot(g_inv_ * b_star));
}

SsdbSpace make_monotone_ssdb(int k) {
  if (k < 1) throw ArgumentError("monotone model needs k >= 1");
  return SsdbSpace(make_monotone_space(k), Matrix::Identity(2 * k, 2 * k), "monotone");
}

SsdbSpace make_hilbert_ssdb(int k) {
  if (k < 1) throw ArgumentError("Hilbert model needs k >= 1");
  return SsdbSpace(make_space(Matrix::Identity(k, k)), Matrix::Identity(k, k), "hilbert");
}

SsdbSpace make_lipschitz_ssdb(int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw ArgumentError("Lipschitz model needs n1, n2 >= 1");
  Vector d(n1 + n2);
  d.head(n1).setOnes();
  d.tail(n2).setConstant(-1.0);
  return SsdbSpace(make_space(d.asDiagonal()), Matrix::Identity(n1 + n2, n1 + n2), "lipschitz");
}

double isometry_sample_residual(const SsdbSpace& space, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Vector b(space.dim());
    for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = normal(rng);
    worst = std::max(worst, std::abs(space.dual_norm(space.base().apply(b)) - space.norm(b)));
  }
  return worst;
}

double g0(const SsdbSpace& space, const Vector& b) {
  const double n = space.norm(b);
  return 0.5 * n * n;
}

double g0_conjugate(const SsdbSpace& space, const Vector& b) {
  const double n = space.dual_norm(space.base().apply(b));
  return 0.5 * n * n;
}

ConvexFunction g0_function(const SsdbSpace& space) {
  ConvexFunction out;
  out.space = space.base_ptr();
  out.value = [space](const Vector& b) { return g0(space, b); };
  out.conjugate = [space](const Vector& b) { return g0_conjugate(space, b); };
  out.label = "g0";
  return out;
}

MaxAffineFn g0_tangent_minorant(const SsdbSpace& space, const BoxGrid& nodes) {
  if (nodes.dim() != space.dim()) throw ArgumentError("g0_tangent_minorant: box dimension");
  const std::vector<Vector> pts = nodes.points();
  RowMatrix slopes(static_cast<Eigen::Index>(pts.size()), space.dim());
  Vector offsets(static_cast<Eigen::Index>(pts.size()));
  // g₀(c) + (Gc)ᵀ(x − c) = (Gc)ᵀx − g₀(c)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    slopes.row(r) = (space.norm_matrix() * pts[i]).transpose();
    offsets(r) = g0(space, pts[i]);
  }
  return MaxAffineFn(space.base_ptr(), std::move(slopes), std::move(offsets));
}

Verdict pq_g0_member(const SsdbSpace& space, const Vector& b, Sign sign) {
  const double qb = space.base().q(b);
  const double gap = g0(space, b) - (sign == Sign::kPlus ? qb : -qb);
  Verdict v = std::abs(gap) <= tolerance() ? Verdict::Holds()
                                           : Verdict::Fails({b}, "g0(b) != sign * q(b)");
  v.value = gap;
  return v;
}

AffineSet pq_g0_set(const SsdbSpace& space, Sign sign) {
  const Matrix& s = space.base().form();
  const Matrix m = sign == Sign::kPlus ? Matrix(space.norm_matrix() - s)
                                       : Matrix(space.norm_matrix() + s);
  return AffineSet(space.base_ptr(), Vector::Zero(space.dim()), symmetric_kernel(m, 1e-10));
}

SumDecomposition decompose_sum(const SsdbSpace& space, const AffineSet& a, const Vector& x) {
  require_dim(x, space.dim(), "decompose_sum");
  if (a.space().form() != space.base().form())
    throw ArgumentError("decompose_sum: set lives in a different space");
  if (!affine_is_maximal(a).holds())
    throw PreconditionError("decompose_sum: A is not maximally q-positive");
  const Matrix& v = a.basis();
  const Matrix w = pq_g0_set(space, Sign::kMinus).basis();
  const Eigen::Index n = space.dim();
  if (v.cols() + w.cols() != n)
    throw InternalError("decompose_sum: dimensions of A and C do not add up");
  Matrix joint(n, n);
  joint << v, w;
  const Eigen::ColPivHouseholderQR<Matrix> qr(joint);
  if (qr.rank() < n) throw InternalError("decompose_sum: singular joint system");
  const Vector ts = qr.solve(x - a.anchor());
  SumDecomposition out;
  out.a = a.anchor() + v * ts.head(v.cols());
  out.c = w * ts.tail(w.cols());
  out.residual = (out.a + out.c - x).norm();
  return out;
}

Verdict maximality_via_decomposition(const SsdbSpace& space, const PointSet& a, const Vector& p,
                                     const std::vector<Vector>& probes) {
  require_dim(p, space.dim(), "maximality_via_decomposition");
  if (probes.empty()) return Verdict::Undecided(std::nullopt, "no probes");
  const Matrix w = pq_g0_set(space, Sign::kMinus).basis();
  const Eigen::Index n = space.dim();
  // Rows of nt span range(W)^⊥; y ∈ conv A with y ≡ x mod range(W) is an LP.
  const Matrix nt = w.cols() == 0 ? Matrix(Matrix::Identity(n, n))
                                  : Matrix(symmetric_kernel(w * w.transpose(), 1e-10).transpose());
  Matrix cols(n, static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = a[i];
  int in_pi = 0, forced = 0;
  for (const Vector& x : probes) {
    require_dim(x, n, "maximality_via_decomposition probe");
    if (!pi_member(a, x).holds()) continue;
    ++in_pi;
    SimplexLp lp;
    lp.costs = Vector::Zero(cols.cols());
    lp.moments = nt * cols;
    lp.target = nt * x;
    const LpSolution sol = lp_min(lp);
    if (!sol.feasible)
      return Verdict::Fails({x}, "probe in A^pi admits no decomposition x + p = y + z");
    const Vector y = cols * sol.weights;
    const Vector z = p + (x - y);
    if ((z - p).norm() > 1e-8 * (1.0 + x.norm()))
      return Verdict::Fails({x, y, z}, "decomposition with z != p: probe not forced into A");
    ++forced;
  }
  if (in_pi == 0) return Verdict::Undecided(std::nullopt, "no probe lies in A^pi");
  Verdict v = Verdict::Holds("every probe in A^pi is forced into conv A");
  v.value = forced;
  return v;
}

}  // namespace qpos
