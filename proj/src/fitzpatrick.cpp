#include "qpos/fitzpatrick.hpp"

#include "qpos/kernels.hpp"

#include <cmath>
#include <random>

namespace qpos {

namespace {

std::span<const double> span_of(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void require_q_positive(const PointSet& a, const char* op) {
  if (!is_q_positive(a).holds())
    throw PreconditionError(std::string(op) + ": the set is not q-positive");
}

}  // namespace

MaxAffineFn::MaxAffineFn(SpacePtr space, RowMatrix slopes, Vector offsets)
    : space_(std::move(space)), slopes_(std::move(slopes)), offsets_(std::move(offsets)) {
  if (!space_) throw ArgumentError("max-affine function needs a space");
  if (offsets_.size() < 1) throw ArgumentError("max-affine function needs at least one piece");
  if (slopes_.rows() != offsets_.size() || slopes_.cols() != space_->dim())
    throw ArgumentError("max-affine slopes must be pieces×n");
  if (!slopes_.allFinite() || !offsets_.allFinite())
    throw ArgumentError("max-affine data must be finite");
}

double MaxAffineFn::operator()(const Vector& x) const {
  require_dim(x, space_->dim(), "max-affine evaluation");
  return kernels::max_affine({slopes_.data(), static_cast<std::size_t>(slopes_.size())},
                             span_of(offsets_), span_of(x))
      .value;
}

Eigen::Index MaxAffineFn::active_piece(const Vector& x) const {
  require_dim(x, space_->dim(), "max-affine evaluation");
  return static_cast<Eigen::Index>(
      kernels::max_affine({slopes_.data(), static_cast<std::size_t>(slopes_.size())},
                          span_of(offsets_), span_of(x))
          .argmax);
}

double MaxAffineFn::recession(const Vector& d) const { return (slopes_ * d).maxCoeff(); }

MaxAffineFn MaxAffineFn::shifted(double delta) const {
  return MaxAffineFn(space_, slopes_, (offsets_.array() - delta).matrix());
}

MaxAffineFn phi_build(const PointSet& a) {
  const SsdSpace& sp = a.space();
  RowMatrix slopes(static_cast<Eigen::Index>(a.size()), sp.dim());
  Vector offsets(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    slopes.row(r) = sp.apply(a[i]).transpose();
    offsets(r) = sp.q(a[i]);
  }
  return MaxAffineFn(a.space_ptr(), std::move(slopes), std::move(offsets));
}

double phi_direct(const PointSet& a, const Vector& x) {
  return a.space().q(x) - a.space().min_q_gap(a.packed(), x);
}

ConjugateQuery conj_eval(const MaxAffineFn& f, const Vector& b) {
  const SsdSpace& sp = f.space();
  require_dim(b, sp.dim(), "conj_eval");
  SimplexLp lp;
  lp.costs = f.offsets();
  lp.moments = f.slopes().transpose();
  lp.target = sp.apply(b);
  const LpSolution sol = lp_min(lp);
  ConjugateQuery out;
  if (sol.feasible) {
    out.value = sol.value;
    out.weights = sol.weights;
  }
  return out;
}

Verdict pq_member(const SsdSpace& space, double value, const Vector& b) {
  const double qb = space.q(b);
  if (!(value < kInf)) {
    Verdict v = Verdict::Fails({b}, "f(b) = +inf");
    v.value = kInf;
    return v;
  }
  const double gap = value - qb;
  Verdict v = std::abs(gap) <= tolerance() ? Verdict::Holds("assumes f >= q")
                                           : Verdict::Fails({b}, "f(b) != q(b); assumes f >= q");
  v.value = gap;
  return v;
}

Verdict pq_member(const MaxAffineFn& f, const Vector& b) { return pq_member(f.space(), f(b), b); }

Verdict pq_member_conjugate(const MaxAffineFn& f, const Vector& b) {
  return pq_member(f.space(), conj_eval(f, b).value, b);
}

Verdict repr_hull_member(const PointSet& a, const Vector& b) {
  require_q_positive(a, "repr_hull_member");
  return repr_hull_member(a, phi_build(a), b);
}

Verdict repr_hull_member(const PointSet& a, const MaxAffineFn& phi, const Vector& b) {
  require_dim(b, a.space().dim(), "repr_hull_member");
  Verdict v = pq_member_conjugate(phi, b);
  v.note = v.holds() ? "Phi_A^@(b) = q(b)" : "Phi_A^@(b) != q(b)";
  return v;
}

Verdict q_subdiff_check(const MaxAffineFn& f, const Vector& a, const Vector& b) {
  const SsdSpace& sp = f.space();
  require_dim(a, sp.dim(), "q_subdiff_check");
  const ConjugateQuery conj = conj_eval(f, b);
  if (!conj.finite()) {
    Verdict v = Verdict::Fails({a, b}, "f^@(b) = +inf");
    v.value = kInf;
    return v;
  }
  const double gap = f(a) + conj.value - sp.pairing(a, b);
  Verdict v = gap <= tolerance() ? Verdict::Holds("Fenchel-Young equality")
                                 : Verdict::Fails({a, b}, "Fenchel-Young gap > 0");
  v.value = gap;
  return v;
}

Verdict g_phi_member(const PointSet& a, const Vector& b) {
  require_q_positive(a, "g_phi_member");
  return g_phi_member(a, phi_build(a), b);
}

Verdict g_phi_member(const PointSet& a, const MaxAffineFn& phi, const Vector& b) {
  const SsdSpace& sp = a.space();
  require_dim(b, sp.dim(), "g_phi_member");
  const ConjugateQuery conj = conj_eval(phi, b);
  if (!conj.finite()) {
    Verdict v = Verdict::Fails({b}, "Phi_A^@(b) = +inf");
    v.value = kInf;
    return v;
  }
  const double gap = 0.5 * (phi(b) + conj.value) - sp.q(b);
  Verdict v = std::abs(gap) <= tolerance() ? Verdict::Holds() : Verdict::Fails({b}, "b not in G");
  v.value = gap;
  return v;
}

HullInequalityReport check_ineq_on_hull(const PointSet& a, const std::vector<Vector>& probes,
                                        int edge_samples, int interior_samples, unsigned seed) {
  require_q_positive(a, "check_ineq_on_hull");
  const SsdSpace& sp = a.space();
  const MaxAffineFn phi = phi_build(a);
  HullInequalityReport out;
  Vector worst_point = a[0];
  auto consider = [&](const Vector& x) {
    const double v = sp.q(x) - phi(x);
    if (v > out.max_violation) {
      out.max_violation = v;
      worst_point = x;
    }
  };
  for (const Vector& p : a.points()) consider(p);
  const int es = std::max(2, edge_samples);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      for (int s = 1; s < es - 1; ++s) {
        const double t = static_cast<double>(s) / (es - 1);
        consider((1.0 - t) * a[i] + t * a[j]);
      }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  for (int s = 0; s < interior_samples; ++s) {
    Vector w(static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = expo(rng);
    w /= w.sum();
    Vector x = Vector::Zero(sp.dim());
    for (std::size_t i = 0; i < a.size(); ++i) x += w(static_cast<Eigen::Index>(i)) * a[i];
    consider(x);
  }
  const double resolution = 1.0 / (es - 1);
  if (out.max_violation > tolerance()) {
    out.hypothesis = Verdict::Fails({worst_point}, "q > Phi_A somewhere on conv A");
    out.hypothesis.value = out.max_violation;
    out.consequence = Verdict::Undecided(resolution, "hypothesis not certified");
    return out;
  }
  out.hypothesis = Verdict::GridHolds(resolution, "Phi_A >= q on sampled conv A");
  out.hypothesis.value = out.max_violation;
  for (const Vector& b : probes) {
    const bool g = g_phi_member(a, phi, b).holds();
    const bool r = repr_hull_member(a, phi, b).holds();
    if (g != r) {
      out.consequence = Verdict::Fails({b}, "G_Phi and P_q(Phi^@) disagree");
      return out;
    }
  }
  out.consequence = Verdict::GridHolds(resolution, "G_Phi = P_q(Phi^@) on probes");
  return out;
}

}  // namespace qpos
