#include "qpos/minimal_convex.hpp"

#include <algorithm>
#include <cmath>

namespace qpos {

ConvexFunction as_convex(const MaxAffineFn& f) {
  ConvexFunction out;
  out.space = f.space_ptr();
  out.value = [f](const Vector& x) { return f(x); };
  out.conjugate = [f](const Vector& b) { return conj_eval(f, b).value; };
  out.label = "max-affine";
  return out;
}

ConvexFunction phi_affine_function(const AffineSet& p) {
  if (!affine_is_q_positive(p).holds())
    throw PreconditionError("phi_affine_function: set is not q-positive");
  ConvexFunction out;
  out.space = p.space_ptr();
  out.value = [p](const Vector& x) { return phi_affine_eval(p, x); };
  out.conjugate = [p](const Vector& b) { return phi_affine_conj(p, b); };
  out.conjugate_domain_hull = p;
  out.label = "Phi of an affine set";
  return out;
}

Verdict fund_ineq_check(const ConvexFunction& f, const Vector& x, const Vector& y, double alpha) {
  const SsdSpace& sp = *f.space;
  require_dim(x, sp.dim(), "fund_ineq_check x");
  require_dim(y, sp.dim(), "fund_ineq_check y");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("fund_ineq_check: alpha outside [0,1]");
  const double beta = 1.0 - alpha;
  double lhs = 0.0;
  if (alpha > 0.0) lhs += alpha * std::max(f.value(x), sp.q(x));
  if (beta > 0.0) {
    const double conj = f.conjugate(y);
    if (!(conj < kInf)) {
      Verdict v = Verdict::Holds("f^@(y) = +inf; inequality vacuous");
      v.value = kInf;
      return v;
    }
    lhs += beta * std::max(conj, sp.q(y));
  }
  const double gap = lhs - sp.q(alpha * x + beta * y);
  Verdict v = gap >= -tolerance() ? Verdict::Holds() : Verdict::Fails({x, y}, "inequality violated");
  v.value = gap;
  return v;
}

Verdict fund_ineq_check(const MaxAffineFn& f, const Vector& x, const Vector& y, double alpha) {
  return fund_ineq_check(as_convex(f), x, y, alpha);
}

EnvelopeQuery make_envelope(const ConvexFunction& f, const Vector& x, const BoxGrid& box) {
  require_dim(x, f.space->dim(), "make_envelope");
  if (box.dim() != f.space->dim()) throw ArgumentError("make_envelope: box dimension mismatch");
  EnvelopeQuery e;
  e.f = f;
  e.x = x;
  e.cap = std::max(f.conjugate(x), f.space->q(x));
  e.box = box;
  return e;
}

double envelope_eval(const EnvelopeQuery& e, const Vector& y) {
  require_dim(y, e.x.size(), "envelope_eval");
  const BoxGrid& box = e.box;
  auto f_hat = [&](const Vector& u) { return box.contains(u) ? e.f.value(u) : kInf; };
  const Vector d = y - e.x;
  if (d.norm() <= 1e-14 * (1.0 + e.x.norm())) return std::min(f_hat(e.x), e.cap);
  if (!(e.cap < kInf)) return f_hat(y);
  // {s ≥ 0 : y + s d ∈ box}
  double s_lo = 0.0, s_hi = kInf;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) {
      if (y(i) < box.lower(i) || y(i) > box.upper(i)) return kInf;
      continue;
    }
    const double t1 = (box.lower(i) - y(i)) / d(i);
    const double t2 = (box.upper(i) - y(i)) / d(i);
    s_lo = std::max(s_lo, std::min(t1, t2));
    s_hi = std::min(s_hi, std::max(t1, t2));
  }
  if (s_lo > s_hi) return kInf;
  const double b_lo = s_lo / (1.0 + s_lo);
  const double b_hi = s_hi / (1.0 + s_hi);
  auto objective = [&](double beta) {
    const double s = beta / (1.0 - beta);
    const Vector u = (y + s * d).cwiseMax(box.lower).cwiseMin(box.upper);
    return beta * e.cap + (1.0 - beta) * e.f.value(u);
  };
  return golden_section_min(objective, b_lo, b_hi, 1e-10).value;
}

Verdict minimal_selfconj_probe(const PointSet& m, const std::vector<Vector>& probes) {
  const MaxAffineFn phi = phi_build(m);
  double worst = kInf;
  std::size_t checked = 0;
  for (const Vector& b : probes) {
    require_dim(b, m.space().dim(), "minimal_selfconj_probe");
    const ConjugateQuery c = conj_eval(phi, b);
    if (!c.finite()) continue;
    ++checked;
    const double margin = c.value - phi(b);
    worst = std::min(worst, margin);
    if (margin < -1e-8) {
      Verdict v = Verdict::Fails({b}, "Phi_M^@(b) < Phi_M(b)");
      v.value = margin;
      return v;
    }
  }
  if (checked == 0) return Verdict::Undecided(std::nullopt, "every probe outside dom Phi_M^@");
  Verdict v = Verdict::Holds("Phi_M^@ >= Phi_M on " + std::to_string(checked) +
                             " probes; maximality of M not checked");
  v.value = worst;
  return v;
}

namespace {

struct Parametrization {
  Vector base;
  Matrix basis;  // v = base + basis·s
  BoxGrid grid;
};

Parametrization conj_parametrization(const ConvexFunction& f, const BoxGrid& box) {
  Parametrization p;
  if (f.conjugate_domain_hull && f.conjugate_domain_hull->dim() < f.space->dim()) {
    const AffineSet& h = *f.conjugate_domain_hull;
    // Orthonormal directions so that the s-grid pitch matches the box pitch.
    Matrix w = h.basis();
    if (h.dim() > 0)
      w = h.basis().householderQr().householderQ() * Matrix::Identity(h.space().dim(), h.dim());
    const Vector centre = 0.5 * (box.lower + box.upper);
    p.base = h.anchor() + w * (w.transpose() * (centre - h.anchor()));
    p.basis = w;
    if (h.dim() > 0)
      p.grid = BoxGrid::cube(h.dim(), 0.5 * (box.upper - box.lower).norm(), box.pitch,
                             box.multistarts);
    return p;
  }
  p.base = Vector::Zero(f.space->dim());
  p.basis = Matrix::Identity(f.space->dim(), f.space->dim());
  p.grid = box;
  return p;
}

double split_value(const ConvexFunction& f, const Vector& x, double alpha, const Vector& v,
                   Vector* u_out) {
  const double beta = 1.0 - alpha;
  const double cv = f.conjugate(v);
  if (!(cv < kInf)) return kInf;
  const Vector u = (x - beta * v) / alpha;
  if (u_out) *u_out = u;
  return alpha * f.value(u) + beta * cv;
}

ConvMinValue inner_min(const ConvexFunction& f, const Vector& x, double alpha,
                       const Parametrization& par) {
  ConvMinValue out;
  out.alpha = alpha;
  if (alpha >= 1.0) {
    out.value = f.value(x);
    out.u = x;
    out.v = x;
    return out;
  }
  if (alpha <= 0.0) {
    out.value = f.conjugate(x);
    out.u = x;
    out.v = x;
    return out;
  }
  auto objective = [&](const Vector& s) {
    const double val = split_value(f, x, alpha, par.base + par.basis * s, nullptr);
    return val < kInf ? -val : -kInf;
  };
  Vector best_v;
  if (par.grid.empty()) {
    best_v = par.base;
  } else {
    const Vector s0 = par.basis.transpose() * (x - par.base);
    const GridMax gm = grid_multistart_max(objective, par.grid, {s0});
    best_v = par.base + par.basis * gm.argmax;
  }
  Vector u = x;
  out.value = split_value(f, x, alpha, best_v, &u);
  out.u = u;
  out.v = best_v;
  return out;
}

double hull_scan_conjugate_gap(const ConvexFunction& f, const BoxGrid& box) {
  const SsdSpace& sp = *f.space;
  if (f.conjugate_domain_hull && f.conjugate_domain_hull->dim() < sp.dim()) {
    const Parametrization par = conj_parametrization(f, box);
    auto gap = [&](const Vector& s) {
      const Vector v = par.base + par.basis * s;
      if (!box.contains(v)) return -kInf;
      const double c = f.conjugate(v);
      return c < kInf ? sp.q(v) - c : -kInf;
    };
    if (par.grid.empty()) return gap(Vector(0));
    return grid_multistart_max(gap, par.grid).value;
  }
  return grid_multistart_max(
             [&](const Vector& v) {
               const double c = f.conjugate(v);
               return c < kInf ? sp.q(v) - c : -kInf;
             },
             box)
      .value;
}

}  // namespace

ConvMinValue convmin_eval(const ConvexFunction& f, const Vector& x, const BoxGrid& box) {
  require_dim(x, f.space->dim(), "convmin_eval");
  const Parametrization par = conj_parametrization(f, box);
  const ScalarMin best = golden_section_min(
      [&](double alpha) { return inner_min(f, x, alpha, par).value; }, 0.0, 1.0, 1e-6);
  ConvMinValue out = inner_min(f, x, best.x, par);
  out.split_residual = (out.alpha * out.u + (1.0 - out.alpha) * out.v - x).norm();
  return out;
}

Verdict convmin_check(const ConvexFunction& f, const std::vector<Vector>& probes,
                      const BoxGrid& box) {
  const SsdSpace& sp = *f.space;
  if (box.empty()) return Verdict::Undecided(std::nullopt, "empty box");
  const double eps = tolerance();
  const double h1 = grid_multistart_max([&](const Vector& x) { return sp.q(x) - f.value(x); }, box)
                        .value;
  if (h1 > eps) throw PreconditionError("convmin_check: f >= q is not certified on the box");
  if (hull_scan_conjugate_gap(f, box) > eps)
    throw PreconditionError("convmin_check: f^@ >= q is not certified on the box");
  double worst = kInf;
  for (const Vector& x : probes) {
    const ConvMinValue cm = convmin_eval(f, x, box);
    if (cm.value < kInf && cm.split_residual > 1e-8 * (1.0 + x.norm()))
      throw InternalError("convmin_check: minimizing split does not reproduce the probe");
    const double gap = cm.value - sp.q(x);
    worst = std::min(worst, gap);
    if (gap < -1e-6) {
      Verdict v = Verdict::Fails({x, cm.u, cm.v}, "conv min{f, f^@} < q at the probe");
      v.value = gap;
      v.resolution = box.pitch;
      return v;
    }
  }
  Verdict v = Verdict::GridHolds(box.pitch, "conv min{f, f^@} >= q on probes");
  v.value = worst;
  return v;
}

}  // namespace qpos
