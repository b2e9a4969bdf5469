#include "qpos/maximality.hpp"

#include "qpos/fitzpatrick.hpp"

#include <algorithm>
#include <cmath>

namespace qpos {

namespace {

Verdict scan_verdict(const GridMax& gm, double pitch, const char* what) {
  const double eps = tolerance();
  Verdict v = gm.value <= eps ? Verdict::GridHolds(pitch, what)
                              : Verdict::Fails({gm.argmax}, std::string("violated: ") + what);
  if (v.fails()) v.resolution = pitch;
  v.value = gm.value;
  return v;
}

bool related_to_all(const SsdSpace& sp, const Vector& z, const std::vector<Vector>& set) {
  const double eps = tolerance();
  for (const Vector& w : set)
    if (sp.q(z - w) < -eps) return false;
  return true;
}

}  // namespace

std::string_view to_string(PremaxClass c) {
  switch (c) {
    case PremaxClass::kViaPhiDominance: return "PREMAXIMAL_VIA_202";
    case PremaxClass::kViaAffinePi: return "PREMAXIMAL_VIA_AFFINE_PI";
    case PremaxClass::kNotPremaximal: return "NOT_PREMAXIMAL";
    case PremaxClass::kUndecided: return "UNDECIDED";
  }
  return "UNDECIDED";
}

std::vector<Vector> pi_net(const PointSet& a, const BoxGrid& box, std::size_t cap) {
  std::vector<Vector> net(a.points());
  const SsdSpace& sp = a.space();
  const double eps = tolerance();
  box.for_each_point([&](const Vector& x) {
    if (sp.min_q_gap(a.packed(), x) >= -eps) net.push_back(x);
  });
  if (cap == 0 || net.size() <= cap) return net;
  const std::size_t stride = (net.size() + cap - 1) / cap;
  std::vector<Vector> thinned;
  for (std::size_t i = 0; i < net.size(); i += stride) thinned.push_back(net[i]);
  return thinned;
}

Verdict net_q_positive(const SsdSpace& space, const std::vector<Vector>& net) {
  double worst = kInf;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = i + 1; j < net.size(); ++j) {
      const double v = space.q(net[i] - net[j]);
      if (v < worst) {
        worst = v;
        bi = i;
        bj = j;
      }
    }
  if (worst < -tolerance()) {
    Verdict out = Verdict::Fails({net[bi], net[bj]}, "pair in the polar with q(b1 - b2) < 0");
    out.value = worst;
    return out;
  }
  Verdict out = Verdict::Holds("no violating pair on the net");
  out.value = worst;
  return out;
}

PremaxReport premax_certify(const PointSet& p, const BoxGrid& box) {
  if (!is_q_positive(p).holds()) throw PreconditionError("premax_certify: set is not q-positive");
  PremaxReport r;
  r.box = box;
  if (box.empty()) {
    r.phi_dominates_q = Verdict::Undecided(std::nullopt, "empty box");
    r.pi_positive = Verdict::Undecided(std::nullopt, "empty box");
    r.domain_is_pi = Verdict::Undecided(std::nullopt, "finite set: dom Phi_P is the whole space");
    return r;
  }
  const SsdSpace& sp = p.space();
  const MaxAffineFn phi = phi_build(p);
  const SpacePtr space = p.space_ptr();
  const GridMax gm =
      grid_multistart_max([&](const Vector& x) { return sp.q(x) - phi(x); }, box, p.points());
  r.phi_dominates_q = scan_verdict(gm, box.pitch, "Phi_P >= q on the box");
  r.pi_positive = net_q_positive(sp, pi_net(p, box));
  if (r.pi_positive.holds()) {
    r.pi_positive.grid_certified = true;
    r.pi_positive.resolution = box.pitch;
  }
  r.domain_is_pi = Verdict::Undecided(std::nullopt, "finite set: dom Phi_P is the whole space");
  if (r.phi_dominates_q.holds()) {
    r.classification = PremaxClass::kViaPhiDominance;
    r.maximal_superset = [phi, space](const Vector& b) {
      return std::abs(phi(b) - space->q(b)) <= tolerance();
    };
  } else if (r.pi_positive.fails()) {
    r.classification = PremaxClass::kNotPremaximal;
  }
  return r;
}

PremaxReport premax_certify(const AffineSet& p, const BoxGrid& box) {
  if (!affine_is_q_positive(p).holds())
    throw PreconditionError("premax_certify: set is not q-positive");
  PremaxReport r;
  r.box = box;
  const SpacePtr space = p.space_ptr();
  const SsdSpace& sp = *space;
  const Eigen::Index n = sp.dim();
  const AffineSet dom = phi_affine_domain(p);
  r.phi_domain = dom;
  const PiShape shape = affine_pi_shape(p);
  if (shape.affine) {
    r.pi_affine = AffineSet(space, shape.anchor, shape.basis);
    r.pi_positive = Verdict::Holds("exact: P^pi is affine");
    r.domain_is_pi = same_affine_set(dom, *r.pi_affine)
                         ? Verdict::Holds("dom Phi_P = P^pi (exact)")
                         : Verdict::Fails({}, "dom Phi_P differs from P^pi");
  } else {
    r.pi_positive = Verdict::Fails(shape.witness_pair, "exact: pair in P^pi with q(b1 - b2) < 0");
    r.pi_positive.value = sp.q(shape.witness_pair[0] - shape.witness_pair[1]);
    const Vector off = p.anchor() + (shape.witness_pair[0] - shape.witness_pair[1]);
    r.domain_is_pi = Verdict::Fails({off}, "point of dom Phi_P outside P^pi");
  }

  const bool full_domain = dom.dim() == n;
  if (box.empty()) {
    r.phi_dominates_q = Verdict::Undecided(std::nullopt, "empty box");
  } else if (full_domain) {
    const GridMax gm = grid_multistart_max(
        [&](const Vector& x) { return sp.q(x) - phi_affine_eval(p, x); }, box,
        {p.anchor().cwiseMax(box.lower).cwiseMin(box.upper)});
    r.phi_dominates_q = scan_verdict(gm, box.pitch, "Phi_P >= q on the box");
  } else if (dom.dim() <= 3) {
    // Φ_P = +∞ off dom Φ_P, so only the part of dom Φ_P inside the box can violate Φ_P ≥ q.
    const Vector centre = 0.5 * (box.lower + box.upper);
    const Matrix& w = dom.basis();
    const Vector base = dom.anchor() + w * (w.transpose() * (centre - dom.anchor()));
    const double radius = 0.5 * (box.upper - box.lower).norm();
    auto along = [&](const Vector& s) {
      const Vector x = base + w * s;
      if (!box.contains(x)) return -kInf;
      return sp.q(x) - phi_affine_eval(p, x);
    };
    if (dom.dim() == 0) {
      GridMax gm;
      gm.value = along(Vector(0));
      gm.argmax = base;
      r.phi_dominates_q = scan_verdict(gm, box.pitch, "Phi_P >= q on dom Phi_P within the box");
    } else {
      const BoxGrid sbox = BoxGrid::cube(dom.dim(), radius, box.pitch, box.multistarts);
      GridMax gm = grid_multistart_max(along, sbox);
      gm.argmax = base + w * gm.argmax;
      r.phi_dominates_q = scan_verdict(gm, box.pitch, "Phi_P >= q on dom Phi_P within the box");
    }
    r.phi_dominates_q.note += "; Phi_P = +inf off dom Phi_P";
  } else {
    r.phi_dominates_q = Verdict::Undecided(box.pitch, "dom Phi_P is proper and too large to scan");
  }

  // A proper dom Φ_P means Φ_P is not finite on the box; the exact P^π route decides.
  if (full_domain && r.phi_dominates_q.holds()) {
    r.classification = PremaxClass::kViaPhiDominance;
    r.maximal_superset = [p, space](const Vector& b) {
      return std::abs(phi_affine_eval(p, b) - space->q(b)) <= tolerance();
    };
  } else if (shape.affine) {
    r.classification = PremaxClass::kViaAffinePi;
    const AffineSet pi = *r.pi_affine;
    r.maximal_superset = [pi](const Vector& b) { return pi.contains(b); };
  } else {
    r.classification = PremaxClass::kNotPremaximal;
  }
  return r;
}

Verdict third_polar_check(const PointSet& a, const std::vector<Vector>& probes,
                          std::optional<double> resolution) {
  const SsdSpace& sp = a.space();
  for (const Vector& p : probes) require_dim(p, sp.dim(), "third_polar_check probe");
  const double eps = tolerance();
  std::vector<char> in_n(probes.size(), 0);
  std::vector<Vector> n1;
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (sp.min_q_gap(a.packed(), probes[i]) >= -eps) {
      in_n[i] = 1;
      n1.push_back(probes[i]);
    }
  std::vector<Vector> n2;
  for (const Vector& z : a.points()) {
    if (!related_to_all(sp, z, n1))
      return Verdict::Fails({z}, "point of A not in the second polar of the net");
    n2.push_back(z);
  }
  for (const Vector& z : probes)
    if (related_to_all(sp, z, n1)) n2.push_back(z);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const bool in_n3 = related_to_all(sp, probes[i], n2);
    if (in_n3 != static_cast<bool>(in_n[i]))
      return Verdict::Fails({probes[i]}, in_n3 ? "third polar strictly larger than the polar"
                                               : "polar point missing from the third polar");
  }
  Verdict out = resolution ? Verdict::GridHolds(*resolution, "A^pipipi = A^pi on the net")
                           : Verdict::Holds("A^pipipi = A^pi on the net");
  out.value = static_cast<double>(n1.size());
  return out;
}

ExtensionFamily extension_continuum(const PointSet& a, const Vector& x1, const Vector& x2,
                                    int count) {
  const SsdSpace& sp = a.space();
  require_dim(x1, sp.dim(), "extension_continuum x1");
  require_dim(x2, sp.dim(), "extension_continuum x2");
  if (count < 2) throw ArgumentError("extension_continuum: count must be at least 2");
  const double eps = tolerance();
  if (!pi_member(a, x1).holds() || !pi_member(a, x2).holds())
    throw PreconditionError("extension_continuum: x1 and x2 must lie in A^pi");
  const double q12 = sp.q(x1 - x2);
  if (!(q12 < -eps)) throw PreconditionError("extension_continuum: requires q(x1 - x2) < 0");

  ExtensionFamily fam;
  fam.x1 = x1;
  fam.x2 = x2;
  // q(x_λ − a) = q(v) + λ⌊v, x1 − x2⌋ + λ² q(x1 − x2) with v = x2 − a; concave in λ.
  const Vector d = x1 - x2;
  for (const Vector& p : a.points()) {
    const Vector v = x2 - p;
    const double c0 = sp.q(v), c1 = sp.pairing(v, d), c2 = q12;
    double lo = std::min(c0, c0 + c1 + c2);
    if (c2 > 0.0) {
      const double vertex = -c1 / (2.0 * c2);
      if (vertex > 0.0 && vertex < 1.0) lo = std::min(lo, c0 + c1 * vertex + c2 * vertex * vertex);
    }
    fam.min_margin = std::min(fam.min_margin, lo);
  }
  for (int i = 0; i < count; ++i) {
    const double lam = static_cast<double>(i) / (count - 1);
    fam.lambdas.push_back(lam);
    fam.points.push_back(lam * x1 + (1.0 - lam) * x2);
  }
  fam.points.front() = x2;
  fam.points.back() = x1;
  for (std::size_t i = 0; i < fam.points.size(); ++i)
    for (std::size_t j = i + 1; j < fam.points.size(); ++j) {
      const double dl = fam.lambdas[i] - fam.lambdas[j];
      const double r = std::abs(sp.q(fam.points[i] - fam.points[j]) - dl * dl * q12);
      fam.max_identity_residual = std::max(fam.max_identity_residual, r);
    }
  if (fam.min_margin < -eps) {
    fam.verified = Verdict::Fails({}, "some x_lambda leaves A^pi");
  } else {
    for (const Vector& x : fam.points)
      if (!pi_member(a, x).holds()) {
        fam.verified = Verdict::Fails({x}, "sample x_lambda not in A^pi");
        break;
      }
    if (!fam.verified.fails())
      fam.verified = Verdict::Holds("every A + {x_lambda} is q-positive; pairs mutually conflict");
  }
  fam.verified.value = fam.min_margin;
  return fam;
}

Matrix swap_matrix(Eigen::Index k) {
  Matrix m = Matrix::Zero(2 * k, 2 * k);
  m.topRightCorner(k, k).setIdentity();
  m.bottomLeftCorner(k, k).setIdentity();
  return m;
}

bool is_monotone_model(const SsdSpace& space) {
  const Eigen::Index n = space.dim();
  return n % 2 == 0 && n > 0 && space.form() == swap_matrix(n / 2);
}

namespace {

NiReport finish_ni(const GridMax& ni, const GridMax& g_dom, double pitch) {
  NiReport out;
  out.ni = scan_verdict(ni, pitch, "inf over A of <a* - y*, a - y**> <= 0");
  out.phi_dominates_q = scan_verdict(g_dom, pitch, "Phi_iota(A) >= q on the box");
  out.agree = out.ni.status == out.phi_dominates_q.status;
  if (out.ni.holds()) out.ni.note += "; A is unique and iota(A)^pi = P_q(Phi_iota(A))";
  return out;
}

NiReport empty_ni() {
  NiReport out;
  out.ni = Verdict::Undecided(std::nullopt, "empty box");
  out.phi_dominates_q = Verdict::Undecided(std::nullopt, "empty box");
  out.agree = true;
  return out;
}

}  // namespace

NiReport ni_type_check(const PointSet& a, const BoxGrid& box) {
  const SsdSpace& sp = a.space();
  if (!is_monotone_model(sp)) throw ArgumentError("ni_type_check needs the monotone model");
  if (box.empty()) return empty_ni();
  if (box.dim() != sp.dim()) throw ArgumentError("ni_type_check: box dimension mismatch");
  const Eigen::Index k = sp.dim() / 2;
  // y = (y*, y**); a = (a, a*).
  auto ni_value = [&](const Vector& y) {
    double best = kInf;
    for (const Vector& p : a.points()) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) s += (p(k + i) - y(i)) * (p(i) - y(k + i));
      best = std::min(best, s);
    }
    return best;
  };
  const Matrix sw = swap_matrix(k);
  std::vector<Vector> swapped;
  for (const Vector& p : a.points()) swapped.push_back(sw * p);
  const PointSet iota(a.space_ptr(), swapped);
  const MaxAffineFn phi = phi_build(iota);
  const GridMax ni = grid_multistart_max(ni_value, box);
  const GridMax g = grid_multistart_max([&](const Vector& y) { return sp.q(y) - phi(y); }, box);
  return finish_ni(ni, g, box.pitch);
}

NiReport ni_type_check(const AffineSet& a, const BoxGrid& box) {
  const SsdSpace& sp = a.space();
  if (!is_monotone_model(sp)) throw ArgumentError("ni_type_check needs the monotone model");
  if (!affine_is_q_positive(a).holds())
    throw PreconditionError("ni_type_check: set is not q-positive");
  if (box.empty()) return empty_ni();
  if (box.dim() != sp.dim()) throw ArgumentError("ni_type_check: box dimension mismatch");
  const Matrix sw = swap_matrix(sp.dim() / 2);
  auto ni_value = [&](const Vector& y) {
    const AffineMin m = min_q_over_affine(sp, sw * y - a.anchor(), a.basis());
    return m.minus_infinity ? -kInf : m.value;
  };
  const AffineSet iota = map_affine(a, sw, a.space_ptr());
  const GridMax ni = grid_multistart_max(ni_value, box);
  const GridMax g = grid_multistart_max(
      [&](const Vector& y) { return sp.q(y) - phi_affine_eval(iota, y); }, box);
  return finish_ni(ni, g, box.pitch);
}

}  // namespace qpos
