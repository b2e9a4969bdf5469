#include "qpos/hilbert_sets.hpp"

#include <algorithm>
#include <cmath>

namespace qpos {

std::string_view to_string(DescriptorKind k) {
  switch (k) {
    case DescriptorKind::kFinitePoints: return "finite";
    case DescriptorKind::kUnionOfSegments: return "segments";
    case DescriptorKind::kAxisCross: return "axis_cross";
  }
  return "finite";
}

ClosedSetDescriptor ClosedSetDescriptor::finite(std::vector<Vector> points) {
  if (points.empty()) throw ArgumentError("finite descriptor needs at least one point");
  ClosedSetDescriptor d;
  d.kind_ = DescriptorKind::kFinitePoints;
  d.dim_ = points.front().size();
  if (d.dim_ < 1) throw ArgumentError("descriptor points must have positive dimension");
  for (const Vector& p : points) {
    require_dim(p, d.dim_, "descriptor point");
    if (!p.allFinite()) throw ArgumentError("descriptor points must be finite");
  }
  d.points_ = std::move(points);
  return d;
}

ClosedSetDescriptor ClosedSetDescriptor::segments(std::vector<std::pair<Vector, Vector>> segs) {
  if (segs.empty()) throw ArgumentError("segment descriptor needs at least one segment");
  ClosedSetDescriptor d;
  d.kind_ = DescriptorKind::kUnionOfSegments;
  d.dim_ = segs.front().first.size();
  if (d.dim_ < 1) throw ArgumentError("segment endpoints must have positive dimension");
  for (const auto& [p, q] : segs) {
    require_dim(p, d.dim_, "segment endpoint");
    require_dim(q, d.dim_, "segment endpoint");
    if (!p.allFinite() || !q.allFinite()) throw ArgumentError("segment endpoints must be finite");
  }
  d.segments_ = std::move(segs);
  return d;
}

ClosedSetDescriptor ClosedSetDescriptor::axis_cross() {
  ClosedSetDescriptor d;
  d.kind_ = DescriptorKind::kAxisCross;
  d.dim_ = 2;
  return d;
}

double ClosedSetDescriptor::distance_sq(const Vector& x) const {
  require_dim(x, dim_, "distance");
  const Eigen::Index k = dim_;
  double best = kInf;
  switch (kind_) {
    case DescriptorKind::kFinitePoints:
      for (const Vector& p : points_) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) s += (x(i) - p(i)) * (x(i) - p(i));
        best = std::min(best, s);
      }
      return best;
    case DescriptorKind::kUnionOfSegments:
      for (const auto& [p, q] : segments_) {
        double dd = 0.0, xd = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
          dd += (q(i) - p(i)) * (q(i) - p(i));
          xd += (x(i) - p(i)) * (q(i) - p(i));
        }
        const double t = dd > 0.0 ? std::clamp(xd / dd, 0.0, 1.0) : 0.0;
        double s = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
          const double r = x(i) - p(i) - t * (q(i) - p(i));
          s += r * r;
        }
        best = std::min(best, s);
      }
      return best;
    case DescriptorKind::kAxisCross: {
      const double m = std::min(std::abs(x(0)), std::abs(x(1)));
      return m * m;
    }
  }
  return best;
}

double ClosedSetDescriptor::distance(const Vector& x) const { return std::sqrt(distance_sq(x)); }

double ClosedSetDescriptor::extent() const {
  double e = 0.0;
  for (const Vector& p : points_) e = std::max(e, p.norm());
  for (const auto& [p, q] : segments_) e = std::max({e, p.norm(), q.norm()});
  return e;
}

SpacePtr ClosedSetDescriptor::space() const { return make_space(Matrix::Identity(dim_, dim_)); }

double phi_closed_eval(const ClosedSetDescriptor& a, const Vector& x) {
  return 0.5 * x.squaredNorm() - 0.5 * a.distance_sq(x);
}

namespace {

BoxSup box_sup(const std::function<double(const Vector&)>& f, const ClosedSetDescriptor& a,
               const Vector& x, const BoxGrid& grid) {
  const Eigen::Index k = a.dim();
  const double radius = 2.0 * (x.norm() + a.extent()) + 1.0;
  BoxSup out;
  out.box = BoxGrid::cube(k, radius, grid.pitch, grid.multistarts);
  GridMax gm = grid_multistart_max(f, out.box, {x});
  out.box_value = gm.value;
  out.value = gm.value;
  out.argmax = gm.argmax;
  const bool on_boundary = gm.argmax.cwiseAbs().maxCoeff() >= radius - grid.pitch;
  if (!on_boundary) return out;
  BoxGrid wide = BoxGrid::cube(k, 2.0 * radius, grid.pitch, grid.multistarts);
  while (wide.point_count() > 4'000'000) wide.pitch *= 2.0;
  const GridMax g2 = grid_multistart_max(f, wide, {gm.argmax});
  if (g2.value > gm.value + 1e-9 * (1.0 + std::abs(gm.value))) {
    out.unbounded = true;
    out.value = kInf;
    out.box_value = g2.value;
    out.argmax = g2.argmax;
    out.box = wide;
  }
  return out;
}

}  // namespace

BoxSup phi_conj_closed_eval(const ClosedSetDescriptor& a, const Vector& x, const BoxGrid& grid) {
  require_dim(x, a.dim(), "phi_conj_closed_eval");
  BoxSup s = box_sup(
      [&](const Vector& b) {
        double r = 0.0;
        for (Eigen::Index i = 0; i < b.size(); ++i) r += (x(i) - b(i)) * (x(i) - b(i));
        return a.distance_sq(b) - r;
      },
      a, x, grid);
  const double base = 0.5 * x.squaredNorm();
  s.box_value = base + 0.5 * s.box_value;
  if (!s.unbounded) s.value = s.box_value;
  return s;
}

Verdict g_phi_closed_member(const ClosedSetDescriptor& a, const Vector& x, const BoxGrid& grid) {
  require_dim(x, a.dim(), "g_phi_closed_member");
  const BoxSup s = box_sup(
      [&](const Vector& b) {
        double r = 0.0;
        for (Eigen::Index i = 0; i < b.size(); ++i) r += (x(i) - b(i)) * (x(i) - b(i));
        return a.distance_sq(b) - r;
      },
      a, x, grid);
  if (s.unbounded) {
    Verdict v = Verdict::Fails({x}, "BOX_UNBOUNDED");
    v.value = kInf;
    v.resolution = grid.pitch;
    return v;
  }
  const double gap = s.value - a.distance_sq(x);
  Verdict v = gap <= 1e-6 ? Verdict::GridHolds(grid.pitch, "sup equals d_A^2(x)")
                          : Verdict::Fails({x, s.argmax}, "sup exceeds d_A^2(x)");
  if (v.fails()) v.resolution = grid.pitch;
  v.value = gap;
  return v;
}

BoxSup closed_repr_h_eval(const ClosedSetDescriptor& a, const Vector& x, const BoxGrid& grid) {
  require_dim(x, a.dim(), "closed_repr_h_eval");
  return box_sup(
      [&](const Vector& y) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) s += y(i) * x(i) - 0.5 * y(i) * y(i);
        return s + 0.5 * a.distance_sq(y);
      },
      a, x, grid);
}

Verdict closed_repr_check(const ClosedSetDescriptor& a, const std::vector<Vector>& probes,
                          const BoxGrid& grid) {
  double worst = kInf;
  for (const Vector& x : probes) {
    const BoxSup h = closed_repr_h_eval(a, x, grid);
    const double q = 0.5 * x.squaredNorm();
    const bool in_a = a.contains(x);
    bool equal = false;
    if (!h.unbounded) {
      const double gap = h.value - q;
      worst = std::min(worst, gap);
      if (gap < -1e-6) {
        Verdict v = Verdict::Fails({x}, "h < q at the probe");
        v.value = gap;
        return v;
      }
      equal = gap <= 1e-6;
    }
    if (equal != in_a)
      return Verdict::Fails({x}, in_a ? "probe in A but h > q" : "probe outside A but h = q");
  }
  Verdict v = Verdict::GridHolds(grid.pitch, "A = P_q(h) on probes");
  v.value = worst;
  return v;
}

Verdict midpoint_ball_check(const ClosedSetDescriptor& a, const Vector& a1, const Vector& a2) {
  require_dim(a1, a.dim(), "midpoint_ball_check a1");
  require_dim(a2, a.dim(), "midpoint_ball_check a2");
  if ((a1 - a2).norm() <= 1e-12) throw PreconditionError("midpoint_ball_check: a1 == a2");
  if (!a.contains(a1) || !a.contains(a2))
    throw PreconditionError("midpoint_ball_check: a1 and a2 must lie in A");
  const Vector mid = 0.5 * (a1 + a2);
  const double r = 0.5 * (a1 - a2).norm();
  const double d = a.distance(mid);
  Verdict v = d < r - 1e-9 ? Verdict::Holds("open ball around the midpoint meets A")
                           : Verdict::Fails({mid}, "open ball around the midpoint misses A");
  v.value = r - d;
  return v;
}

ClosedSetDescriptor intervals_descriptor(const std::vector<std::pair<double, double>>& intervals) {
  std::vector<std::pair<Vector, Vector>> segs;
  for (const auto& [lo, hi] : intervals) {
    if (!(lo <= hi)) throw ArgumentError("interval needs lo <= hi");
    segs.emplace_back(Vector::Constant(1, lo), Vector::Constant(1, hi));
  }
  return ClosedSetDescriptor::segments(std::move(segs));
}

Verdict line_corollary_check(const std::vector<std::pair<double, double>>& intervals,
                             const std::vector<double>& probe_net, const BoxGrid& grid) {
  const ClosedSetDescriptor a = intervals_descriptor(intervals);
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  int components = 1;
  double reach = sorted.front().second;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].first > reach) ++components;
    reach = std::max(reach, sorted[i].second);
  }
  const bool convex = components == 1;
  int g_minus_a = 0;
  std::vector<Vector> extra;
  for (double t : probe_net) {
    const Vector x = Vector::Constant(1, t);
    const bool in_g = g_phi_closed_member(a, x, grid).holds();
    const bool in_a = a.contains(x);
    if (in_a && !in_g) return Verdict::Fails({x}, "point of A outside G_Phi_A");
    if (in_g && !in_a) {
      ++g_minus_a;
      if (extra.empty()) extra.push_back(x);
    }
  }
  const bool net_equal = g_minus_a == 0;
  Verdict v = convex == net_equal
                  ? Verdict::GridHolds(grid.pitch, convex ? "convex and A = G on the net"
                                                          : "not convex and G strictly larger")
                  : Verdict::Fails(extra, convex ? "convex but G strictly larger on the net"
                                                 : "not convex yet A = G on the net");
  if (!v.holds()) v.resolution = grid.pitch;
  v.witness = extra;
  v.value = g_minus_a;
  return v;
}

}  // namespace qpos
