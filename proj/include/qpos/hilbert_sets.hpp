#ifndef QPOS_HILBERT_SETS_HPP
#define QPOS_HILBERT_SETS_HPP

#include "qpos/core.hpp"
#include "qpos/numerics.hpp"

#include <utility>

namespace qpos {

enum class DescriptorKind { kFinitePoints, kUnionOfSegments, kAxisCross };

std::string_view to_string(DescriptorKind k);

// Closed subset of Rᵏ (q = ½‖·‖²) with an exact distance function.
class ClosedSetDescriptor {
 public:
  static ClosedSetDescriptor finite(std::vector<Vector> points);
  static ClosedSetDescriptor segments(std::vector<std::pair<Vector, Vector>> segments);
  // {x ∈ R² : x₁x₂ = 0}
  static ClosedSetDescriptor axis_cross();

  DescriptorKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<Vector>& points() const { return points_; }
  const std::vector<std::pair<Vector, Vector>>& segment_list() const { return segments_; }

  double distance(const Vector& x) const;
  double distance_sq(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-9) const { return distance(x) <= tol; }
  // max norm over the describing data (0 for the cross).
  double extent() const;
  SpacePtr space() const;

 private:
  DescriptorKind kind_ = DescriptorKind::kFinitePoints;
  Eigen::Index dim_ = 0;
  std::vector<Vector> points_;
  std::vector<std::pair<Vector, Vector>> segments_;
};

// Φ_A(x) = ½‖x‖² − ½ d_A²(x).
double phi_closed_eval(const ClosedSetDescriptor& a, const Vector& x);

// A sup over Rᵏ restricted to the origin-centred box of radius 2(‖x‖ + extent) + 1.
// When the maximizer sits on the boundary the radius is doubled; growth beyond
// 1e-9 marks the sup BOX_UNBOUNDED (taken as +∞ evidence).
struct BoxSup {
  double value = -kInf;      // +∞ when unbounded
  double box_value = -kInf;  // sup over the recorded box
  Vector argmax;
  BoxGrid box;
  bool unbounded = false;
};

// Φ_A^@(x) = ½‖x‖² + ½ sup_b {d_A²(b) − ‖x − b‖²}. `grid` supplies pitch and multistarts.
BoxSup phi_conj_closed_eval(const ClosedSetDescriptor& a, const Vector& x, const BoxGrid& grid);

// x ∈ G_{Φ_A} ⇔ sup_b {d_A²(b) − ‖b − x‖²} = d_A²(x) within 1e-6.
Verdict g_phi_closed_member(const ClosedSetDescriptor& a, const Vector& x, const BoxGrid& grid);

// h(x) = sup_y {q(y) + ⟨y, x − y⟩ + ½ d_A²(y)}; A = P_q(h).
BoxSup closed_repr_h_eval(const ClosedSetDescriptor& a, const Vector& x, const BoxGrid& grid);

// For every probe: h(x) ≥ q(x) − 1e-6, and h(x) = q(x) within 1e-6 iff x ∈ A.
Verdict closed_repr_check(const ClosedSetDescriptor& a, const std::vector<Vector>& probes,
                          const BoxGrid& grid);

// B_r(x) ∩ A ≠ ∅ for x = ½(a1 + a2), r = ½‖a1 − a2‖ (open ball): d_A(x) < r − 1e-9.
Verdict midpoint_ball_check(const ClosedSetDescriptor& a, const Vector& a1, const Vector& a2);

// Closed intervals [lo, hi] of R (lo = hi allowed). HOLDS iff "A is convex" agrees
// with "A = G_{Φ_A} on the probe net"; value = number of probes found in G ∖ A.
Verdict line_corollary_check(const std::vector<std::pair<double, double>>& intervals,
                             const std::vector<double>& probe_net, const BoxGrid& grid);

ClosedSetDescriptor intervals_descriptor(const std::vector<std::pair<double, double>>& intervals);

}  // namespace qpos

#endif  // QPOS_HILBERT_SETS_HPP
