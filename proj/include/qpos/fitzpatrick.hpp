#ifndef QPOS_FITZPATRICK_HPP
#define QPOS_FITZPATRICK_HPP

#include "qpos/core.hpp"
#include "qpos/numerics.hpp"

#include <functional>

namespace qpos {

// f(x) = max over pieces of (slopeᵢᵀ x − offsetᵢ).
class MaxAffineFn {
 public:
  MaxAffineFn(SpacePtr space, RowMatrix slopes, Vector offsets);

  const SsdSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  Eigen::Index pieces() const { return offsets_.size(); }
  const RowMatrix& slopes() const { return slopes_; }
  const Vector& offsets() const { return offsets_; }

  double operator()(const Vector& x) const;
  // Index of a maximizing piece at x.
  Eigen::Index active_piece(const Vector& x) const;
  // Recession function max over pieces of slopeᵢᵀ d.
  double recession(const Vector& d) const;

  MaxAffineFn shifted(double delta) const;

 private:
  SpacePtr space_;
  RowMatrix slopes_;
  Vector offsets_;
};

// Result of evaluating the intrinsic conjugate f^@(b) = sup_c {⌊c,b⌋ − f(c)}.
struct ConjugateQuery {
  double value = kInf;  // +∞ iff S b ∉ conv(slopes)
  Vector weights;       // optimal simplex weights when finite
  bool finite() const { return value < kInf; }
};

// Φ_A(x) = q(x) − min_a q(x − a) = max_a {⌊x,a⌋ − q(a)}: slopes S aᵢ, offsets q(aᵢ).
MaxAffineFn phi_build(const PointSet& a);

// Second route to Φ_A through the quadratic-gap form (independent of the pieces).
double phi_direct(const PointSet& a, const Vector& x);

// f^@(b) as the LP min Σλᵢ offsetᵢ s.t. Σλᵢ slopeᵢ = S b, λ in the simplex.
ConjugateQuery conj_eval(const MaxAffineFn& f, const Vector& b);

// HOLDS iff |value − q(b)| ≤ ε. `value` may be +∞ (then FAILS). The caller
// is responsible for value ≥ q (noted in the verdict).
Verdict pq_member(const SsdSpace& space, double value, const Vector& b);
Verdict pq_member(const MaxAffineFn& f, const Vector& b);
// b ∈ P_q(f^@).
Verdict pq_member_conjugate(const MaxAffineFn& f, const Vector& b);

// b ∈ P_q(Φ_A^@), the smallest q-representable superset of A. Requires A q-positive.
Verdict repr_hull_member(const PointSet& a, const Vector& b);
Verdict repr_hull_member(const PointSet& a, const MaxAffineFn& phi, const Vector& b);

// b ∈ ∂_q f(a): Fenchel–Young gap f(a) + f^@(b) − ⌊a,b⌋ ≤ ε. Gap in Verdict::value.
Verdict q_subdiff_check(const MaxAffineFn& f, const Vector& a, const Vector& b);

// b ∈ G_{Φ_A}: ½(Φ_A(b) + Φ_A^@(b)) = q(b) within ε. Requires A q-positive.
Verdict g_phi_member(const PointSet& a, const Vector& b);
Verdict g_phi_member(const PointSet& a, const MaxAffineFn& phi, const Vector& b);

// Shared hypothesis of the hull-representability results: Φ_A ≥ q on conv A.
// Scans q − Φ_A over barycentric samples of conv A (all vertices, every edge at
// `edge_samples` points, `interior_samples` seeded random combinations). When the
// scan certifies the hypothesis, every probe is checked for
// g_phi_member ⇔ repr_hull_member; a mismatch FAILS with the probe as witness.
struct HullInequalityReport {
  Verdict hypothesis;     // grid-certified HOLDS or FAILS with the violating point
  Verdict consequence;    // UNDECIDED when the hypothesis is not certified
  double max_violation = -kInf;  // max over samples of q − Φ_A
};
HullInequalityReport check_ineq_on_hull(const PointSet& a, const std::vector<Vector>& probes,
                                        int edge_samples = 21, int interior_samples = 200,
                                        unsigned seed = 7);

}  // namespace qpos

#endif  // QPOS_FITZPATRICK_HPP
