#ifndef QPOS_AFFINE_HPP
#define QPOS_AFFINE_HPP

#include "qpos/core.hpp"
#include "qpos/numerics.hpp"

#include <functional>

namespace qpos {

// x0 + range(V), V with full column rank (d = 0 is the singleton {x0}).
class AffineSet {
 public:
  AffineSet(SpacePtr space, Vector anchor, Matrix basis);
  static AffineSet singleton(SpacePtr space, Vector point);

  const SsdSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Vector& anchor() const { return x0_; }
  const Matrix& basis() const { return v_; }
  Eigen::Index dim() const { return v_.cols(); }

  // b − x0 ∈ range(V) within 1e-8 (least-squares residual).
  bool contains(const Vector& b) const;
  Vector at(const Vector& t) const { return x0_ + v_ * t; }
  // Points x0 + V t for t on a uniform grid of [−extent, extent]^d.
  std::vector<Vector> sample(double extent, int per_axis) const;

 private:
  SpacePtr space_;
  Vector x0_;
  Matrix v_;
};

// Exact A^π of an affine q-positive set:
//   b ∈ A^π ⇔ R b = s (1e-8) and q(b − x0) − ½ gᵀM⁺g ≥ −ε,  g = VᵀS(b − x0), M = VᵀSV.
// The linear rows say g ∈ range(M); they also cut out dom Φ_A.
struct PiDescription {
  bool feasible = true;
  Matrix constraint_rows;  // R
  Vector constraint_rhs;   // s
  std::function<double(const Vector&)> quadratic_residual;

  bool linear_ok(const Vector& b) const;
  bool contains(const Vector& b) const;
};

Verdict affine_is_q_positive(const AffineSet& a);
PiDescription affine_pi(const AffineSet& a);

// Shape of A^π: affine (with anchor and basis) or a non-convex cone section,
// in which case `witness_pair` holds b1, b2 ∈ A^π with q(b1 − b2) < 0.
struct PiShape {
  bool affine = false;
  Vector anchor;
  Matrix basis;
  std::vector<Vector> witness_pair;
};
PiShape affine_pi_shape(const AffineSet& a);

// A^π = A, decided from the exact description; FAILS carries a point of A^π ∖ A.
Verdict affine_is_maximal(const AffineSet& a);

// Necessary consequences of "M is maximally q-positive and convex" around x0:
// for each member probe x, x0 + λ(x − x0) (λ ∈ scales) and x0 − (x − x0) must be
// members. FAILS carries the offending point; the note says whether it was
// q-positively related to every member probe (non-maximality) or not.
Verdict maximal_convex_affinity_falsifier(const SsdSpace& space,
                                          const std::function<bool(const Vector&)>& member,
                                          const Vector& x0, const std::vector<Vector>& probes,
                                          const std::vector<double>& scales = {2.0, 3.0});

// Φ_P(x) = sup_t {⌊x, x0 + Vt⌋ − q(x0 + Vt)}; +∞ when VᵀS(x − x0) ∉ range(VᵀSV).
double phi_affine_eval(const AffineSet& p, const Vector& x);
// Φ_P^@ = q + δ_P for affine q-positive P.
double phi_affine_conj(const AffineSet& p, const Vector& x);
// dom Φ_P as an affine set (same linear rows as the A^π description).
AffineSet phi_affine_domain(const AffineSet& p);

// Equal as point sets (same dimension, mutual containment of anchor and directions).
bool same_affine_set(const AffineSet& a, const AffineSet& b);

// Image of an affine set under a linear map (used for ι(A) in the monotone model).
AffineSet map_affine(const AffineSet& a, const Matrix& map, SpacePtr target);

}  // namespace qpos

#endif  // QPOS_AFFINE_HPP
