#ifndef QPOS_CORE_HPP
#define QPOS_CORE_HPP

#include "qpos/common.hpp"

#include <memory>
#include <span>

namespace qpos {

// A finite-dimensional SSD space: Rⁿ with the symmetric bilinear form
// ⌊b,c⌋ = bᵀ S c and the quadratic form q(b) = ½⌊b,b⌋.
//
// S must be symmetric exactly as stored. The space is flagged degenerate when
// S has a singular value below 1e-10 (relative to max(1, ‖S‖)); the weak
// topology w(B,B) is then the pullback of the standard one through b ↦ S b.
class SsdSpace {
 public:
  explicit SsdSpace(Matrix s);

  Eigen::Index dim() const { return s_.rows(); }
  const Matrix& form() const { return s_; }
  bool degenerate() const { return degenerate_; }

  double pairing(const Vector& b, const Vector& c) const;
  double q(const Vector& b) const;
  // S b (the image i(b) of b in the dual).
  Vector apply(const Vector& b) const;

  // min over rows p of `points` (m×n, row-major) of q(x − p).
  double min_q_gap(std::span<const double> points, const Vector& x) const;

 private:
  Matrix s_;
  Matrix neg_s_;
  bool degenerate_ = false;
};

using SpacePtr = std::shared_ptr<const SsdSpace>;

SpacePtr make_space(Matrix s);
// S = [[0, I_k], [I_k, 0]]: B = Rᵏ × Rᵏ with q(x, x*) = ⟨x, x*⟩.
SpacePtr make_monotone_space(int k);

// Nonempty finite set of distinct points of an SSD space.
class PointSet {
 public:
  PointSet(SpacePtr space, std::vector<Vector> points);

  const SsdSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t size() const { return points_.size(); }
  const Vector& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Vector>& points() const { return points_; }
  // Points packed m×n row-major for the kernels.
  std::span<const double> packed() const { return packed_; }

  PointSet with_point(const Vector& p) const;

 private:
  SpacePtr space_;
  std::vector<Vector> points_;
  std::vector<double> packed_;
};

double pairing(const SsdSpace& space, const Vector& b, const Vector& c);
double q_value(const SsdSpace& space, const Vector& b);

// HOLDS iff q(aᵢ − aⱼ) ≥ −ε for all pairs; FAILS carries the worst pair.
Verdict is_q_positive(const PointSet& a);

// HOLDS iff min over a ∈ A of q(b − a) ≥ −ε (b ∈ A^π); FAILS carries the violating a.
Verdict pi_member(const PointSet& a, const Vector& b);

// b ∈ conv^w A. Nonsingular S: b ∈ conv A. Singular S: S b ∈ S·conv A.
Verdict conv_w_hull_member(const PointSet& a, const Vector& b);

namespace testing {
// Mutation hook: when enabled, q_value returns −½ bᵀ S b. Used only by the
// mutation sentinel to prove the property batteries are not vacuous.
void set_q_sign_flip(bool on);
bool q_sign_flipped();
}  // namespace testing

}  // namespace qpos

#endif  // QPOS_CORE_HPP
