#ifndef QPOS_SSDB_HPP
#define QPOS_SSDB_HPP

#include "qpos/affine.hpp"
#include "qpos/fitzpatrick.hpp"
#include "qpos/minimal_convex.hpp"

namespace qpos {

// SSD space with a norm ‖b‖² = bᵀGb for which b ↦ S b is a surjective isometry
// onto the dual norm, i.e. S G⁻¹ S = G.
class SsdbSpace {
 public:
  // Throws ArgumentError unless G is symmetric positive definite and
  // PreconditionError unless ‖S G⁻¹ S − G‖_max ≤ 1e-8.
  SsdbSpace(SpacePtr base, Matrix norm, std::string kind = "explicit");

  const SsdSpace& base() const { return *base_; }
  const SpacePtr& base_ptr() const { return base_; }
  const Matrix& norm_matrix() const { return g_; }
  const Matrix& norm_inverse() const { return g_inv_; }
  double isometry_residual() const { return residual_; }
  const std::string& kind() const { return kind_; }
  Eigen::Index dim() const { return base_->dim(); }

  double norm(const Vector& b) const;
  double dual_norm(const Vector& b_star) const;

 private:
  SpacePtr base_;
  Matrix g_;
  Matrix g_inv_;
  double residual_ = 0.0;
  std::string kind_;
};

// Rᵏ × Rᵏ with S = [[0,I],[I,0]], G = I.
SsdbSpace make_monotone_ssdb(int k);
// Rᵏ with S = G = I.
SsdbSpace make_hilbert_ssdb(int k);
// Rⁿ¹ × Rⁿ² with S = diag(I, −I), G = I (the Lipschitz model at K = 1).
SsdbSpace make_lipschitz_ssdb(int n1, int n2);

// max over `count` seeded random b of |‖S b‖_{G⁻¹} − ‖b‖_G|.
double isometry_sample_residual(const SsdbSpace& space, int count, unsigned seed);

// g₀ = ½‖·‖², and g₀^@ from the closed form ½ (Sb)ᵀG⁻¹(Sb) (= g₀).
double g0(const SsdbSpace& space, const Vector& b);
double g0_conjugate(const SsdbSpace& space, const Vector& b);
ConvexFunction g0_function(const SsdbSpace& space);

// Max-affine minorant of g₀ from tangent planes at the nodes of `nodes`.
MaxAffineFn g0_tangent_minorant(const SsdbSpace& space, const BoxGrid& nodes);

enum class Sign { kPlus, kMinus };

// HOLDS iff g₀(b) = ±q(b) within ε.
Verdict pq_g0_member(const SsdbSpace& space, const Vector& b, Sign sign);

// P_{±q}(g₀) = ker(G ∓ S), a linear subspace.
AffineSet pq_g0_set(const SsdbSpace& space, Sign sign);

struct SumDecomposition {
  Vector a;
  Vector c;
  double residual = 0.0;  // ‖a + c − x‖
};

// x = a + c with a ∈ A (maximal affine) and c ∈ P_{−q}(g₀), by one linear solve.
// PreconditionError if A is not maximal; InternalError if the joint system is singular.
SumDecomposition decompose_sum(const SsdbSpace& space, const AffineSet& a, const Vector& x);

// For each probe x ∈ A^π, tries x + p = y + z with y ∈ conv A and z ∈ p + P_{−q}(g₀).
// z = p forces x into conv A; z ≠ p or no decomposition means x ∈ A^π is not
// forced. HOLDS iff every probe in A^π is forced; value = number forced.
Verdict maximality_via_decomposition(const SsdbSpace& space, const PointSet& a, const Vector& p,
                                     const std::vector<Vector>& probes);

}  // namespace qpos

#endif  // QPOS_SSDB_HPP
