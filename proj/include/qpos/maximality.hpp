#ifndef QPOS_MAXIMALITY_HPP
#define QPOS_MAXIMALITY_HPP

#include "qpos/affine.hpp"
#include "qpos/core.hpp"
#include "qpos/numerics.hpp"

#include <functional>
#include <optional>

namespace qpos {

enum class PremaxClass { kViaPhiDominance, kViaAffinePi, kNotPremaximal, kUndecided };

std::string_view to_string(PremaxClass c);

struct PremaxReport {
  // Φ_P ≥ q over the box. FAILS carries b with q(b) − Φ_P(b) > ε (value = that gap).
  Verdict phi_dominates_q;
  // P^π is q-positive: exact for affine P, on a sampled P^π net otherwise.
  Verdict pi_positive;
  PremaxClass classification = PremaxClass::kUndecided;
  BoxGrid box;
  // Membership in the unique maximal superset when premaximal.
  std::function<bool(const Vector&)> maximal_superset;
  // Affine P only: P^π as an affine set when it is affine, and dom Φ_P.
  std::optional<AffineSet> pi_affine;
  std::optional<AffineSet> phi_domain;
  // Affine P only: dom Φ_P = P^π, decided exactly.
  Verdict domain_is_pi;
};

// Certifies Φ_P ≥ q on the box; when it fails, falls back on the structure of P^π.
// Finite P: a violating pair on the sampled P^π net gives NOT_PREMAXIMAL.
// Affine P: P^π is computed exactly. A proper dom Φ_P (Φ_P = +∞ off an affine
// subspace) is classified through the exact P^π route.
PremaxReport premax_certify(const PointSet& p, const BoxGrid& box);
PremaxReport premax_certify(const AffineSet& p, const BoxGrid& box);

// Grid points of the box in A^π (evenly thinned to at most `cap`).
std::vector<Vector> pi_net(const PointSet& a, const BoxGrid& box, std::size_t cap = 600);

// Pair of net points with the most negative q(b1 − b2); FAILS when below −ε.
Verdict net_q_positive(const SsdSpace& space, const std::vector<Vector>& net);

// Net version of A^πππ = A^π: N = probes ∩ A^π, N2 = (probes ∪ A) related to all
// of N, N3 = probes related to all of N2. HOLDS iff N3 = N and A ⊆ N2.
Verdict third_polar_check(const PointSet& a, const std::vector<Vector>& probes,
                          std::optional<double> resolution = std::nullopt);

struct ExtensionFamily {
  Vector x1;
  Vector x2;
  std::vector<double> lambdas;
  std::vector<Vector> points;
  // min over a ∈ A, λ ∈ [0,1] of q(x_λ − a) (exact, by concavity in λ).
  double min_margin = kInf;
  // max over sample pairs of |q(x_λi − x_λj) − (λi − λj)² q(x1 − x2)|.
  double max_identity_residual = 0.0;
  Verdict verified;
};

// x_λ = λ x1 + (1 − λ) x2, λ = i/(count − 1). Each A ∪ {x_λ} is q-positive and
// no two x_λ share a q-positive extension.
ExtensionFamily extension_continuum(const PointSet& a, const Vector& x1, const Vector& x2,
                                    int count);

struct NiReport {
  Verdict ni;            // sup over the box of inf_a ⟨a* − y*, a − y**⟩ ≤ ε
  Verdict phi_dominates_q;  // Φ_{ι(A)} ≥ q on the same box
  bool agree = false;
};

// NI condition in the monotone model Rᵏ × Rᵏ, with ι(x, x*) = (x*, x).
// Throws ArgumentError unless the space is the monotone model.
NiReport ni_type_check(const PointSet& a, const BoxGrid& box);
NiReport ni_type_check(const AffineSet& a, const BoxGrid& box);

// Coordinate swap (x, x*) ↦ (x*, x) on R²ᵏ.
Matrix swap_matrix(Eigen::Index k);
bool is_monotone_model(const SsdSpace& space);

}  // namespace qpos

#endif  // QPOS_MAXIMALITY_HPP
