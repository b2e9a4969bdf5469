#ifndef QPOS_LIPSCHITZ_HPP
#define QPOS_LIPSCHITZ_HPP

#include "qpos/core.hpp"

#include <optional>

namespace qpos {

// Rⁿ¹ × Rⁿ² with S = diag(K² I, −I): q(x1, x2) = ½(K²‖x1‖² − ‖x2‖²).
class LipschitzSpace {
 public:
  LipschitzSpace(double k, int n1, int n2);

  double k() const { return k_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  const SpacePtr& space() const { return space_; }
  // SSDB (with the Euclidean norm) exactly when K = 1.
  bool is_ssdb() const { return k_ == 1.0; }

  Vector join(const Vector& x1, const Vector& x2) const;

 private:
  double k_;
  int n1_;
  int n2_;
  SpacePtr space_;
};

// Finite graph {(dᵢ, vᵢ)} with distinct domain points.
class GraphSet {
 public:
  GraphSet(LipschitzSpace space, std::vector<Vector> domain, std::vector<Vector> values);

  const LipschitzSpace& lspace() const { return space_; }
  const std::vector<Vector>& domain() const { return domain_; }
  const std::vector<Vector>& values() const { return values_; }
  std::size_t size() const { return domain_.size(); }
  const PointSet& points() const { return points_; }

 private:
  LipschitzSpace space_;
  std::vector<Vector> domain_;
  std::vector<Vector> values_;
  PointSet points_;
};

// ‖vᵢ − vⱼ‖ ≤ K‖dᵢ − dⱼ‖ for all pairs, as ‖Δv‖² ≤ K²‖Δd‖² + 2ε. FAILS carries the
// worst pair (as joined points). Throws InternalError if the answer differs from
// is_q_positive on the induced point set. `modulus` overrides K.
Verdict lipschitz_check(const GraphSet& g, std::optional<double> modulus = std::nullopt);

// ½ max_i {−K²‖dᵢ − x1‖² + ‖vᵢ − x2‖²} + (K²/2)‖x1‖² − ½‖x2‖².
double phi_graph_eval(const GraphSet& g, const Vector& x1, const Vector& x2);

// McShane extension min_i (vᵢ + K‖x − dᵢ‖) and its lower counterpart
// max_i (vᵢ − K‖x − dᵢ‖); n2 = 1. `modulus` overrides K.
double mcshane_extend_scalar(const GraphSet& g, const Vector& query,
                             std::optional<double> modulus = std::nullopt);
double mcshane_lower_scalar(const GraphSet& g, const Vector& query,
                            std::optional<double> modulus = std::nullopt);

struct ExtensionBracket {
  double lower;
  double upper;
};
// Every K-Lipschitz extension takes a value in [lower, upper] at the query.
ExtensionBracket mcshane_bracket(const GraphSet& g, const Vector& query);

// A = {(0,0), (1,1)} in R × R with K = 1: (t,t) ∈ P_q(Φ_A^@) for every t of the
// grid (all in [0,1]) and no off-probe is. FAILS carries the first mismatch.
Verdict identity_example_check(const std::vector<double>& t_grid,
                               const std::vector<Vector>& off_probes);

// g samples a K′-Lipschitz scalar map. Builds two K-Lipschitz extensions that
// disagree at x1 (values y0 and y0 + r/2, r = (K − K′) dist(x1, domain)) and checks
// both graphs stay q-positive on `count` seeded sample queries. HOLDS means no
// point above x1 lies in every extension graph (at sample resolution).
Verdict closed_domain_repr_probe(const GraphSet& g, double k_prime, double k, const Vector& x1,
                                 int count, unsigned seed = 11);

}  // namespace qpos

#endif  // QPOS_LIPSCHITZ_HPP
