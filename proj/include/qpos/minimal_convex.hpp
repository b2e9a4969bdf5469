#ifndef QPOS_MINIMAL_CONVEX_HPP
#define QPOS_MINIMAL_CONVEX_HPP

#include "qpos/affine.hpp"
#include "qpos/fitzpatrick.hpp"

#include <functional>
#include <optional>

namespace qpos {

// A proper convex function given by value and intrinsic-conjugate evaluators.
struct ConvexFunction {
  SpacePtr space;
  std::function<double(const Vector&)> value;
  std::function<double(const Vector&)> conjugate;
  // Affine set known to contain dom f^@ (lets searches over f^@ stay finite).
  std::optional<AffineSet> conjugate_domain_hull;
  std::string label;
};

ConvexFunction as_convex(const MaxAffineFn& f);
// Φ_P of an affine q-positive P, with Φ_P^@ = q + δ_P.
ConvexFunction phi_affine_function(const AffineSet& p);

// α max{f(x), q(x)} + β max{f^@(y), q(y)} ≥ q(αx + βy), β = 1 − α, within ε.
// A term with weight 0 is dropped; f^@(y) = +∞ with β > 0 makes the check vacuous.
// Verdict::value is LHS − RHS.
Verdict fund_ineq_check(const ConvexFunction& f, const Vector& x, const Vector& y, double alpha);
Verdict fund_ineq_check(const MaxAffineFn& f, const Vector& x, const Vector& y, double alpha);

// h = conv min{f̂, δ_{x} + cap}, cap = max{f^@(x), q(x)}, where f̂ is f on the
// certified box and +∞ outside it.
struct EnvelopeQuery {
  ConvexFunction f;
  Vector x;
  double cap = kInf;
  BoxGrid box;
};

EnvelopeQuery make_envelope(const ConvexFunction& f, const Vector& x, const BoxGrid& box);

// h(y) = inf over β of β·cap + (1 − β) f̂(y + s(y − x)), s = β/(1 − β); golden
// section on the β range keeping the point in the box. y = x gives min{f(x), cap}.
double envelope_eval(const EnvelopeQuery& e, const Vector& y);

// Φ_M^@(b) ≥ Φ_M(b) − 1e-8 on probes; probes with Φ_M^@(b) = +∞ are skipped.
// A necessary condition for Φ_M to be minimal; maximality of M is not checked.
Verdict minimal_selfconj_probe(const PointSet& m, const std::vector<Vector>& probes);

struct ConvMinValue {
  double value = kInf;
  double alpha = 1.0;  // weight on f
  Vector u;            // argument of f
  Vector v;            // argument of f^@
  double split_residual = 0.0;  // ‖αu + (1 − α)v − x‖
};

// Estimate of conv min{f, f^@}(x): golden section on α, grid plus compass search
// over v (on the conjugate's domain hull when known, else the box), u = (x − βv)/α.
// The value is attained by the reported split, so it bounds the envelope from above.
ConvMinValue convmin_eval(const ConvexFunction& f, const Vector& x, const BoxGrid& box);

// Checks conv min{f, f^@} ≥ q − 1e-6 at the probes. Both hypotheses f ≥ q and
// f^@ ≥ q are grid-certified on the box first (PreconditionError otherwise).
Verdict convmin_check(const ConvexFunction& f, const std::vector<Vector>& probes,
                      const BoxGrid& box);

}  // namespace qpos

#endif  // QPOS_MINIMAL_CONVEX_HPP
