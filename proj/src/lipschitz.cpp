#include "qpos/lipschitz.hpp"

#include "qpos/fitzpatrick.hpp"

#include <cmath>
#include <random>

namespace qpos {

namespace {

PointSet induced(const LipschitzSpace& s, const std::vector<Vector>& domain,
                 const std::vector<Vector>& values) {
  if (domain.empty()) throw ArgumentError("graph needs at least one point");
  if (domain.size() != values.size()) throw ArgumentError("graph domain and values differ in size");
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    require_dim(domain[i], s.n1(), "graph domain point");
    require_dim(values[i], s.n2(), "graph value");
    for (std::size_t j = 0; j < i; ++j)
      if ((domain[i] - domain[j]).norm() <= 1e-12)
        throw ArgumentError("graph domain points must be distinct");
    pts.push_back(s.join(domain[i], values[i]));
  }
  return PointSet(s.space(), std::move(pts));
}

void require_scalar(const GraphSet& g, const char* op) {
  if (g.lspace().n2() != 1) throw ArgumentError(std::string(op) + ": needs scalar values");
}

}  // namespace

LipschitzSpace::LipschitzSpace(double k, int n1, int n2) : k_(k), n1_(n1), n2_(n2) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ArgumentError("Lipschitz constant must be positive");
  if (n1 < 1 || n2 < 1) throw ArgumentError("Lipschitz model needs n1, n2 >= 1");
  Vector d(n1 + n2);
  d.head(n1).setConstant(k * k);
  d.tail(n2).setConstant(-1.0);
  space_ = make_space(d.asDiagonal());
}

Vector LipschitzSpace::join(const Vector& x1, const Vector& x2) const {
  require_dim(x1, n1_, "domain component");
  require_dim(x2, n2_, "value component");
  Vector out(n1_ + n2_);
  out << x1, x2;
  return out;
}

GraphSet::GraphSet(LipschitzSpace space, std::vector<Vector> domain, std::vector<Vector> values)
    : space_(std::move(space)),
      domain_(std::move(domain)),
      values_(std::move(values)),
      points_(induced(space_, domain_, values_)) {}

Verdict lipschitz_check(const GraphSet& g, std::optional<double> modulus) {
  const double k = modulus.value_or(g.lspace().k());
  const double eps = tolerance();
  double worst = kInf;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double dx = (g.domain()[i] - g.domain()[j]).squaredNorm();
      const double dy = (g.values()[i] - g.values()[j]).squaredNorm();
      const double margin = k * k * dx - dy;
      if (margin < worst) {
        worst = margin;
        bi = i;
        bj = j;
      }
    }
  const bool ok = g.size() < 2 || worst >= -2.0 * eps;
  if (!modulus || *modulus == g.lspace().k()) {
    if (ok != is_q_positive(g.points()).holds())
      throw InternalError("lipschitz_check disagrees with is_q_positive on the graph");
  }
  if (ok) {
    Verdict v = Verdict::Holds();
    v.value = g.size() < 2 ? kInf : 0.5 * worst;
    return v;
  }
  Verdict v = Verdict::Fails({g.points()[bi], g.points()[bj]}, "Lipschitz bound violated");
  v.value = 0.5 * worst;
  return v;
}

double phi_graph_eval(const GraphSet& g, const Vector& x1, const Vector& x2) {
  const LipschitzSpace& s = g.lspace();
  require_dim(x1, s.n1(), "phi_graph_eval x1");
  require_dim(x2, s.n2(), "phi_graph_eval x2");
  const double k2 = s.k() * s.k();
  double best = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i)
    best = std::max(best, -k2 * (g.domain()[i] - x1).squaredNorm() +
                              (g.values()[i] - x2).squaredNorm());
  return 0.5 * best + 0.5 * k2 * x1.squaredNorm() - 0.5 * x2.squaredNorm();
}

double mcshane_extend_scalar(const GraphSet& g, const Vector& query,
                             std::optional<double> modulus) {
  require_scalar(g, "mcshane_extend_scalar");
  require_dim(query, g.lspace().n1(), "mcshane query");
  const double k = modulus.value_or(g.lspace().k());
  if (!lipschitz_check(g, k).holds())
    throw PreconditionError("mcshane_extend_scalar: graph is not K-Lipschitz");
  double best = kInf;
  for (std::size_t i = 0; i < g.size(); ++i)
    best = std::min(best, g.values()[i](0) + k * (query - g.domain()[i]).norm());
  return best;
}

double mcshane_lower_scalar(const GraphSet& g, const Vector& query,
                            std::optional<double> modulus) {
  require_scalar(g, "mcshane_lower_scalar");
  require_dim(query, g.lspace().n1(), "mcshane query");
  const double k = modulus.value_or(g.lspace().k());
  if (!lipschitz_check(g, k).holds())
    throw PreconditionError("mcshane_lower_scalar: graph is not K-Lipschitz");
  double best = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i)
    best = std::max(best, g.values()[i](0) - k * (query - g.domain()[i]).norm());
  return best;
}

ExtensionBracket mcshane_bracket(const GraphSet& g, const Vector& query) {
  return {mcshane_lower_scalar(g, query), mcshane_extend_scalar(g, query)};
}

Verdict identity_example_check(const std::vector<double>& t_grid,
                               const std::vector<Vector>& off_probes) {
  const LipschitzSpace ls(1.0, 1, 1);
  const PointSet a(ls.space(), {Vector::Zero(2), Vector::Ones(2)});
  const MaxAffineFn phi = phi_build(a);
  for (double t : t_grid) {
    const Vector b = Vector::Constant(2, t);
    if (!repr_hull_member(a, phi, b).holds())
      return Verdict::Fails({b}, "(t,t) expected in the representable hull");
  }
  for (const Vector& b : off_probes) {
    require_dim(b, 2, "identity_example_check probe");
    if (repr_hull_member(a, phi, b).holds())
      return Verdict::Fails({b}, "off-probe unexpectedly in the representable hull");
  }
  Verdict v = Verdict::Holds("representable hull is the diagonal segment over [0,1]");
  v.value = static_cast<double>(t_grid.size());
  return v;
}

Verdict closed_domain_repr_probe(const GraphSet& g, double k_prime, double k, const Vector& x1,
                                 int count, unsigned seed) {
  require_scalar(g, "closed_domain_repr_probe");
  const LipschitzSpace& ls = g.lspace();
  require_dim(x1, ls.n1(), "closed_domain_repr_probe x1");
  if (!(k_prime > 0.0) || !(k > k_prime))
    throw PreconditionError("closed_domain_repr_probe: requires 0 < K' < K");
  if (!lipschitz_check(g, k_prime).holds())
    throw PreconditionError("closed_domain_repr_probe: samples are not K'-Lipschitz");
  double dist = kInf;
  for (const Vector& d : g.domain()) dist = std::min(dist, (x1 - d).norm());
  if (dist <= 1e-12) throw PreconditionError("closed_domain_repr_probe: x1 is a domain point");

  const double y0 = mcshane_extend_scalar(g, x1, k_prime);
  const double radius = (k - k_prime) * dist;
  const double y1 = y0 + 0.5 * radius;

  // Both extensions are evaluated as McShane extensions at modulus K of the data
  // plus the value prescribed at x1.
  const LipschitzSpace target(k, ls.n1(), 1);
  auto with_x1 = [&](double y) {
    std::vector<Vector> dom = g.domain(), val = g.values();
    dom.push_back(x1);
    val.push_back(Vector::Constant(1, y));
    return GraphSet(target, std::move(dom), std::move(val));
  };
  const GraphSet e0 = with_x1(y0);
  const GraphSet e1 = with_x1(y1);
  if (!lipschitz_check(e0).holds() || !lipschitz_check(e1).holds())
    return Verdict::Fails({target.join(x1, Vector::Constant(1, y1))},
                          "prescribed value at x1 breaks the K-Lipschitz bound");

  Vector lo = Vector::Constant(ls.n1(), kInf), hi = Vector::Constant(ls.n1(), -kInf);
  for (const Vector& d : e0.domain()) {
    lo = lo.cwiseMin(d);
    hi = hi.cwiseMax(d);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_graph = [&](const GraphSet& e, std::mt19937_64 r) {
    std::vector<Vector> dom = e.domain(), val = e.values();
    for (int i = 0; i < count; ++i) {
      Vector x(ls.n1());
      for (Eigen::Index j = 0; j < x.size(); ++j)
        x(j) = lo(j) - 1.0 + (hi(j) - lo(j) + 2.0) * unit(r);
      bool fresh = true;
      for (const Vector& d : dom) fresh = fresh && (x - d).norm() > 1e-9;
      if (!fresh) continue;
      val.push_back(Vector::Constant(1, mcshane_extend_scalar(e, x)));
      dom.push_back(std::move(x));
    }
    return GraphSet(target, std::move(dom), std::move(val));
  };
  const GraphSet s0 = sample_graph(e0, rng);
  const GraphSet s1 = sample_graph(e1, rng);
  if (!is_q_positive(s0.points()).holds() || !is_q_positive(s1.points()).holds())
    return Verdict::Fails({}, "an extension graph is not q-positive on the samples");
  Verdict v = Verdict::Holds("two K-Lipschitz extensions disagree at x1 (sample resolution)");
  v.witness = {target.join(x1, Vector::Constant(1, y0)), target.join(x1, Vector::Constant(1, y1))};
  v.value = y1 - y0;
  return v;
}

}  // namespace qpos
