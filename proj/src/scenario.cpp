#include "qpos/scenario.hpp"

#include "qpos/affine.hpp"
#include "qpos/fitzpatrick.hpp"
#include "qpos/hilbert_sets.hpp"
#include "qpos/kernels.hpp"
#include "qpos/lipschitz.hpp"
#include "qpos/maximality.hpp"
#include "qpos/minimal_convex.hpp"
#include "qpos/ssdb.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <variant>

namespace qpos::cli {

namespace {

using SetValue = std::variant<PointSet, AffineSet, GraphSet, ClosedSetDescriptor>;

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError(msg); }

const Json& member(const Json& obj, const char* key, const char* where) {
  if (!obj.is_object()) fail(std::string(where) + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(std::string(where) + ": missing \"" + key + "\"");
  return *it;
}

Vector to_vector(const Json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = number_from_json(j[i], what);
  return v;
}

std::vector<Vector> to_vectors(const Json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + ": expected an array of arrays");
  std::vector<Vector> out;
  for (const Json& e : j) out.push_back(to_vector(e, what));
  return out;
}

// Rows (or columns when `columns`) of equal length.
Matrix to_matrix(const Json& j, const char* what, bool columns, Eigen::Index n = -1) {
  const std::vector<Vector> vs = to_vectors(j, what);
  if (vs.empty()) {
    if (columns && n >= 0) return Matrix(n, 0);
    fail(std::string(what) + ": empty matrix");
  }
  const Eigen::Index len = vs.front().size();
  for (const Vector& v : vs)
    if (v.size() != len) fail(std::string(what) + ": ragged matrix");
  Matrix m(columns ? len : static_cast<Eigen::Index>(vs.size()),
           columns ? static_cast<Eigen::Index>(vs.size()) : len);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (columns)
      m.col(static_cast<Eigen::Index>(i)) = vs[i];
    else
      m.row(static_cast<Eigen::Index>(i)) = vs[i].transpose();
  }
  return m;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_to_json(v(i)));
  return a;
}

std::vector<Vector> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read CSV file " + path.string());
  std::vector<Vector> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header line
      fail("non-numeric CSV row in " + path.string());
    }
    Vector v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    rows.push_back(std::move(v));
  }
  return rows;
}

struct Context {
  SpacePtr space;
  std::string kind;
  std::optional<LipschitzSpace> lspace;
  std::optional<SsdbSpace> ssdb;
  std::map<std::string, SetValue> sets;
  BoxGrid grid;
  std::uint64_t seed = 0;
  std::optional<double> pitch_override;
  std::filesystem::path base_dir;
};

void parse_space(Context& ctx, const Json& desc) {
  const std::string kind = member(desc, "kind", "space").get<std::string>();
  ctx.kind = kind;
  if (kind == "monotone") {
    const int k = member(desc, "k", "space").get<int>();
    ctx.ssdb = make_monotone_ssdb(k);
    ctx.space = ctx.ssdb->base_ptr();
  } else if (kind == "hilbert") {
    const int k = member(desc, "k", "space").get<int>();
    ctx.ssdb = make_hilbert_ssdb(k);
    ctx.space = ctx.ssdb->base_ptr();
  } else if (kind == "lipschitz") {
    const double k = number_from_json(member(desc, "K", "space"), "space.K");
    const int n1 = member(desc, "n1", "space").get<int>();
    const int n2 = member(desc, "n2", "space").get<int>();
    ctx.lspace.emplace(k, n1, n2);
    ctx.space = ctx.lspace->space();
    if (ctx.lspace->is_ssdb()) ctx.ssdb = SsdbSpace(ctx.space, Matrix::Identity(n1 + n2, n1 + n2), "lipschitz");
  } else if (kind == "explicit") {
    ctx.space = make_space(to_matrix(member(desc, "S", "space"), "space.S", false));
    if (desc.contains("G"))
      ctx.ssdb = SsdbSpace(ctx.space, to_matrix(desc["G"], "space.G", false), "explicit");
  } else {
    fail("unknown space kind \"" + kind + "\"");
  }
}

BoxGrid parse_grid(const Json& g, Eigen::Index dim, const std::optional<double>& pitch_override) {
  BoxGrid out = BoxGrid::cube(dim, 2.0, 0.1);
  if (!g.is_null()) {
    if (!g.is_object()) fail("grid: expected an object");
    const double pitch = g.contains("pitch") ? number_from_json(g["pitch"], "grid.pitch") : 0.1;
    const int ms = g.contains("multistarts") ? g["multistarts"].get<int>() : 4;
    if (g.contains("lower") || g.contains("upper")) {
      out = BoxGrid(to_vector(member(g, "lower", "grid"), "grid.lower"),
                    to_vector(member(g, "upper", "grid"), "grid.upper"), pitch, ms);
    } else {
      const double half = g.contains("half_width") ? number_from_json(g["half_width"], "grid.half_width")
                                                   : 2.0;
      const Eigen::Index d = g.contains("dim") ? g["dim"].get<Eigen::Index>() : dim;
      out = BoxGrid::cube(d, half, pitch, ms);
    }
  }
  if (pitch_override) out.pitch = *pitch_override;
  return out;
}

SetValue parse_set(const Context& ctx, const Json& desc, const std::string& name) {
  const std::string where = "set \"" + name + "\"";
  const std::string type = member(desc, "type", where.c_str()).get<std::string>();
  if (type == "points") {
    std::vector<Vector> pts = desc.contains("csv")
                                  ? read_csv(ctx.base_dir / desc["csv"].get<std::string>())
                                  : to_vectors(member(desc, "points", where.c_str()), where.c_str());
    return PointSet(ctx.space, std::move(pts));
  }
  if (type == "affine") {
    const Vector x0 = to_vector(member(desc, "anchor", where.c_str()), where.c_str());
    const Matrix v = to_matrix(desc.value("basis", Json::array()), where.c_str(), true, x0.size());
    return AffineSet(ctx.space, x0, v);
  }
  if (type == "graph") {
    if (!ctx.lspace) fail(where + ": graphs need a lipschitz space");
    std::vector<Vector> dom, val;
    if (desc.contains("csv")) {
      const int n1 = ctx.lspace->n1(), n2 = ctx.lspace->n2();
      for (const Vector& row : read_csv(ctx.base_dir / desc["csv"].get<std::string>())) {
        if (row.size() != n1 + n2) fail(where + ": CSV rows need n1 + n2 columns");
        dom.push_back(row.head(n1));
        val.push_back(row.tail(n2));
      }
    } else {
      dom = to_vectors(member(desc, "domain", where.c_str()), where.c_str());
      val = to_vectors(member(desc, "values", where.c_str()), where.c_str());
    }
    return GraphSet(*ctx.lspace, std::move(dom), std::move(val));
  }
  if (type == "descriptor") {
    const std::string kind = member(desc, "kind", where.c_str()).get<std::string>();
    if (kind == "finite")
      return ClosedSetDescriptor::finite(to_vectors(member(desc, "points", where.c_str()), where.c_str()));
    if (kind == "axis_cross") return ClosedSetDescriptor::axis_cross();
    if (kind == "segments") {
      std::vector<std::pair<Vector, Vector>> segs;
      for (const Json& s : member(desc, "segments", where.c_str())) {
        if (!s.is_array() || s.size() != 2) fail(where + ": a segment is a pair of points");
        segs.emplace_back(to_vector(s[0], where.c_str()), to_vector(s[1], where.c_str()));
      }
      return ClosedSetDescriptor::segments(std::move(segs));
    }
    fail(where + ": unknown descriptor kind \"" + kind + "\"");
  }
  fail(where + ": unknown set type \"" + type + "\"");
}

// Per-query view: arguments plus the shared context.
struct Query {
  const Context& ctx;
  const Json& args;

  bool has(const char* key) const { return args.contains(key); }
  const Json& at(const char* key) const { return member(args, key, "query args"); }
  Vector vec(const char* key) const { return to_vector(at(key), key); }
  std::vector<Vector> vecs(const char* key) const { return to_vectors(at(key), key); }
  double num(const char* key) const { return number_from_json(at(key), key); }
  double num(const char* key, double def) const { return has(key) ? num(key) : def; }
  int integer(const char* key, int def) const { return has(key) ? at(key).get<int>() : def; }

  BoxGrid grid() const {
    if (!has("grid")) return ctx.grid;
    return parse_grid(args["grid"], ctx.space->dim(), ctx.pitch_override);
  }
  BoxGrid grid_for(Eigen::Index dim) const {
    if (has("grid")) return parse_grid(args["grid"], dim, ctx.pitch_override);
    if (ctx.grid.dim() == dim) return ctx.grid;
    return BoxGrid::cube(dim, 2.0, ctx.pitch_override.value_or(ctx.grid.pitch), ctx.grid.multistarts);
  }
  std::vector<Vector> probes_or_grid(Eigen::Index dim) const {
    if (has("probes")) return vecs("probes");
    return grid_for(dim).points();
  }

  SetValue set() const {
    const Json& s = at("set");
    if (s.is_string()) {
      const auto it = ctx.sets.find(s.get<std::string>());
      if (it == ctx.sets.end()) fail("unknown set \"" + s.get<std::string>() + "\"");
      return it->second;
    }
    return parse_set(ctx, s, "inline");
  }
  template <class T>
  T set_as(const char* what) const {
    SetValue v = set();
    if (auto* p = std::get_if<T>(&v)) return *p;
    fail(std::string("argument \"set\" must be ") + what);
  }
  const SsdbSpace& ssdb() const {
    if (!ctx.ssdb) fail("operation needs an SSDB space (monotone, hilbert, lipschitz K=1, or explicit with G)");
    return *ctx.ssdb;
  }
};

struct Outcome {
  std::string status = "VALUE";
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<Vector> witness;
  std::optional<double> resolution;
  bool grid_certified = false;
  std::string note;
  Json details = Json::object();
};

Outcome from_verdict(const Verdict& v) {
  Outcome o;
  o.status = std::string(to_string(v.status));
  o.value = v.value;
  o.witness = v.witness;
  o.resolution = v.resolution;
  o.grid_certified = v.grid_certified;
  o.note = v.note;
  return o;
}

Outcome value_outcome(double v, std::string note = {}) {
  Outcome o;
  o.value = v;
  o.note = std::move(note);
  return o;
}

PointSet points_of(const SetValue& v) {
  if (const auto* p = std::get_if<PointSet>(&v)) return *p;
  if (const auto* g = std::get_if<GraphSet>(&v)) return g->points();
  if (const auto* d = std::get_if<ClosedSetDescriptor>(&v))
    if (d->kind() == DescriptorKind::kFinitePoints) return PointSet(d->space(), d->points());
  fail("argument \"set\" must be a finite point set (points, graph or finite descriptor)");
}

using OpFn = std::function<Outcome(const Query&)>;

Json verdict_json(const Verdict& v) {
  Json j;
  j["status"] = std::string(to_string(v.status));
  j["value"] = number_to_json(v.value);
  Json w = Json::array();
  for (const Vector& x : v.witness) w.push_back(vector_json(x));
  j["witness"] = w;
  j["note"] = v.note;
  return j;
}

const std::map<std::string, OpFn>& operations() {
  static const std::map<std::string, OpFn> ops = {
      // ssd-core
      {"pairing", [](const Query& q) { return value_outcome(pairing(*q.ctx.space, q.vec("b"), q.vec("c"))); }},
      {"q_value", [](const Query& q) { return value_outcome(q_value(*q.ctx.space, q.vec("b"))); }},
      {"is_q_positive",
       [](const Query& q) {
         const SetValue s = q.set();
         if (const auto* a = std::get_if<AffineSet>(&s)) return from_verdict(affine_is_q_positive(*a));
         return from_verdict(is_q_positive(points_of(s)));
       }},
      {"pi_member",
       [](const Query& q) {
         const SetValue s = q.set();
         if (const auto* a = std::get_if<AffineSet>(&s)) {
           const PiDescription d = affine_pi(*a);
           const Vector b = q.vec("b");
           Outcome o = from_verdict(d.contains(b) ? Verdict::Holds("exact affine description")
                                                  : Verdict::Fails({b}, "outside A^pi"));
           o.value = d.linear_ok(b) ? d.quadratic_residual(b) : -kInf;
           return o;
         }
         return from_verdict(pi_member(points_of(s), q.vec("b")));
       }},
      {"conv_w_hull_member",
       [](const Query& q) { return from_verdict(conv_w_hull_member(points_of(q.set()), q.vec("b"))); }},
      // numerics
      {"lp_min",
       [](const Query& q) {
         SimplexLp lp{q.vec("costs"), to_matrix(q.at("columns"), "columns", true), q.vec("target")};
         const LpSolution s = lp_min(lp);
         Outcome o;
         o.status = s.feasible ? "HOLDS" : "FAILS";
         o.note = s.feasible ? "feasible" : "INFEASIBLE";
         o.value = s.value;
         if (s.feasible) o.details["weights"] = vector_json(s.weights);
         o.details["iterations"] = s.iterations;
         return o;
       }},
      {"psd_on_subspace",
       [](const Query& q) {
         const Matrix s = q.has("S") ? to_matrix(q.at("S"), "S", false) : q.ctx.space->form();
         return from_verdict(psd_on_subspace(s, to_matrix(q.at("V"), "V", true)));
       }},
      {"min_q_over_affine",
       [](const Query& q) {
         const Vector r = q.vec("r");
         const AffineMin m = min_q_over_affine(*q.ctx.space, r, to_matrix(q.at("V"), "V", true, r.size()));
         Outcome o = value_outcome(m.minus_infinity ? -kInf : m.value,
                                   m.minus_infinity ? "MINUS_INFINITY" : "");
         if (!m.minus_infinity) o.details["argmin"] = vector_json(m.argmin);
         return o;
       }},
      {"grid_max_q_minus_phi",
       [](const Query& q) {
         const PointSet a = points_of(q.set());
         const MaxAffineFn phi = phi_build(a);
         const GridMax g = grid_multistart_max(
             [&](const Vector& x) { return a.space().q(x) - phi(x); }, q.grid());
         Outcome o = value_outcome(g.value);
         o.witness = {g.argmax};
         o.resolution = q.grid().pitch;
         o.grid_certified = true;
         return o;
       }},
      // fitzpatrick
      {"phi_eval",
       [](const Query& q) {
         const SetValue s = q.set();
         if (const auto* a = std::get_if<AffineSet>(&s)) return value_outcome(phi_affine_eval(*a, q.vec("x")));
         if (const auto* d = std::get_if<ClosedSetDescriptor>(&s))
           return value_outcome(phi_closed_eval(*d, q.vec("x")));
         return value_outcome(phi_build(points_of(s))(q.vec("x")));
       }},
      {"conj_eval",
       [](const Query& q) {
         const SetValue s = q.set();
         if (const auto* a = std::get_if<AffineSet>(&s)) return value_outcome(phi_affine_conj(*a, q.vec("b")));
         const ConjugateQuery c = conj_eval(phi_build(points_of(s)), q.vec("b"));
         Outcome o = value_outcome(c.value, c.finite() ? "" : "INFEASIBLE");
         if (c.finite()) o.details["weights"] = vector_json(c.weights);
         return o;
       }},
      {"pq_member",
       [](const Query& q) { return from_verdict(pq_member(phi_build(points_of(q.set())), q.vec("b"))); }},
      {"pq_member_conjugate",
       [](const Query& q) {
         return from_verdict(pq_member_conjugate(phi_build(points_of(q.set())), q.vec("b")));
       }},
      {"repr_hull_member",
       [](const Query& q) { return from_verdict(repr_hull_member(points_of(q.set()), q.vec("b"))); }},
      {"q_subdiff_check",
       [](const Query& q) {
         return from_verdict(q_subdiff_check(phi_build(points_of(q.set())), q.vec("a"), q.vec("b")));
       }},
      {"g_phi_member",
       [](const Query& q) {
         const SetValue s = q.set();
         if (const auto* d = std::get_if<ClosedSetDescriptor>(&s);
             d && d->kind() != DescriptorKind::kFinitePoints)
           return from_verdict(g_phi_closed_member(*d, q.vec("b"), q.grid_for(d->dim())));
         return from_verdict(g_phi_member(points_of(s), q.vec("b")));
       }},
      {"check_ineq_on_hull",
       [](const Query& q) {
         const PointSet a = points_of(q.set());
         const HullInequalityReport r = check_ineq_on_hull(
             a, q.has("probes") ? q.vecs("probes") : std::vector<Vector>{},
             q.integer("edge_samples", 21), q.integer("interior_samples", 200),
             static_cast<unsigned>(q.ctx.seed));
         Outcome o = from_verdict(r.consequence.undecided() && r.hypothesis.fails() ? r.hypothesis
                                                                                     : r.consequence);
         o.details["hypothesis"] = verdict_json(r.hypothesis);
         o.details["consequence"] = verdict_json(r.consequence);
         o.details["max_violation"] = number_to_json(r.max_violation);
         return o;
       }},
      // affine-sets
      {"affine_is_maximal",
       [](const Query& q) { return from_verdict(affine_is_maximal(q.set_as<AffineSet>("an affine set"))); }},
      {"affine_pi_shape",
       [](const Query& q) {
         const PiShape s = affine_pi_shape(q.set_as<AffineSet>("an affine set"));
         Outcome o;
         o.status = s.affine ? "HOLDS" : "FAILS";
         o.note = s.affine ? "A^pi is affine" : "A^pi is not convex";
         o.witness = s.witness_pair;
         if (s.affine) {
           o.details["anchor"] = vector_json(s.anchor);
           Json cols = Json::array();
           for (Eigen::Index j = 0; j < s.basis.cols(); ++j) cols.push_back(vector_json(s.basis.col(j)));
           o.details["basis"] = cols;
         }
         return o;
       }},
      {"maximal_convex_affinity_falsifier",
       [](const Query& q) {
         const AffineSet m = q.set_as<AffineSet>("an affine set (the membership oracle)");
         std::vector<double> scales{2.0, 3.0};
         if (q.has("scales")) {
           scales.clear();
           for (const Json& s : q.at("scales")) scales.push_back(number_from_json(s, "scales"));
         }
         return from_verdict(maximal_convex_affinity_falsifier(
             m.space(), [&](const Vector& b) { return m.contains(b); }, q.vec("x0"), q.vecs("probes"),
             scales));
       }},
      // maximality
      {"premax_certify",
       [](const Query& q) {
         const SetValue s = q.set();
         const BoxGrid box = q.grid();
         const PremaxReport r = std::holds_alternative<AffineSet>(s)
                                    ? premax_certify(std::get<AffineSet>(s), box)
                                    : premax_certify(points_of(s), box);
         Outcome o;
         switch (r.classification) {
           case PremaxClass::kViaPhiDominance:
           case PremaxClass::kViaAffinePi: o.status = "HOLDS"; break;
           case PremaxClass::kNotPremaximal: o.status = "FAILS"; break;
           case PremaxClass::kUndecided: o.status = "UNDECIDED"; break;
         }
         o.note = std::string(to_string(r.classification));
         o.value = r.phi_dominates_q.value;
         o.witness = r.classification == PremaxClass::kNotPremaximal ? r.pi_positive.witness
                                                                     : r.phi_dominates_q.witness;
         o.resolution = box.pitch;
         o.grid_certified = r.phi_dominates_q.grid_certified;
         o.details["classification"] = o.note;
         o.details["phi_dominates_q"] = verdict_json(r.phi_dominates_q);
         o.details["pi_positive"] = verdict_json(r.pi_positive);
         o.details["domain_is_pi"] = verdict_json(r.domain_is_pi);
         o.details["box"] = {{"lower", vector_json(box.lower)}, {"upper", vector_json(box.upper)},
                             {"pitch", box.pitch}};
         return o;
       }},
      {"third_polar_check",
       [](const Query& q) {
         const PointSet a = points_of(q.set());
         return from_verdict(third_polar_check(a, q.probes_or_grid(a.space().dim()),
                                               q.has("probes") ? std::nullopt
                                                               : std::optional<double>(q.grid().pitch)));
       }},
      {"extension_continuum",
       [](const Query& q) {
         const ExtensionFamily f =
             extension_continuum(points_of(q.set()), q.vec("x1"), q.vec("x2"), q.integer("count", 11));
         Outcome o = from_verdict(f.verified);
         o.details["min_margin"] = number_to_json(f.min_margin);
         o.details["max_identity_residual"] = number_to_json(f.max_identity_residual);
         o.details["count"] = f.points.size();
         return o;
       }},
      {"ni_type_check",
       [](const Query& q) {
         const SetValue s = q.set();
         const BoxGrid box = q.grid();
         const NiReport r = std::holds_alternative<AffineSet>(s)
                                ? ni_type_check(std::get<AffineSet>(s), box)
                                : ni_type_check(points_of(s), box);
         Outcome o = from_verdict(r.ni);
         o.details["phi_dominates_q"] = verdict_json(r.phi_dominates_q);
         o.details["agree"] = r.agree;
         return o;
       }},
      // minimal-convex
      {"fund_ineq_check",
       [](const Query& q) {
         const SetValue s = q.set();
         const ConvexFunction f = std::holds_alternative<AffineSet>(s)
                                      ? phi_affine_function(std::get<AffineSet>(s))
                                      : as_convex(phi_build(points_of(s)));
         return from_verdict(fund_ineq_check(f, q.vec("x"), q.vec("y"), q.num("alpha")));
       }},
      {"envelope_eval",
       [](const Query& q) {
         const SetValue s = q.set();
         const ConvexFunction f = std::holds_alternative<AffineSet>(s)
                                      ? phi_affine_function(std::get<AffineSet>(s))
                                      : as_convex(phi_build(points_of(s)));
         const EnvelopeQuery e = make_envelope(f, q.vec("x"), q.grid());
         Outcome o = value_outcome(envelope_eval(e, q.vec("y")));
         o.details["cap"] = number_to_json(e.cap);
         return o;
       }},
      {"minimal_selfconj_probe",
       [](const Query& q) {
         const PointSet m = points_of(q.set());
         return from_verdict(minimal_selfconj_probe(m, q.probes_or_grid(m.space().dim())));
       }},
      {"convmin_check",
       [](const Query& q) {
         const SetValue s = q.set();
         const ConvexFunction f = std::holds_alternative<AffineSet>(s)
                                      ? phi_affine_function(std::get<AffineSet>(s))
                                      : as_convex(phi_build(points_of(s)));
         return from_verdict(convmin_check(f, q.vecs("probes"), q.grid()));
       }},
      // ssdb
      {"pq_g0_member",
       [](const Query& q) {
         const std::string sign = q.has("sign") ? q.at("sign").get<std::string>() : "+";
         if (sign != "+" && sign != "-") fail("sign must be \"+\" or \"-\"");
         return from_verdict(pq_g0_member(q.ssdb(), q.vec("b"), sign == "+" ? Sign::kPlus : Sign::kMinus));
       }},
      {"decompose_sum",
       [](const Query& q) {
         const SumDecomposition d = decompose_sum(q.ssdb(), q.set_as<AffineSet>("an affine set"), q.vec("x"));
         Outcome o = value_outcome(d.residual);
         o.details["a"] = vector_json(d.a);
         o.details["c"] = vector_json(d.c);
         return o;
       }},
      {"maximality_via_decomposition",
       [](const Query& q) {
         return from_verdict(maximality_via_decomposition(q.ssdb(), points_of(q.set()), q.vec("p"),
                                                          q.has("probes") ? q.vecs("probes")
                                                                          : std::vector<Vector>{}));
       }},
      {"isometry_residual",
       [](const Query& q) { return value_outcome(q.ssdb().isometry_residual()); }},
      // lipschitz
      {"lipschitz_check",
       [](const Query& q) {
         const GraphSet g = q.set_as<GraphSet>("a graph");
         return from_verdict(lipschitz_check(g, q.has("modulus") ? std::optional<double>(q.num("modulus"))
                                                                 : std::nullopt));
       }},
      {"phi_graph_eval",
       [](const Query& q) {
         return value_outcome(phi_graph_eval(q.set_as<GraphSet>("a graph"), q.vec("x1"), q.vec("x2")));
       }},
      {"mcshane_extend",
       [](const Query& q) {
         const GraphSet g = q.set_as<GraphSet>("a graph");
         const ExtensionBracket b = mcshane_bracket(g, q.vec("query"));
         Outcome o = value_outcome(b.upper);
         o.details["lower"] = number_to_json(b.lower);
         o.details["upper"] = number_to_json(b.upper);
         return o;
       }},
      {"identity_example_check",
       [](const Query& q) {
         std::vector<double> ts;
         for (const Json& t : q.at("t_grid")) ts.push_back(number_from_json(t, "t_grid"));
         return from_verdict(identity_example_check(ts, q.has("off_probes") ? q.vecs("off_probes")
                                                                             : std::vector<Vector>{}));
       }},
      {"closed_domain_repr_probe",
       [](const Query& q) {
         return from_verdict(closed_domain_repr_probe(q.set_as<GraphSet>("a graph"), q.num("k_prime"),
                                                      q.num("k"), q.vec("x1"), q.integer("count", 200),
                                                      static_cast<unsigned>(q.ctx.seed)));
       }},
      // hilbert-sets
      {"phi_conj_closed_eval",
       [](const Query& q) {
         const auto d = q.set_as<ClosedSetDescriptor>("a descriptor");
         const BoxSup s = phi_conj_closed_eval(d, q.vec("x"), q.grid_for(d.dim()));
         Outcome o = value_outcome(s.value, s.unbounded ? "BOX_UNBOUNDED" : "");
         o.resolution = s.box.pitch;
         o.grid_certified = true;
         o.details["box_value"] = number_to_json(s.box_value);
         return o;
       }},
      {"closed_repr_h_eval",
       [](const Query& q) {
         const auto d = q.set_as<ClosedSetDescriptor>("a descriptor");
         const BoxSup s = closed_repr_h_eval(d, q.vec("x"), q.grid_for(d.dim()));
         Outcome o = value_outcome(s.value, s.unbounded ? "BOX_UNBOUNDED" : "");
         o.resolution = s.box.pitch;
         o.grid_certified = true;
         o.details["box_value"] = number_to_json(s.box_value);
         return o;
       }},
      {"closed_repr_check",
       [](const Query& q) {
         const auto d = q.set_as<ClosedSetDescriptor>("a descriptor");
         return from_verdict(closed_repr_check(d, q.vecs("probes"), q.grid_for(d.dim())));
       }},
      {"midpoint_ball_check",
       [](const Query& q) {
         return from_verdict(
             midpoint_ball_check(q.set_as<ClosedSetDescriptor>("a descriptor"), q.vec("a1"), q.vec("a2")));
       }},
      {"line_corollary_check",
       [](const Query& q) {
         std::vector<std::pair<double, double>> iv;
         for (const Json& p : q.at("intervals")) {
           if (!p.is_array() || p.size() != 2) fail("intervals: expected [lo, hi] pairs");
           iv.emplace_back(number_from_json(p[0], "intervals"), number_from_json(p[1], "intervals"));
         }
         std::vector<double> net;
         for (const Json& t : q.at("net")) net.push_back(number_from_json(t, "net"));
         return from_verdict(line_corollary_check(iv, net, q.grid_for(1)));
       }},
  };
  return ops;
}

bool expectation_matches(const Json& expect, const Json& rec) {
  if (expect.is_string()) return expect.get<std::string>() == rec["status"].get<std::string>();
  if (!expect.is_object()) fail("expect: must be a status string or an object");
  bool ok = true;
  if (expect.contains("status")) ok = ok && expect["status"] == rec["status"];
  if (expect.contains("classification"))
    ok = ok && rec["details"].contains("classification") &&
         expect["classification"] == rec["details"]["classification"];
  if (expect.contains("error"))
    ok = ok && rec.contains("error") && expect["error"] == rec["error"]["kind"];
  if (expect.contains("value")) {
    const double want = number_from_json(expect["value"], "expect.value");
    const double tol = expect.contains("tol") ? number_from_json(expect["tol"], "expect.tol") : 1e-9;
    const double got = rec["value"].is_null() ? std::numeric_limits<double>::quiet_NaN()
                                              : number_from_json(rec["value"], "value");
    if (std::isinf(want))
      ok = ok && got == want;
    else
      ok = ok && std::abs(got - want) <= tol * (1.0 + std::abs(want));
  }
  return ok;
}

Json run_one(const Context& ctx, const Json& query, std::size_t index, const RunOptions& options) {
  const std::string op = member(query, "op", "query").get<std::string>();
  const auto it = operations().find(op);
  if (it == operations().end()) fail("unknown operation \"" + op + "\"");
  const Json args = query.value("args", Json::object());
  if (!args.is_object()) fail("query " + std::to_string(index) + ": args must be an object");

  Json rec;
  rec["index"] = index;
  rec["op"] = op;
  rec["args"] = args;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome o = it->second(Query{ctx, args});
    rec["status"] = o.status;
    rec["value"] = number_to_json(o.value);
    Json w = Json::array();
    for (const Vector& x : o.witness) w.push_back(vector_json(x));
    rec["witness"] = w;
    rec["resolution"] = o.resolution ? Json(*o.resolution) : Json(nullptr);
    rec["grid_certified"] = o.grid_certified;
    rec["note"] = o.note;
    rec["details"] = o.details;
  } catch (const PreconditionError& e) {
    rec["status"] = "ERROR";
    rec["error"] = {{"kind", "precondition"}, {"message", e.what()}};
  } catch (const InternalError& e) {
    rec["status"] = "ERROR";
    rec["error"] = {{"kind", "internal"}, {"message", e.what()}};
  } catch (const ScenarioError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    fail("query " + std::to_string(index) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    fail("query " + std::to_string(index) + " (" + op + "): " + e.what());
  } catch (const std::domain_error& e) {
    rec["status"] = "ERROR";
    rec["error"] = {{"kind", "evaluation"}, {"message", e.what()}};
  }
  const auto t1 = std::chrono::steady_clock::now();
  if (!rec.contains("witness")) {
    rec["value"] = nullptr;
    rec["witness"] = Json::array();
    rec["resolution"] = nullptr;
    rec["grid_certified"] = false;
    rec["note"] = "";
    rec["details"] = Json::object();
  }
  if (query.contains("expect")) {
    rec["expect"] = query["expect"];
    rec["matched"] = expectation_matches(query["expect"], rec);
  } else {
    rec["expect"] = nullptr;
    rec["matched"] = nullptr;
  }
  rec["wall_ms"] = options.timing
                       ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                       : 0.0;
  return rec;
}

Context build_context(const Json& scenario, const RunOptions& options,
                      const std::filesystem::path& base_dir) {
  if (!scenario.is_object()) fail("scenario: expected a JSON object");
  if (scenario.contains("schema_version") && scenario["schema_version"] != kScenarioSchemaVersion)
    fail("scenario: unsupported schema_version");
  Context ctx;
  ctx.base_dir = base_dir;
  ctx.seed = scenario.value("seed", std::uint64_t{0});
  ctx.pitch_override = options.grid_pitch;
  parse_space(ctx, scenario.contains("space") ? scenario["space"]
                                              : Json{{"kind", "monotone"}, {"k", 1}});
  ctx.grid = parse_grid(scenario.value("grid", Json()), ctx.space->dim(), options.grid_pitch);
  if (scenario.contains("sets")) {
    if (!scenario["sets"].is_object()) fail("sets: expected an object of named sets");
    for (const auto& [name, desc] : scenario["sets"].items())
      ctx.sets.emplace(name, parse_set(ctx, desc, name));
  }
  return ctx;
}

}  // namespace

Json number_to_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

double number_from_json(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  fail(std::string(what) + ": expected a number");
}

std::vector<std::string> known_operations() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : operations()) out.push_back(name);
  return out;
}

unsigned threads_from_env() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QPOS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

Json run_scenario(const Json& scenario, const RunOptions& options,
                  const std::filesystem::path& base_dir) {
  const double saved_tolerance = tolerance();
  const double eps = options.tolerance.value_or(
      scenario.is_object() && scenario.contains("tolerance")
          ? number_from_json(scenario["tolerance"], "tolerance")
          : kDefaultEps);
  if (!(eps > 0.0)) fail("tolerance must be positive");
  set_tolerance(eps);
  struct Restore {
    double t;
    ~Restore() { set_tolerance(t); }
  } restore{saved_tolerance};

  Context ctx;
  try {
    ctx = build_context(scenario, options, base_dir);
  } catch (const ScenarioError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    fail(std::string("scenario: ") + e.what());
  } catch (const std::logic_error& e) {
    fail(std::string("scenario: ") + e.what());
  }

  const Json queries = scenario.value("queries", Json::array());
  if (!queries.is_array()) fail("queries: expected an array");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const std::string op = member(queries[i], "op", "query").get<std::string>();
    if (!operations().count(op)) fail("query " + std::to_string(i) + ": unknown operation \"" + op + "\"");
    if (queries[i].contains("args") && queries[i]["args"].contains("set") &&
        queries[i]["args"]["set"].is_string() &&
        !ctx.sets.count(queries[i]["args"]["set"].get<std::string>()))
      fail("query " + std::to_string(i) + ": unknown set \"" +
           queries[i]["args"]["set"].get<std::string>() + "\"");
  }

  std::vector<Json> records(queries.size());
  std::vector<std::exception_ptr> errors(queries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      try {
        records[i] = run_one(ctx, queries[i], i, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads,
                                                           static_cast<unsigned>(queries.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool"] = kToolName;
  report["version"] = kToolVersion;
  report["seed"] = ctx.seed;
  report["tolerance"] = eps;
  report["kernel_isa"] = std::string(kernels::isa_name(kernels::active_isa()));
  report["queries"] = records;
  int holds = 0, fails = 0, undecided = 0, values = 0, errs = 0, expectations = 0, mismatches = 0;
  for (const Json& r : records) {
    const std::string s = r["status"].get<std::string>();
    holds += s == "HOLDS";
    fails += s == "FAILS";
    undecided += s == "UNDECIDED";
    values += s == "VALUE";
    errs += s == "ERROR";
    if (!r["matched"].is_null()) {
      ++expectations;
      mismatches += !r["matched"].get<bool>();
    }
  }
  report["summary"] = {{"total", records.size()}, {"holds", holds},           {"fails", fails},
                       {"undecided", undecided},  {"values", values},         {"errors", errs},
                       {"expectations", expectations}, {"mismatches", mismatches}};
  return report;
}

int report_exit_code(const Json& report) {
  for (const Json& r : report["queries"]) {
    if (r.contains("error") && r["error"]["kind"] == "internal") return 1;
    if (!r["matched"].is_null() && !r["matched"].get<bool>()) return 1;
  }
  return 0;
}

int run_scenario_file(const std::filesystem::path& in, const std::filesystem::path& out,
                      const RunOptions& options, std::ostream& err) {
  Json scenario;
  {
    std::ifstream f(in);
    if (!f) {
      err << "error: cannot open scenario " << in.string() << "\n";
      return 2;
    }
    try {
      scenario = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      err << "error: malformed JSON in " << in.string() << ": " << e.what() << "\n";
      return 2;
    }
  }
  Json report;
  try {
    report = run_scenario(scenario, options, in.parent_path());
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const std::vector<std::string> problems = validate_report(report);
  if (!problems.empty()) {
    for (const std::string& p : problems) err << "report schema: " << p << "\n";
    return 2;
  }
  std::ofstream o(out);
  if (!o) {
    err << "error: cannot write report " << out.string() << "\n";
    return 2;
  }
  o << report.dump(2) << "\n";
  const int code = report_exit_code(report);
  if (code != 0) {
    for (const Json& r : report["queries"]) {
      if (!r["matched"].is_null() && !r["matched"].get<bool>())
        err << "mismatch: query " << r["index"] << " (" << r["op"].get<std::string>() << ") got "
            << r["status"].get<std::string>() << ", expected " << r["expect"].dump() << "\n";
      if (r.contains("error") && r["error"]["kind"] == "internal")
        err << "internal error: query " << r["index"] << ": "
            << r["error"]["message"].get<std::string>() << "\n";
    }
  }
  return code;
}

std::vector<std::string> validate_report(const Json& report) {
  std::vector<std::string> p;
  auto need = [&](const Json& obj, const char* key, bool (Json::*is)() const noexcept,
                  const std::string& where) {
    if (!obj.contains(key))
      p.push_back(where + ": missing " + key);
    else if (!(obj[key].*is)())
      p.push_back(where + ": wrong type for " + key);
  };
  if (!report.is_object()) return {"report is not an object"};
  need(report, "schema_version", &Json::is_number_integer, "report");
  need(report, "tool", &Json::is_string, "report");
  need(report, "version", &Json::is_string, "report");
  need(report, "seed", &Json::is_number_integer, "report");
  need(report, "tolerance", &Json::is_number, "report");
  need(report, "queries", &Json::is_array, "report");
  need(report, "summary", &Json::is_object, "report");
  if (!p.empty()) return p;
  if (report["schema_version"] != kReportSchemaVersion) p.push_back("report: unknown schema_version");
  static const std::vector<std::string> statuses{"HOLDS", "FAILS", "UNDECIDED", "VALUE", "ERROR"};
  std::size_t i = 0;
  for (const Json& r : report["queries"]) {
    const std::string w = "queries[" + std::to_string(i) + "]";
    need(r, "index", &Json::is_number_integer, w);
    need(r, "op", &Json::is_string, w);
    need(r, "args", &Json::is_object, w);
    need(r, "status", &Json::is_string, w);
    need(r, "witness", &Json::is_array, w);
    need(r, "grid_certified", &Json::is_boolean, w);
    need(r, "note", &Json::is_string, w);
    need(r, "details", &Json::is_object, w);
    need(r, "wall_ms", &Json::is_number, w);
    if (r.contains("index") && r["index"] != i) p.push_back(w + ": index out of order");
    if (r.contains("status") && r["status"].is_string() &&
        std::find(statuses.begin(), statuses.end(), r["status"].get<std::string>()) == statuses.end())
      p.push_back(w + ": unknown status");
    if (!r.contains("value") || !(r["value"].is_null() || r["value"].is_number() || r["value"].is_string()))
      p.push_back(w + ": bad value");
    if (!r.contains("resolution") || !(r["resolution"].is_null() || r["resolution"].is_number()))
      p.push_back(w + ": bad resolution");
    if (!r.contains("matched") || !(r["matched"].is_null() || r["matched"].is_boolean()))
      p.push_back(w + ": bad matched");
    if (!r.contains("expect")) p.push_back(w + ": missing expect");
    ++i;
  }
  for (const char* k : {"total", "holds", "fails", "undecided", "values", "errors", "expectations",
                        "mismatches"})
    need(report["summary"], k, &Json::is_number_integer, "summary");
  return p;
}

Json eval_query(const std::string& op, const Json& args, const RunOptions& options) {
  if (!args.is_object()) fail("eval: arguments must be a JSON object");
  Json scenario;
  scenario["schema_version"] = kScenarioSchemaVersion;
  Json rest = args;
  for (const char* k : {"space", "sets", "grid", "seed", "tolerance"}) {
    if (rest.contains(k)) {
      scenario[k] = rest[k];
      rest.erase(k);
    }
  }
  Json q{{"op", op}, {"args", rest}};
  if (rest.contains("expect")) {
    q["expect"] = rest["expect"];
    q["args"].erase("expect");
  }
  scenario["queries"] = Json::array({q});
  RunOptions o = options;
  o.threads = 1;
  Json report = run_scenario(scenario, o);
  return report;
}

}  // namespace qpos::cli
