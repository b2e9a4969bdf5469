#include "qpos/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qpos {

// ---------------------------------------------------------------------------
// Simplex LP over convex-combination weights.
// ---------------------------------------------------------------------------

namespace {

constexpr double kPivotTol = 1e-11;

class Tableau {
 public:
  // rows: constraint rows (rhs ≥ 0); columns: structural then artificial, then rhs.
  Tableau(Eigen::Index rows, Eigen::Index structural)
      : rows_(rows), structural_(structural), t_(Matrix::Zero(rows + 1, structural + rows + 1)),
        basis_(static_cast<std::size_t>(rows)) {}

  double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
  double rhs(Eigen::Index r) const { return t_(r, t_.cols() - 1); }
  double objective() const { return -t_(rows_, t_.cols() - 1); }
  Eigen::Index rhs_col() const { return t_.cols() - 1; }
  Eigen::Index artificial(Eigen::Index r) const { return structural_ + r; }
  bool is_artificial(Eigen::Index c) const { return c >= structural_ && c < rhs_col(); }
  std::vector<Eigen::Index>& basis() { return basis_; }
  Matrix& raw() { return t_; }
  Eigen::Index rows() const { return rows_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Loads cost vector (over all non-rhs columns) into the objective row in reduced form.
  void set_objective(const Vector& cost) {
    t_.row(rows_).setZero();
    t_.row(rows_).head(cost.size()) = cost.transpose();
    for (Eigen::Index r = 0; r < rows_; ++r) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(r)];
      const double cb = t_(rows_, b);
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(r);
    }
  }

  // Bland's rule iterations. `allowed(c)` filters entering columns.
  // Returns false if unbounded (cannot happen on the simplex, kept as a guard).
  template <class Allowed>
  bool optimize(Allowed allowed, int& iterations, int cap) {
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < rhs_col(); ++c) {
        if (!allowed(c)) continue;
        if (t_(rows_, c) < -kPivotTol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best_ratio = kInf;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(r) / a;
        const Eigen::Index br = basis_[static_cast<std::size_t>(r)];
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 &&
             br < basis_[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      if (++iterations > cap) throw InternalError("simplex exceeded its iteration cap (cycling?)");
    }
  }

  void drop_row(Eigen::Index r) {
    Matrix next(t_.rows() - 1, t_.cols());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < t_.rows(); ++i)
      if (i != r) next.row(k++) = t_.row(i);
    t_ = std::move(next);
    basis_.erase(basis_.begin() + r);
    --rows_;
  }

 private:
  Eigen::Index rows_;
  Eigen::Index structural_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpSolution lp_min(const SimplexLp& lp) {
  const Eigen::Index m = lp.costs.size();
  const Eigen::Index k = lp.target.size();
  if (m < 1) throw ArgumentError("lp_min: at least one weight required");
  if (lp.moments.rows() != k || lp.moments.cols() != m)
    throw ArgumentError("lp_min: moment matrix must be k×m");
  if (!lp.costs.allFinite() || !lp.moments.allFinite() || !lp.target.allFinite())
    throw ArgumentError("lp_min: non-finite data");

  // Equality system [moments; 1ᵀ] λ = [target; 1].
  const Eigen::Index rows = k + 1;
  Matrix a(rows, m);
  a.topRows(k) = lp.moments;
  a.row(k).setOnes();
  Vector b(rows);
  b.head(k) = lp.target;
  b(k) = 1.0;

  Tableau tab(rows, m);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double sign = b(r) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index c = 0; c < m; ++c) tab.at(r, c) = sign * a(r, c);
    tab.at(r, tab.artificial(r)) = 1.0;
    tab.at(r, tab.rhs_col()) = sign * b(r);
    tab.basis()[static_cast<std::size_t>(r)] = tab.artificial(r);
  }

  LpSolution out;
  const int cap = 10 * static_cast<int>((m + rows) * rows) + 100;

  // Phase one: minimize the sum of artificials.
  Vector phase1 = Vector::Zero(m + rows);
  phase1.tail(rows).setOnes();
  tab.set_objective(phase1);
  tab.optimize([](Eigen::Index) { return true; }, out.iterations, cap);
  const double scale = 1.0 + b.cwiseAbs().sum() + a.cwiseAbs().maxCoeff();
  if (tab.objective() > 1e-9 * scale) return out;

  // Drive zero-level artificials out of the basis; drop redundant rows.
  for (Eigen::Index r = tab.rows() - 1; r >= 0; --r) {
    if (!tab.is_artificial(tab.basis()[static_cast<std::size_t>(r)])) continue;
    Eigen::Index col = -1;
    double best = 1e-9;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (std::abs(tab.at(r, c)) > best) {
        best = std::abs(tab.at(r, c));
        col = c;
      }
    }
    if (col >= 0) {
      tab.pivot(r, col);
    } else {
      tab.drop_row(r);
    }
  }

  // Phase two.
  Vector phase2 = Vector::Zero(m + rows);
  phase2.head(m) = lp.costs;
  tab.set_objective(phase2);
  const bool bounded = tab.optimize([&](Eigen::Index c) { return !tab.is_artificial(c); },
                                    out.iterations, cap);
  if (!bounded) throw InternalError("lp_min: unbounded ray on a bounded polytope");

  // Re-solve the basic weights from the original data.
  std::vector<Eigen::Index> basic;
  Vector tableau_weights = Vector::Zero(m);
  for (Eigen::Index r = 0; r < tab.rows(); ++r) {
    const Eigen::Index c = tab.basis()[static_cast<std::size_t>(r)];
    if (c < m) {
      basic.push_back(c);
      tableau_weights(c) = std::max(0.0, tab.rhs(r));
    }
  }
  Vector weights = tableau_weights;
  if (!basic.empty()) {
    Matrix ab(rows, static_cast<Eigen::Index>(basic.size()));
    for (std::size_t i = 0; i < basic.size(); ++i)
      ab.col(static_cast<Eigen::Index>(i)) = a.col(basic[i]);
    const Vector lb = ab.colPivHouseholderQr().solve(b);
    Vector refined = Vector::Zero(m);
    for (std::size_t i = 0; i < basic.size(); ++i)
      refined(basic[i]) = std::max(0.0, lb(static_cast<Eigen::Index>(i)));
    const double res_refined = (a * refined - b).cwiseAbs().maxCoeff();
    const double res_tableau = (a * tableau_weights - b).cwiseAbs().maxCoeff();
    if (res_refined <= res_tableau) weights = refined;
  }
  out.feasible = true;
  out.weights = weights;
  out.value = lp.costs.dot(weights);
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblems.
// ---------------------------------------------------------------------------

SymmetricEigen jacobi_eigen(const Matrix& input) {
  const Eigen::Index n = input.rows();
  if (n != input.cols()) throw ArgumentError("jacobi_eigen: matrix must be square");
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double fro = a.norm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (off == 0.0 || std::sqrt(off) <= 1e-12 * fro) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

Matrix symmetric_kernel(const Matrix& a, double tol) {
  const Eigen::Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  const SymmetricEigen eig = jacobi_eigen(a);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(eig.values(i)) <= tol * scale) keep.push_back(i);
  Matrix k(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    k.col(static_cast<Eigen::Index>(i)) = eig.vectors.col(keep[i]);
  return k;
}

Matrix symmetric_pinv(const Matrix& a, double tol) {
  const Eigen::Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  const SymmetricEigen eig = jacobi_eigen(a);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = eig.values(i);
    if (std::abs(l) > tol * scale)
      out += (1.0 / l) * eig.vectors.col(i) * eig.vectors.col(i).transpose();
  }
  return out;
}

void require_full_column_rank(const Matrix& v) {
  if (v.cols() == 0) return;
  if (v.cols() > v.rows()) throw ArgumentError("basis has more columns than rows");
  const SymmetricEigen eig = jacobi_eigen(v.transpose() * v);
  const double smax = std::sqrt(std::max(0.0, eig.values.maxCoeff()));
  const double smin = std::sqrt(std::max(0.0, eig.values.minCoeff()));
  if (smin < 1e-10 * std::max(1.0, smax)) throw ArgumentError("basis is rank deficient");
}

Verdict psd_on_subspace(const Matrix& s, const Matrix& v) {
  if (s.rows() != s.cols() || v.rows() != s.rows())
    throw ArgumentError("psd_on_subspace: dimension mismatch");
  require_full_column_rank(v);
  if (v.cols() == 0) return Verdict::Holds("zero-dimensional subspace");
  const Matrix m = v.transpose() * s * v;
  const SymmetricEigen eig = jacobi_eigen(m);
  const double lmin = eig.values(0);
  if (lmin >= -tolerance()) {
    Verdict out = Verdict::Holds();
    out.value = lmin;
    return out;
  }
  Verdict out = Verdict::Fails({v * eig.vectors.col(0)}, "negative curvature direction");
  out.value = lmin;
  return out;
}

AffineMin min_q_over_affine(const SsdSpace& space, const Vector& r, const Matrix& v) {
  require_dim(r, space.dim(), "min_q_over_affine");
  if (v.rows() != space.dim()) throw ArgumentError("min_q_over_affine: basis dimension mismatch");
  AffineMin out;
  if (v.cols() == 0) {
    out.value = space.q(r);
    out.argmin = Vector(0);
    return out;
  }
  // q(r − V t) = q(r) − tᵀg + ½ tᵀ M t with M = VᵀSV, g = VᵀS r (q may carry a sign flip).
  const double sign = testing::q_sign_flipped() ? -1.0 : 1.0;
  const Matrix m = sign * (v.transpose() * space.form() * v);
  const Vector g = sign * (v.transpose() * space.form() * r);
  const SymmetricEigen eig = jacobi_eigen(m);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  if (eig.values(0) < -1e-9 * scale)
    throw PreconditionError("min_q_over_affine: VᵀSV is not positive semidefinite");
  const Matrix pinv = symmetric_pinv(m);
  const Vector t = pinv * g;
  if ((m * t - g).norm() > 1e-8 * (1.0 + g.norm())) {
    out.minus_infinity = true;
    return out;
  }
  out.value = space.q(r) - 0.5 * g.dot(t);
  out.argmin = t;
  return out;
}

// ---------------------------------------------------------------------------
// Box grids and the multistart optimizer.
// ---------------------------------------------------------------------------

BoxGrid::BoxGrid(Vector lo, Vector hi, double p, int starts)
    : lower(std::move(lo)), upper(std::move(hi)), pitch(p), multistarts(starts) {
  if (lower.size() != upper.size()) throw ArgumentError("box bounds differ in dimension");
  if (!(pitch > 0.0)) throw ArgumentError("grid pitch must be positive");
  if (multistarts < 1) throw ArgumentError("multistart count must be positive");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower(i) < upper(i))) throw ArgumentError("box requires lower < upper componentwise");
}

BoxGrid BoxGrid::cube(Eigen::Index dim, double half_width, double pitch, int multistarts) {
  return BoxGrid(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width), pitch,
                 multistarts);
}

bool BoxGrid::contains(const Vector& x, double slack) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < lower(i) - slack || x(i) > upper(i) + slack) return false;
  return true;
}

std::vector<int> BoxGrid::axis_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(dim()));
  for (Eigen::Index i = 0; i < dim(); ++i) {
    const double cells = std::ceil((upper(i) - lower(i)) / pitch - 1e-9);
    counts[static_cast<std::size_t>(i)] = std::max(1, static_cast<int>(cells)) + 1;
  }
  return counts;
}

std::size_t BoxGrid::point_count() const {
  if (empty()) return 0;
  std::size_t total = 1;
  for (int c : axis_counts()) total *= static_cast<std::size_t>(c);
  return total;
}

void BoxGrid::for_each_point(const std::function<void(const Vector&)>& visit) const {
  if (empty()) return;
  const std::vector<int> counts = axis_counts();
  if (point_count() > 50'000'000) throw ArgumentError("grid too large; raise the pitch");
  const Eigen::Index d = dim();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vector x(d);
  for (;;) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const int cells = counts[ui] - 1;
      x(i) = lower(i) + (upper(i) - lower(i)) * static_cast<double>(idx[ui]) / cells;
    }
    visit(x);
    Eigen::Index axis = d - 1;
    while (axis >= 0) {
      const auto ua = static_cast<std::size_t>(axis);
      if (++idx[ua] < counts[ua]) break;
      idx[ua] = 0;
      --axis;
    }
    if (axis < 0) return;
  }
}

std::vector<Vector> BoxGrid::points() const {
  std::vector<Vector> out;
  out.reserve(point_count());
  for_each_point([&](const Vector& x) { out.push_back(x); });
  return out;
}

namespace {

double checked(const std::function<double(const Vector&)>& f, const Vector& x) {
  const double v = f(x);
  if (std::isnan(v) || v == kInf) throw std::domain_error("objective is not finite on the box");
  return v;
}

std::vector<Vector> search_directions(Eigen::Index d) {
  std::vector<Vector> dirs;
  for (Eigen::Index i = 0; i < d; ++i) {
    dirs.push_back(Vector::Unit(d, i));
    dirs.push_back(-Vector::Unit(d, i));
  }
  if (d <= 4) {
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j)
        for (double si : {1.0, -1.0})
          for (double sj : {1.0, -1.0}) {
            Vector u = Vector::Zero(d);
            u(i) = si;
            u(j) = sj;
            dirs.push_back(u / std::sqrt(2.0));
          }
  }
  return dirs;
}

}  // namespace

Vector compass_refine(const std::function<double(const Vector&)>& f, const BoxGrid& grid, Vector x,
                      double step, double* best_value) {
  const std::vector<Vector> dirs = search_directions(grid.dim());
  double fx = checked(f, x);
  const double min_step = 1e-10 * std::max(1.0, (grid.upper - grid.lower).maxCoeff());
  int budget = 20000;
  while (step > min_step && budget > 0) {
    bool improved = false;
    for (const Vector& dir : dirs) {
      Vector y = (x + step * dir).cwiseMax(grid.lower).cwiseMin(grid.upper);
      const double fy = checked(f, y);
      --budget;
      if (fy > fx) {
        x = std::move(y);
        fx = fy;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  if (best_value) *best_value = fx;
  return x;
}

GridMax grid_multistart_max(const std::function<double(const Vector&)>& f, const BoxGrid& grid,
                            const std::vector<Vector>& extra_starts) {
  if (grid.empty()) throw ArgumentError("grid_multistart_max: empty box");
  GridMax out;
  const auto keep = static_cast<std::size_t>(grid.multistarts);
  std::vector<std::pair<double, Vector>> top;  // descending by value
  auto offer = [&](double v, const Vector& x) {
    if (top.size() == keep && v <= top.back().first) return;
    auto it = std::find_if(top.begin(), top.end(), [&](const auto& e) { return v > e.first; });
    top.insert(it, {v, x});
    if (top.size() > keep) top.pop_back();
  };
  grid.for_each_point([&](const Vector& x) {
    const double v = checked(f, x);
    ++out.evaluations;
    offer(v, x);
  });
  std::vector<Vector> starts;
  for (const auto& e : top) starts.push_back(e.second);
  for (const Vector& s : extra_starts) {
    if (s.size() != grid.dim()) throw ArgumentError("extra start has wrong dimension");
    starts.push_back(s.cwiseMax(grid.lower).cwiseMin(grid.upper));
  }
  const double step = [&] {
    const std::vector<int> counts = grid.axis_counts();
    double p = 0.0;
    for (Eigen::Index i = 0; i < grid.dim(); ++i)
      p = std::max(p, (grid.upper(i) - grid.lower(i)) / (counts[static_cast<std::size_t>(i)] - 1));
    return p;
  }();
  for (const Vector& s : starts) {
    double v = -kInf;
    Vector x = compass_refine(f, grid, s, 0.5 * step, &v);
    if (v > out.value || out.argmax.size() == 0) {
      out.value = v;
      out.argmax = std::move(x);
    }
  }
  return out;
}

ScalarMin golden_section_min(const std::function<double(double)>& f, double a, double b,
                             double tol) {
  if (b < a) std::swap(a, b);
  ScalarMin best{a, f(a)};
  if (const double fb = f(b); fb < best.value) best = {b, fb};
  if (b - a <= tol) return best;
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 400 && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  if (f1 < best.value) best = {x1, f1};
  if (f2 < best.value) best = {x2, f2};
  return best;
}

}  // namespace qpos
