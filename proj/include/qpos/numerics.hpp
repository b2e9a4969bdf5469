#ifndef QPOS_NUMERICS_HPP
#define QPOS_NUMERICS_HPP

#include "qpos/common.hpp"
#include "qpos/core.hpp"

#include <functional>

namespace qpos {

// minimize Σ λᵢ costᵢ  s.t.  Σ λᵢ columnᵢ = target,  λ ≥ 0,  Σ λᵢ = 1.
struct SimplexLp {
  Vector costs;    // m
  Matrix moments;  // k×m, one column per weight
  Vector target;   // k
};

struct LpSolution {
  bool feasible = false;
  double value = kInf;
  Vector weights;  // m, a vertex of the feasible polytope
  int iterations = 0;
};

// Dense two-phase simplex with Bland's rule. The reported weights are
// re-solved from the final basis, so they satisfy the constraints to 1e-8.
LpSolution lp_min(const SimplexLp& lp);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns
};

// Cyclic Jacobi; stops when off-diagonal mass ≤ 1e-12·‖A‖_F (or is exactly zero).
SymmetricEigen jacobi_eigen(const Matrix& a);

// Orthonormal basis of ker(A) for symmetric A, using |λ| ≤ tol·max(1, max|λ|).
Matrix symmetric_kernel(const Matrix& a, double tol = 1e-10);

// Moore–Penrose inverse of a symmetric matrix through its eigendecomposition.
Matrix symmetric_pinv(const Matrix& a, double tol = 1e-10);

// Throws ArgumentError unless V has full column rank (1e-10 on singular values).
void require_full_column_rank(const Matrix& v);

// HOLDS iff λ_min(VᵀSV) ≥ −ε. FAILS witness: the eigenvector direction V·u.
Verdict psd_on_subspace(const Matrix& s, const Matrix& v);

struct AffineMin {
  bool minus_infinity = false;
  double value = -kInf;
  Vector argmin;  // t, when finite
};

// inf over t of q(r − V t). Throws PreconditionError if VᵀSV is not PSD.
AffineMin min_q_over_affine(const SsdSpace& space, const Vector& r, const Matrix& v);

// Axis-aligned box scanned at a uniform pitch; `multistarts` top cells are refined.
struct BoxGrid {
  Vector lower;
  Vector upper;
  double pitch = 0.1;
  int multistarts = 4;

  BoxGrid() = default;
  BoxGrid(Vector lower, Vector upper, double pitch, int multistarts = 4);
  static BoxGrid cube(Eigen::Index dim, double half_width, double pitch, int multistarts = 4);

  Eigen::Index dim() const { return lower.size(); }
  bool empty() const { return lower.size() == 0; }
  bool contains(const Vector& x, double slack = 0.0) const;
  // Number of samples per axis (≥ 2) and the resulting total.
  std::vector<int> axis_counts() const;
  std::size_t point_count() const;
  // Calls visit(x) for every grid point in lexicographic order.
  void for_each_point(const std::function<void(const Vector&)>& visit) const;
  std::vector<Vector> points() const;
};

struct GridMax {
  double value = -kInf;
  Vector argmax;
  std::size_t evaluations = 0;
};

// Grid scan followed by compass-search refinement from the best `multistarts`
// grid points (plus any extra starts). Deterministic given the grid. −∞ values
// are allowed (they never win); NaN or +∞ raises std::domain_error.
GridMax grid_multistart_max(const std::function<double(const Vector&)>& f, const BoxGrid& grid,
                            const std::vector<Vector>& extra_starts = {});

// Compass search maximizing f from x inside the box, starting at step `step`.
Vector compass_refine(const std::function<double(const Vector&)>& f, const BoxGrid& grid,
                      Vector x, double step, double* best_value);

struct ScalarMin {
  double x = 0.0;
  double value = kInf;
};

// Golden-section minimization on [a, b] to width `tol`; endpoints are also evaluated.
ScalarMin golden_section_min(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-10);

}  // namespace qpos

#endif  // QPOS_NUMERICS_HPP
