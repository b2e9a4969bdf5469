#ifndef QPOS_COMMON_HPP
#define QPOS_COMMON_HPP

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpos {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Default decision tolerance on q-values.
inline constexpr double kDefaultEps = 1e-9;

// Global decision tolerance. Set once (CLI startup) before any concurrent work.
double tolerance();
void set_tolerance(double eps);

// Argument/dimension errors.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Signals an engine bug (Bland cycling, singular system after a maximality certificate, ...).
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Status { kHolds, kFails, kUndecided };

std::string_view to_string(Status s);
Status status_from_string(std::string_view s);

// Three-valued answer carried by every decision operation.
//
// FAILS carries a witness (one point or a pair). A HOLDS obtained by a grid
// scan is flagged grid_certified and carries the pitch in `resolution`.
struct Verdict {
  Status status = Status::kUndecided;
  std::vector<Vector> witness;
  std::optional<double> resolution;
  bool grid_certified = false;
  // Operation-specific scalar (gap, margin, residual, ...). NaN when unused.
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string note;

  bool holds() const { return status == Status::kHolds; }
  bool fails() const { return status == Status::kFails; }
  bool undecided() const { return status == Status::kUndecided; }

  static Verdict Holds(std::string note = {});
  static Verdict GridHolds(double pitch, std::string note = {});
  static Verdict Fails(std::vector<Vector> witness, std::string note = {});
  static Verdict Undecided(std::optional<double> pitch, std::string note = {});
};

void require_dim(const Vector& v, Eigen::Index n, std::string_view what);

}  // namespace qpos

#endif  // QPOS_COMMON_HPP
