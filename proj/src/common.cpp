#include "qpos/common.hpp"

#include <atomic>
#include <string>

namespace qpos {

namespace {
std::atomic<double> g_eps{kDefaultEps};
}

double tolerance() { return g_eps.load(std::memory_order_relaxed); }

void set_tolerance(double eps) {
  if (!(eps > 0.0)) throw ArgumentError("tolerance must be positive");
  g_eps.store(eps, std::memory_order_relaxed);
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::kHolds:
      return "HOLDS";
    case Status::kFails:
      return "FAILS";
    case Status::kUndecided:
      return "UNDECIDED";
  }
  return "UNDECIDED";
}

Status status_from_string(std::string_view s) {
  if (s == "HOLDS") return Status::kHolds;
  if (s == "FAILS") return Status::kFails;
  if (s == "UNDECIDED") return Status::kUndecided;
  throw ArgumentError("unknown verdict status '" + std::string(s) + "'");
}

Verdict Verdict::Holds(std::string note) {
  Verdict v;
  v.status = Status::kHolds;
  v.note = std::move(note);
  return v;
}

Verdict Verdict::GridHolds(double pitch, std::string note) {
  Verdict v = Holds(std::move(note));
  v.grid_certified = true;
  v.resolution = pitch;
  return v;
}

Verdict Verdict::Fails(std::vector<Vector> witness, std::string note) {
  Verdict v;
  v.status = Status::kFails;
  v.witness = std::move(witness);
  v.note = std::move(note);
  return v;
}

Verdict Verdict::Undecided(std::optional<double> pitch, std::string note) {
  Verdict v;
  v.status = Status::kUndecided;
  v.resolution = pitch;
  v.note = std::move(note);
  return v;
}

void require_dim(const Vector& v, Eigen::Index n, std::string_view what) {
  if (v.size() != n) {
    throw ArgumentError(std::string(what) + ": expected dimension " + std::to_string(n) +
                        ", got " + std::to_string(v.size()));
  }
}

}  // namespace qpos
