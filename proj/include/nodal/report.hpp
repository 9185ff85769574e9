#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "nodal/domain.hpp"

namespace nodal {

// One certified inequality. Margin >= 0 means satisfied; the worst (smallest)
// margin and the node where it occurs are kept.
struct CheckResult {
  std::string id;
  bool pass = true;
  bool skipped = false;
  double worst_margin = std::numeric_limits<double>::infinity();
  Index node = -1;
  double location = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

class MarginTracker {
 public:
  MarginTracker(std::string id, const Grid* grid = nullptr) : grid_(grid) { r_.id = std::move(id); }
  // margin >= 0 passes
  void update(double margin, Index node = -1);
  // margin > 0 passes
  void update_strict(double margin, Index node = -1) {
    update(margin, node);
    if (!(margin > 0.0)) r_.pass = false;
  }
  void fail_note(const std::string& note) { r_.note = note; }
  CheckResult result() const { return r_; }

 private:
  const Grid* grid_;
  double worst_key_ = std::numeric_limits<double>::infinity();
  CheckResult r_;
};

struct CertificationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void merge(const CertificationReport& other);
  const CheckResult* find(const std::string& id) const;
  // one "check.<id>.field = value" line per field
  void write(std::ostream& os, const std::string& prefix = "check") const;
};

// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

// tolerance scale used by every inequality certificate
inline double cert_tol(double lhs, double rhs) {
  const double a = lhs < 0 ? -lhs : lhs, b = rhs < 0 ? -rhs : rhs;
  double s = a > b ? a : b;
  if (s < 1.0 || s != s) s = 1.0;
  return 1e-8 * s;
}

}  // namespace nodal
