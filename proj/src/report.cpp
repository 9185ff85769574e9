#include "nodal/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace nodal {

void MarginTracker::update(double margin, Index node) {
  if (!(margin >= 0.0)) r_.pass = false;
  // NaN ranks below every number
  const double key = std::isnan(margin) ? -INFINITY : margin;
  if (key < worst_key_) {
    worst_key_ = key;
    r_.worst_margin = margin;
    r_.node = node;
    r_.location = (grid_ && node >= 0) ? grid_->node(node) : std::nan("");
  }
}

bool CertificationReport::passed() const {
  for (const auto& c : checks)
    if (!c.skipped && !c.pass) return false;
  return true;
}

void CertificationReport::merge(const CertificationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

const CheckResult* CertificationReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void CertificationReport::write(std::ostream& os, const std::string& prefix) const {
  for (const auto& c : checks) {
    const std::string k = prefix + "." + c.id + ".";
    os << k << "status = " << (c.skipped ? "skipped" : (c.pass ? "pass" : "fail")) << '\n';
    os << k << "worst_margin = " << format_number(c.worst_margin) << '\n';
    os << k << "node = " << c.node << '\n';
    os << k << "x = " << format_number(c.location) << '\n';
    if (!c.note.empty()) os << k << "note = " << c.note << '\n';
  }
}

}  // namespace nodal
