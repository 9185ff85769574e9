#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nodal/barriers.hpp"
#include "nodal/system.hpp"

namespace nodal {

enum class Mode { TorsionOnly, Barriers, Nodal, Positive, VerifyAll, Sweep };

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

struct SweepRanges {
  std::vector<double> lambda, theta;
  std::vector<double> delta;  // empty: delta from the strip search
  std::vector<std::pair<double, double>> p;  // empty: (p1, p2)
};

// Flat key = value file, '#' starts a comment. Keys:
//   domain = interval | ball      a, b | radius, dimension
//   nodes, grading, p1, p2
//   nonlinearity = zero | trig | power | manufactured, nonlinearity.<M1|alpha1|...>
//   mode = torsion | barriers | nodal | positive | verify-all | sweep
//   newton_tol, max_newton, eps_schedule (comma list)
//   outer_tol, max_outer, lambda_max, theta_max
//   seed, samples, tau
//   sweep.lambda, sweep.theta, sweep.delta (comma lists), sweep.p (p or p1:p2 entries)
//   out
struct RunConfig {
  DomainDesc domain = DomainDesc::ball(1.0, 3);
  Index nodes = 257;
  double grading = 2.0;
  double p1 = 2.2, p2 = 2.8;
  std::string nonlinearity = "trig";
  std::map<std::string, double> overrides;
  Mode mode = Mode::Nodal;
  SolverConfig solver;
  SystemOptions system;
  Caps caps;
  std::uint64_t seed = 20240601;
  int samples = 9;
  double tau = 0.5;
  SweepRanges sweep;
  std::string out;

  // Applies one key; throws ConfigurationError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  // Canonical key = value echo, one per line, fixed order.
  void write(std::ostream& os) const;

  Exponents exponents() const;
  SamplingOptions sampling() const { return {samples, seed}; }
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

}  // namespace nodal
