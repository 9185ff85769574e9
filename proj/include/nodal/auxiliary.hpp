#pragma once

#include <iosfwd>

#include "nodal/plap.hpp"
#include "nodal/report.hpp"

namespace nodal {

struct TorsionConstants {
  double L_hat = 0.0;  // max |z'|
  double l = 0.0;      // min z/d
  double L = 0.0;      // max(L_hat, max z/d)
};

struct TorsionPair {
  GridFunction z, z_delta;
  double p = 2.0, lambda = 0.0, theta = 0.0, delta = 0.0;
  double kappa = 1.0;  // gamma + 1
  TorsionConstants constants;
};

// -Delta_p z = 1, z = 0 on the boundary.
GridFunction torsion(double p, const GridPtr& grid, const SolverConfig& cfg);

// Load vector of the perturbed torsion problem: 1 off the strip d < delta,
// -lambda^{theta p} d^gamma on it, integrated exactly against the hats.
Eigen::VectorXd perturbed_torsion_load(double p, double lambda, double theta, double delta, const Grid& grid);

// Same problem as torsion() with the strip forcing above. `guess` (usually the
// torsion function) only seeds Newton.
GridFunction perturbed_torsion(double p, double lambda, double theta, double delta, const GridPtr& grid,
                               const SolverConfig& cfg, const GridFunction* guess = nullptr);

TorsionConstants extract_constants(const GridFunction& z, double p);

// l > 0, l d <= z <= L d, |z'| <= L_hat, dz/deta < 0 at each boundary node.
CertificationReport check_constants(const GridFunction& z, const TorsionConstants& c, double p);

TorsionPair make_torsion_pair(const GridFunction& z, const GridFunction& z_delta, double p, double lambda,
                              double theta, double delta);

// (j1): dz_delta/deta < dz/deta / 2 < 0 at each boundary node.
// (j2): z_delta >= z/2 - 1e-8 max z at every node.
CertificationReport check_strip_pair(const TorsionPair& tp);

struct Delta0Search {
  double delta0 = 0.0;      // largest certified delta found
  double delta = 0.0;       // delta0 / 2, the value handed downstream
  TorsionPair pair;         // at `delta`
  CertificationReport report;  // check_strip_pair at `delta`
  int solves = 0;
};

// Geometric descent from max d, then bisection in log delta, with
// check_strip_pair as predicate.
Delta0Search find_delta0(double p, double lambda, double theta, const GridFunction& z, const SolverConfig& cfg);

struct HolderQuotient {
  double seminorm_estimate = 0.0;
  double c1tau_norm = 0.0;
  double ratio = 0.0;
};

// Sampled Holder quotient of u/d (exponent tau/(tau+1)) against the C^{1,tau}
// norm of u, over node pairs closer than the half-width.
HolderQuotient holder_quotient(const GridFunction& u, double tau = 0.5);

// node, x, d, z, z_delta, z/d, z_delta/z
void write_tsv(std::ostream& os, const TorsionPair& tp);

}  // namespace nodal
