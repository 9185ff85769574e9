#pragma once

#include <array>
#include <iosfwd>
#include <utility>
#include <vector>

#include "nodal/barriers.hpp"

namespace nodal {

// Nodal clamp to [lo, hi].
GridFunction truncate(const GridFunction& w, const GridFunction& lo, const GridFunction& hi);

// -(lo - w)_+^{p-1} + (w - hi)_+^{p-1}
GridFunction penalty(const GridFunction& w, const GridFunction& lo, const GridFunction& hi, double p);
double penalty_value(double w, double lo, double hi, double p);

struct SystemOptions {
  double outer_tol = 0.0;  // <= 0 selects 1e-9 * box scale
  int max_outer = 200;
};

struct SolutionPair {
  GridFunction u, v;
  double residual_u = 0.0, residual_v = 0.0;
  int iterations = 0;
  bool box_ok = false;
  std::array<double, 2> penalty_active{};
  std::vector<double> changes;  // successive max-norm changes
  double outer_tol = 0.0;
  double box_scale = 0.0;
  bool degenerate_kernel = false;
};

// Entries lambda * integral of h_i phi_j (zero when lambda = 0).
Eigen::VectorXd forcing_load(const BarrierParams& params, int i, const Grid& grid);

// Max over hat test functions of |<A_p u, phi_j> - int (f + lambda h) phi_j| / int phi_j.
std::pair<double, double> weak_residual(const GridFunction& u, const GridFunction& v, const NonlinearitySpec& spec,
                                        const BarrierParams& params);

// Block Gauss-Seidel on the truncated, penalized Neumann system, started from
// the middle of the barrier box.
SolutionPair solve_penalized_system(const BarrierSet& bs, const NonlinearitySpec& spec, const BarrierParams& params,
                                    const SolverConfig& cfg, const SystemOptions& opt = {});

// Box containment with tol 1e-6 * box scale, max |chi_i| <= 1e-6 and weak
// residual <= 10 * outer_tol, per component.
CertificationReport certify_solution(const SolutionPair& sp, const BarrierSet& bs);

// min over interior nodes of min(u, v) / d
double empirical_c(const GridFunction& u, const GridFunction& v);

// A Neumann solution needs int f_i(u, v) = -lambda int h_i. Margin: sampled
// sup |f_i| over the box times |Omega| minus |lambda int h_i|.
CertificationReport check_compatibility(const BarrierSet& bs, const NonlinearitySpec& spec,
                                        const BarrierParams& params);

CertificationReport classify_solution(const SolutionPair& sp, const BarrierSet& bs, const BarrierParams& params);

// node, x, d, u, v, u_sub, u_sup, v_sub, v_sup, sign_u, sign_v
void write_tsv(std::ostream& os, const SolutionPair& sp, const BarrierSet& bs);

}  // namespace nodal
