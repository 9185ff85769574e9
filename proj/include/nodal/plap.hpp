#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "nodal/domain.hpp"

namespace nodal {

enum class BoundaryCondition { DirichletZero, NeumannZero };

struct SolverConfig {
  // |u'| is replaced by sqrt(u'^2 + eps^2); each stage warm-starts the next
  std::vector<double> eps_schedule{1e-2, 1e-4, 1e-6, 1e-10};
  double newton_tol = 1e-10;
  int max_newton = 200;
  double damping = 0.5;
  int max_halvings = 60;
  // per-iteration trace rows (stage, eps, iteration, residual, halvings)
  std::ostream* trace = nullptr;

  void validate() const;
};

// Pointwise right-hand side F(node, u_node).
using NodalRhs = std::function<double(Index, double)>;

// -div(|u'|^{p-2} u') = fixed_load + F(., u). fixed_load holds exact
// integrals against the hat functions (possibly singular data); F is lumped.
struct ScalarProblem {
  double p = 2.0;
  BoundaryCondition bc = BoundaryCondition::DirichletZero;
  NodalRhs rhs;
  Eigen::VectorXd fixed_load;  // empty means none
};

// Flux |g|_eps^{p-2} g and its derivative in g.
double reg_flux(double g, double p, double eps);
double reg_flux_derivative(double g, double p, double eps);

// Integrated weak form: entry j is the integral of |u'|_eps^{p-2} u' phi_j'.
Eigen::VectorXd weak_plap(const GridFunction& u, double p, double eps = 0.0);

// Nodal residual of -Delta_p u: the weak form divided by the lumped mass.
// Dirichlet boundary nodes return the constraint residual u - 0.
GridFunction apply_plap(const GridFunction& u, double p, double eps, BoundaryCondition bc);

GridFunction solve_scalar(const ScalarProblem& problem, const SolverConfig& cfg, const GridFunction& u0);
GridFunction solve_scalar(const NodalRhs& rhs, double p, BoundaryCondition bc, const SolverConfig& cfg,
                          const GridFunction& u0);

// Nodal derivative: three-point formula, one-sided at the ends.
Eigen::VectorXd nodal_gradient(const GridFunction& u);

struct BoundaryFlux {
  Index node;
  double normal_derivative;  // du/d(eta)
  double conormal;           // |u'|^{p-2} du/d(eta)
};

// Second-order one-sided evaluation at every boundary node.
std::vector<BoundaryFlux> boundary_flux(const GridFunction& u, double p);

}  // namespace nodal
