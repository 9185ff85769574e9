#include "nodal/auxiliary.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "nodal/errors.hpp"
#include "nodal/model.hpp"

namespace nodal {

GridFunction torsion(double p, const GridPtr& grid, const SolverConfig& cfg) {
  if (!(p > 1.0)) throw ConfigurationError("exponent p must exceed 1");
  ScalarProblem prob;
  prob.p = 2.0;
  prob.bc = BoundaryCondition::DirichletZero;
  prob.fixed_load = grid->node_weights();
  GridFunction u = solve_scalar(prob, cfg, GridFunction::constant(grid, 0.0));
  if (p == 2.0) return u;
  // seed Newton with the linear solve rescaled to the radial closed-form peak
  const double dstar = grid->domain().max_distance();
  const double pc = p / (p - 1.0);
  const double umax = u.values().maxCoeff();
  if (umax > 0) {
    const double target = (p - 1.0) / p * std::pow(1.0 / grid->domain().dimension(), 1.0 / (p - 1.0)) *
                          std::pow(dstar, pc);
    u.values() *= target / umax;
  }
  prob.p = p;
  return solve_scalar(prob, cfg, u);
}

Eigen::VectorXd perturbed_torsion_load(double p, double lambda, double theta, double delta, const Grid& grid) {
  const double kappa = singular_margin(p, lambda, theta);
  if (!(kappa > 0.0 && kappa < 1.0) || !(kappa >= 1e-300))
    throw ConfigurationError("singular exponent outside (-1, 0) for p=" + std::to_string(p));
  if (!(delta > 0.0) || delta > grid.domain().max_distance())
    throw ConfigurationError("strip width out of range");
  Eigen::VectorXd load = weighted_load(grid, WeightExponent::from_margin(1.0), Region::outside(delta));
  const Eigen::VectorXd strip = weighted_load(grid, WeightExponent::from_margin(kappa), Region::strip(delta));
  const double log_scale = theta * p * std::log(lambda);
  for (Index j = 0; j < load.size(); ++j)
    if (strip[j] > 0.0) load[j] -= std::exp(std::log(strip[j]) + log_scale);
  return load;
}

GridFunction perturbed_torsion(double p, double lambda, double theta, double delta, const GridPtr& grid,
                               const SolverConfig& cfg, const GridFunction* guess) {
  if (!(p > 1.0)) throw ConfigurationError("exponent p must exceed 1");
  ScalarProblem prob;
  prob.p = p;
  prob.bc = BoundaryCondition::DirichletZero;
  prob.fixed_load = perturbed_torsion_load(p, lambda, theta, delta, *grid);
  if (guess) return solve_scalar(prob, cfg, *guess);
  return solve_scalar(prob, cfg, torsion(p, grid, cfg));
}

namespace {

// z/d at interior nodes, -dz/deta at boundary nodes
Eigen::VectorXd ratio_to_distance(const GridFunction& z) {
  const Grid& g = *z.grid();
  Eigen::VectorXd r(g.size());
  const Eigen::VectorXd dz = nodal_gradient(z);
  for (Index j = 0; j < g.size(); ++j) {
    if (g.is_boundary(j))
      r[j] = -g.outward_sign(j) * dz[j];
    else
      r[j] = z[j] / g.distance()[j];
  }
  return r;
}

}  // namespace

TorsionConstants extract_constants(const GridFunction& z, double /*p*/) {
  const Grid& g = *z.grid();
  for (Index j = 0; j < g.size(); ++j)
    if (!g.is_boundary(j) && !(z[j] > 0.0))
      throw PositivityError("torsion function is not positive at node " + std::to_string(j));
  const Eigen::VectorXd r = ratio_to_distance(z);
  TorsionConstants c;
  c.L_hat = nodal_gradient(z).cwiseAbs().maxCoeff();
  c.l = r.minCoeff();
  c.L = std::max(c.L_hat, r.maxCoeff());
  if (!(c.l > 0.0)) throw PositivityError("boundary flux of the torsion function is not negative");
  return c;
}

CertificationReport check_constants(const GridFunction& z, const TorsionConstants& c, double p) {
  const Grid& g = *z.grid();
  CertificationReport rep;
  MarginTracker pos("constants.l_positive", &g);
  pos.update_strict(c.l);
  rep.add(pos.result());
  MarginTracker lo("constants.lower", &g), hi("constants.upper", &g), gr("constants.gradient", &g);
  const Eigen::VectorXd dz = nodal_gradient(z);
  for (Index j = 0; j < g.size(); ++j) {
    const double d = g.distance()[j];
    lo.update(z[j] - c.l * d + cert_tol(z[j], c.l * d), j);
    hi.update(c.L * d - z[j] + cert_tol(z[j], c.L * d), j);
    gr.update(c.L_hat - std::abs(dz[j]) + cert_tol(c.L_hat, dz[j]), j);
  }
  rep.add(lo.result());
  rep.add(hi.result());
  rep.add(gr.result());
  MarginTracker fl("constants.boundary_flux", &g);
  for (const auto& b : boundary_flux(z, p)) fl.update_strict(-b.normal_derivative, b.node);
  rep.add(fl.result());
  return rep;
}

TorsionPair make_torsion_pair(const GridFunction& z, const GridFunction& z_delta, double p, double lambda,
                              double theta, double delta) {
  require_same_grid(z, z_delta);
  TorsionPair tp;
  tp.z = z;
  tp.z_delta = z_delta;
  tp.p = p;
  tp.lambda = lambda;
  tp.theta = theta;
  tp.delta = delta;
  tp.kappa = singular_margin(p, lambda, theta);
  tp.constants = extract_constants(z, p);
  return tp;
}

CertificationReport check_strip_pair(const TorsionPair& tp) {
  require_same_grid(tp.z, tp.z_delta);
  const Grid& g = *tp.z.grid();
  CertificationReport rep;
  MarginTracker j1("strip.slope", &g);
  const auto fz = boundary_flux(tp.z, tp.p);
  const auto fd = boundary_flux(tp.z_delta, tp.p);
  for (std::size_t k = 0; k < fz.size(); ++k) {
    const double half = 0.5 * fz[k].normal_derivative;
    // both strict inequalities; the smaller gap is the margin
    const double m = std::min(half - fd[k].normal_derivative, -half);
    j1.update_strict(m, fz[k].node);
  }
  rep.add(j1.result());
  MarginTracker j2("strip.height", &g);
  const double tol = 1e-8 * tp.z.values().cwiseAbs().maxCoeff();
  for (Index j = 0; j < g.size(); ++j) j2.update(tp.z_delta[j] - 0.5 * tp.z[j] + tol, j);
  rep.add(j2.result());
  return rep;
}

Delta0Search find_delta0(double p, double lambda, double theta, const GridFunction& z, const SolverConfig& cfg) {
  const GridPtr& grid = z.grid();
  Delta0Search out;
  auto certify = [&](double delta, TorsionPair* keep) {
    GridFunction zd = perturbed_torsion(p, lambda, theta, delta, grid, cfg, &z);
    ++out.solves;
    TorsionPair tp = make_torsion_pair(z, zd, p, lambda, theta, delta);
    const bool ok = check_strip_pair(tp).passed();
    if (keep) *keep = std::move(tp);
    return ok;
  };
  auto safe_certify = [&](double delta) {
    try {
      return certify(delta, nullptr);
    } catch (const ConvergenceError&) {
      return false;
    }
  };
  double hi = grid->domain().max_distance();
  double pass = 0.0, fail = 0.0;
  if (safe_certify(hi)) {
    pass = hi;
  } else {
    fail = hi;
    for (double d = hi * 1e-8; d > 1e-300; d *= 1e-8) {
      if (safe_certify(d)) {
        pass = d;
        break;
      }
      fail = d;
    }
    if (pass == 0.0) throw ConvergenceError("no strip width certifies (j1)/(j2)", z.values(), 0.0);
    while (fail / pass > 1.05) {
      const double mid = std::sqrt(fail) * std::sqrt(pass);
      if (safe_certify(mid))
        pass = mid;
      else
        fail = mid;
    }
  }
  out.delta0 = pass;
  out.delta = 0.5 * pass;
  certify(out.delta, &out.pair);
  out.report = check_strip_pair(out.pair);
  return out;
}

HolderQuotient holder_quotient(const GridFunction& u, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigurationError("tau must lie in (0, 1)");
  const Grid& g = *u.grid();
  const double umax = u.values().cwiseAbs().maxCoeff();
  for (Index b : g.boundary_nodes())
    if (std::abs(u[b]) > 1e-12 * umax) throw PreconditionError("function does not vanish on the boundary");
  const Eigen::VectorXd q = ratio_to_distance(u);
  const Eigen::VectorXd du = nodal_gradient(u);
  const auto& x = g.nodes();
  const double sigma = tau / (tau + 1.0);
  const double reach = g.domain().max_distance();
  double semi_q = 0.0, semi_du = 0.0;
  for (Index i = 0; i < g.size(); ++i)
    for (Index j = i + 1; j < g.size(); ++j) {
      const double dx = x[j] - x[i];
      if (dx >= reach) break;
      semi_q = std::max(semi_q, std::abs(q[i] - q[j]) / std::pow(dx, sigma));
      semi_du = std::max(semi_du, std::abs(du[i] - du[j]) / std::pow(dx, tau));
    }
  HolderQuotient h;
  h.seminorm_estimate = semi_q;
  h.c1tau_norm = umax + du.cwiseAbs().maxCoeff() + semi_du;
  h.ratio = h.c1tau_norm > 0.0 ? semi_q / h.c1tau_norm : 0.0;
  return h;
}

void write_tsv(std::ostream& os, const TorsionPair& tp) {
  const Grid& g = *tp.z.grid();
  os << "node\tx\td\tz\tz_delta\tz_over_d\tz_delta_over_z\n";
  for (Index j = 0; j < g.size(); ++j) {
    const double d = g.distance()[j];
    os << j << '\t' << g.node(j) << '\t' << d << '\t' << tp.z[j] << '\t' << tp.z_delta[j] << '\t'
       << (d > 0 ? tp.z[j] / d : std::nan("")) << '\t' << (tp.z[j] != 0 ? tp.z_delta[j] / tp.z[j] : std::nan(""))
       << '\n';
  }
}

}  // namespace nodal
