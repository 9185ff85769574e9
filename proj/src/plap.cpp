#include "nodal/plap.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "nodal/errors.hpp"
#include "nodal/report.hpp"

namespace nodal {

void SolverConfig::validate() const {
  if (eps_schedule.empty()) throw ConfigurationError("eps schedule is empty");
  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    if (!(eps_schedule[i] > 0.0)) throw ConfigurationError("eps schedule entries must be positive");
    if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
      throw ConfigurationError("eps schedule must be strictly decreasing");
  }
  if (!(newton_tol > 0.0)) throw ConfigurationError("newton_tol must be positive");
  if (max_newton < 1) throw ConfigurationError("max_newton must be at least 1");
  if (!(damping > 0.0 && damping < 1.0)) throw ConfigurationError("damping must lie in (0, 1)");
  if (max_halvings < 1) throw ConfigurationError("max_halvings must be at least 1");
}

double reg_flux(double g, double p, double eps) {
  if (p == 2.0) return g;
  const double s = g * g + eps * eps;
  if (s == 0.0) return 0.0;
  return std::pow(s, 0.5 * (p - 2.0)) * g;
}

double reg_flux_derivative(double g, double p, double eps) {
  if (p == 2.0) return 1.0;
  const double s = g * g + eps * eps;
  if (s == 0.0) return p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(s, 0.5 * (p - 4.0)) * ((p - 1.0) * g * g + eps * eps);
}

namespace {

std::string fmt_num(double v) {
  return format_number(v);
}

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigurationError("exponent p must exceed 1");
}

// Cell fluxes c_k * Phi(g_k) with c_k = |cell| / h_k.
Eigen::VectorXd cell_fluxes(const Grid& g, const Eigen::VectorXd& u, double p, double eps) {
  Eigen::VectorXd f(g.cells());
  for (Index k = 0; k < g.cells(); ++k) {
    const double h = g.spacing(k);
    f[k] = g.cell_weights()[k] / h * reg_flux((u[k + 1] - u[k]) / h, p, eps);
  }
  return f;
}

Eigen::VectorXd assemble_weak(const Grid& g, const Eigen::VectorXd& u, double p, double eps,
                              Eigen::VectorXd* flux_scale = nullptr) {
  const Eigen::VectorXd f = cell_fluxes(g, u, p, eps);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(g.size());
  if (flux_scale) flux_scale->setZero(g.size());
  for (Index k = 0; k < g.cells(); ++k) {
    w[k] -= f[k];
    w[k + 1] += f[k];
    if (flux_scale) {
      (*flux_scale)[k] += std::abs(f[k]);
      (*flux_scale)[k + 1] += std::abs(f[k]);
    }
  }
  return w;
}

// Tridiagonal solve without pivoting; false on a vanishing or non-finite pivot.
bool thomas(Eigen::VectorXd lo, Eigen::VectorXd di, Eigen::VectorXd up, Eigen::VectorXd rhs,
            Eigen::VectorXd& x) {
  const Index n = di.size();
  for (Index i = 1; i < n; ++i) {
    if (di[i - 1] == 0.0 || !std::isfinite(di[i - 1])) return false;
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  x.resize(n);
  if (di[n - 1] == 0.0 || !std::isfinite(di[n - 1])) return false;
  x[n - 1] = rhs[n - 1] / di[n - 1];
  for (Index i = n - 2; i >= 0; --i) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
  return x.allFinite();
}

}  // namespace

Eigen::VectorXd weak_plap(const GridFunction& u, double p, double eps) {
  check_p(p);
  return assemble_weak(*u.grid(), u.values(), p, eps);
}

GridFunction apply_plap(const GridFunction& u, double p, double eps, BoundaryCondition bc) {
  check_p(p);
  const Grid& g = *u.grid();
  Eigen::VectorXd r = assemble_weak(g, u.values(), p, eps).cwiseQuotient(g.node_weights());
  if (bc == BoundaryCondition::DirichletZero)
    for (Index b : g.boundary_nodes()) r[b] = u[b];
  return GridFunction(u.grid(), std::move(r));
}

GridFunction solve_scalar(const NodalRhs& rhs, double p, BoundaryCondition bc, const SolverConfig& cfg,
                          const GridFunction& u0) {
  ScalarProblem prob;
  prob.p = p;
  prob.bc = bc;
  prob.rhs = rhs;
  return solve_scalar(prob, cfg, u0);
}

GridFunction solve_scalar(const ScalarProblem& prob, const SolverConfig& cfg, const GridFunction& u0) {
  check_p(prob.p);
  cfg.validate();
  const GridPtr& gp = u0.grid();
  const Grid& g = *gp;
  const Index n = g.size();
  const double p = prob.p;
  const Eigen::VectorXd& m = g.node_weights();
  const bool dirichlet = prob.bc == BoundaryCondition::DirichletZero;
  std::vector<char> fixed(n, 0);
  if (dirichlet)
    for (Index b : g.boundary_nodes()) fixed[b] = 1;

  Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
  if (prob.fixed_load.size() != 0) {
    if (prob.fixed_load.size() != n) throw ConfigurationError("fixed load length mismatch");
    load = prob.fixed_load;
  }
  auto F = [&](Index j, double s) { return prob.rhs ? prob.rhs(j, s) : 0.0; };

  bool independent = true;
  if (prob.rhs) {
    for (Index j = 0; j < n && independent; ++j) {
      const double f0 = F(j, 0.0);
      for (double s : {1.0, -1.0, 1e3, -1e3})
        if (F(j, s) != f0) {
          independent = false;
          break;
        }
    }
  }
  bool project = false;
  if (!dirichlet && independent) {
    double total = 0.0, scale = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double t = load[j] + m[j] * F(j, 0.0);
      total += t;
      scale += std::abs(load[j]) + m[j] * std::abs(F(j, 0.0));
    }
    if (std::abs(total) > 1e-10 * scale)
      throw CompatibilityError("Neumann data do not integrate to zero (total " + fmt_num(total) + ")");
    project = true;
  }
  const double total_mass = m.sum();
  auto zero_mean = [&](Eigen::VectorXd& v) {
    if (project) v.array() -= v.dot(m) / total_mass;
  };

  Eigen::VectorXd u = u0.values();
  for (Index j = 0; j < n; ++j)
    if (fixed[j]) u[j] = 0.0;
  zero_mean(u);

  std::vector<double> stages;
  if (p == 2.0)
    stages.push_back(0.0);
  else
    stages = cfg.eps_schedule;

  Eigen::VectorXd Fv(n), flux_scale(n);
  // residual R_j = weak_j - load_j - m_j F_j (free nodes), u_j (fixed nodes)
  auto residual = [&](const Eigen::VectorXd& w, double eps, Eigen::VectorXd* fs) {
    Eigen::VectorXd r = assemble_weak(g, w, p, eps, fs);
    for (Index j = 0; j < n; ++j) {
      if (fixed[j]) {
        r[j] = w[j];
        continue;
      }
      Fv[j] = F(j, w[j]);
      r[j] -= load[j] + m[j] * Fv[j];
    }
    return r;
  };
  auto merit = [&](const Eigen::VectorXd& r) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) s += fixed[j] ? r[j] * r[j] : r[j] * r[j] / m[j];
    return s;
  };

  double last_norm = std::numeric_limits<double>::infinity();
  for (std::size_t st = 0; st < stages.size(); ++st) {
    const double eps = stages[st];
    const bool final_stage = st + 1 == stages.size();
    const double tol = final_stage ? cfg.newton_tol : std::max(cfg.newton_tol, 1e-6);
    bool converged = false;
    for (int it = 0; it <= cfg.max_newton; ++it) {
      Eigen::VectorXd r = residual(u, eps, &flux_scale);

      // tridiagonal Jacobian
      Eigen::VectorXd lo = Eigen::VectorXd::Zero(n), di = Eigen::VectorXd::Zero(n),
                      up = Eigen::VectorXd::Zero(n), noise = Eigen::VectorXd::Zero(n);
      for (Index k = 0; k < g.cells(); ++k) {
        const double h = g.spacing(k);
        const double c = g.cell_weights()[k] / h * reg_flux_derivative((u[k + 1] - u[k]) / h, p, eps) / h;
        di[k] += c;
        di[k + 1] += c;
        up[k] -= c;
        lo[k + 1] -= c;
        // roundoff in u_{k+1} - u_k propagated through the flux
        const double e = c * (std::abs(u[k]) + std::abs(u[k + 1]));
        noise[k] += e;
        noise[k + 1] += e;
      }

      double norm = 0.0, data = 1.0, floor = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (fixed[j]) continue;
        norm = std::max(norm, std::abs(r[j]) / m[j]);
        data = std::max(data, std::abs(load[j]) / m[j] + std::abs(Fv[j]));
        floor = std::max(floor, 64.0 * std::numeric_limits<double>::epsilon() *
                                    (flux_scale[j] + noise[j] + std::abs(load[j]) + m[j] * std::abs(Fv[j])) / m[j]);
      }
      last_norm = norm;
      const double target = std::max(tol * data, floor);
      if (!std::isfinite(norm)) break;
      if (norm <= target) {
        converged = true;
        if (cfg.trace) *cfg.trace << st << '\t' << eps << '\t' << it << '\t' << norm << "\t0\n";
        break;
      }
      if (it == cfg.max_newton) break;

      for (Index j = 0; j < n; ++j) {
        if (fixed[j]) {
          di[j] = 1.0;
          lo[j] = 0.0;
          up[j] = 0.0;
          continue;
        }
        if (prob.rhs && !independent) {
          const double eta = 1e-6 * std::max(1.0, std::abs(u[j]));
          const double dF = (F(j, u[j] + eta) - F(j, u[j] - eta)) / (2.0 * eta);
          if (std::isfinite(dF)) di[j] -= m[j] * dF;
        }
      }
      double jscale = 0.0;
      for (Index j = 0; j < n; ++j) jscale = std::max(jscale, std::abs(di[j]) / (fixed[j] ? 1.0 : m[j]));

      const double phi0 = merit(r);
      double sigma = dirichlet ? 0.0 : 1e-13 * jscale;
      bool accepted = false;
      int halvings = 0;
      for (int attempt = 0; attempt < 10 && !accepted; ++attempt) {
        Eigen::VectorXd dshift = di;
        for (Index j = 0; j < n; ++j)
          if (!fixed[j]) dshift[j] += sigma * m[j];
        Eigen::VectorXd step;
        if (thomas(lo, dshift, up, -r, step)) {
          zero_mean(step);
          double t = 1.0;
          for (halvings = 0; halvings <= cfg.max_halvings; ++halvings) {
            Eigen::VectorXd trial = u + t * step;
            Eigen::VectorXd rt = residual(trial, eps, nullptr);
            const double phi = merit(rt);
            if (std::isfinite(phi) && phi <= (1.0 - 1e-4 * t) * phi0) {
              u = trial;
              accepted = true;
              break;
            }
            t *= cfg.damping;
          }
        }
        sigma = sigma > 0.0 ? sigma * 100.0 : 1e-8 * jscale;
      }
      if (cfg.trace) *cfg.trace << st << '\t' << eps << '\t' << it << '\t' << norm << '\t' << halvings << '\n';
      if (!accepted) break;
    }
    if (!converged && final_stage)
      throw ConvergenceError("Newton iteration did not converge (residual " + fmt_num(last_norm) + ")",
                             u, last_norm);
  }
  return GridFunction(gp, std::move(u));
}

Eigen::VectorXd nodal_gradient(const GridFunction& uf) {
  const Grid& g = *uf.grid();
  const auto& x = g.nodes();
  const auto& u = uf.values();
  const Index n = g.size();
  Eigen::VectorXd d(n);
  for (Index j = 1; j + 1 < n; ++j) {
    const double hl = x[j] - x[j - 1], hr = x[j + 1] - x[j];
    d[j] = -hr / (hl * (hl + hr)) * u[j - 1] + (hr - hl) / (hl * hr) * u[j] + hl / (hr * (hl + hr)) * u[j + 1];
  }
  {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * u[0] + (h1 + h2) / (h1 * h2) * u[1] -
           h1 / (h2 * (h1 + h2)) * u[2];
  }
  {
    const double h1 = x[n - 1] - x[n - 2], h2 = x[n - 2] - x[n - 3];
    d[n - 1] = (2 * h1 + h2) / (h1 * (h1 + h2)) * u[n - 1] - (h1 + h2) / (h1 * h2) * u[n - 2] +
               h1 / (h2 * (h1 + h2)) * u[n - 3];
  }
  // radial symmetry at the center
  if (g.domain().kind == DomainKind::RadialBall) d[0] = 0.0;
  return d;
}

std::vector<BoundaryFlux> boundary_flux(const GridFunction& u, double p) {
  check_p(p);
  const Grid& g = *u.grid();
  const Eigen::VectorXd du = nodal_gradient(u);
  std::vector<BoundaryFlux> out;
  for (Index b : g.boundary_nodes()) {
    const double dn = g.outward_sign(b) * du[b];
    const double a = std::abs(dn);
    out.push_back({b, dn, a == 0.0 ? 0.0 : std::pow(a, p - 2.0) * dn});
  }
  return out;
}

}  // namespace nodal
