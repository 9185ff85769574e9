#include "nodal/system.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "nodal/errors.hpp"

namespace nodal {

GridFunction truncate(const GridFunction& w, const GridFunction& lo, const GridFunction& hi) {
  require_same_grid(w, lo);
  require_same_grid(w, hi);
  Eigen::VectorXd out(w.size());
  for (Index j = 0; j < w.size(); ++j) {
    if (lo[j] > hi[j]) throw ConfigurationError("truncation box is empty at node " + std::to_string(j));
    out[j] = std::clamp(w[j], lo[j], hi[j]);
  }
  return GridFunction(w.grid(), std::move(out));
}

double penalty_value(double w, double lo, double hi, double p) {
  if (w < lo) return -std::pow(lo - w, p - 1.0);
  if (w > hi) return std::pow(w - hi, p - 1.0);
  return 0.0;
}

GridFunction penalty(const GridFunction& w, const GridFunction& lo, const GridFunction& hi, double p) {
  require_same_grid(w, lo);
  require_same_grid(w, hi);
  Eigen::VectorXd out(w.size());
  for (Index j = 0; j < w.size(); ++j) {
    if (lo[j] > hi[j]) throw ConfigurationError("penalty box is empty at node " + std::to_string(j));
    out[j] = penalty_value(w[j], lo[j], hi[j], p);
  }
  return GridFunction(w.grid(), std::move(out));
}

Eigen::VectorXd forcing_load(const BarrierParams& P, int i, const Grid& grid) {
  if (P.weight.lambda == 0.0) return Eigen::VectorXd::Zero(grid.size());
  const WeightExponent ex = P.weight.exponent(i);
  const Eigen::VectorXd plus = weighted_load(grid, ex, Region::outside(P.weight.delta));
  const Eigen::VectorXd minus = weighted_load(grid, ex, Region::strip(P.weight.delta));
  const double ll = std::log(P.weight.lambda);
  Eigen::VectorXd out(grid.size());
  auto scaled = [ll](double v) { return v > 0.0 ? std::exp(std::log(v) + ll) : 0.0; };
  for (Index j = 0; j < out.size(); ++j) out[j] = scaled(plus[j]) - scaled(minus[j]);
  return out;
}

namespace {

double residual_norm(const GridFunction& w, double p, const Eigen::VectorXd& load,
                     const std::function<double(Index)>& f) {
  const Grid& g = *w.grid();
  const Eigen::VectorXd a = weak_plap(w, p, 0.0);
  double r = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    const double m = g.node_weights()[j];
    r = std::max(r, std::abs(a[j] - load[j] - m * f(j)) / m);
  }
  return r;
}

}  // namespace

std::pair<double, double> weak_residual(const GridFunction& u, const GridFunction& v, const NonlinearitySpec& spec,
                                        const BarrierParams& P) {
  require_same_grid(u, v);
  const Grid& g = *u.grid();
  const Eigen::VectorXd H1 = forcing_load(P, 0, g), H2 = forcing_load(P, 1, g);
  const double ru = residual_norm(u, P.exponents.p1, H1, [&](Index j) { return spec.f(g.node(j), u[j], v[j]); });
  const double rv = residual_norm(v, P.exponents.p2, H2, [&](Index j) { return spec.g(g.node(j), u[j], v[j]); });
  return {ru, rv};
}

SolutionPair solve_penalized_system(const BarrierSet& bs, const NonlinearitySpec& spec, const BarrierParams& P,
                                    const SolverConfig& cfg, const SystemOptions& opt) {
  if (!(P.mu > 0.0)) throw ConfigurationError("penalty coefficient mu must be positive");
  if (opt.max_outer < 1) throw ConfigurationError("max_outer must be positive");
  const GridPtr& gp = bs.u_sub.grid();
  const Grid& g = *gp;
  for (int i = 0; i < 2; ++i)
    for (Index j = 0; j < g.size(); ++j)
      if (bs.sub(i)[j] > bs.sup(i)[j]) throw ConfigurationError("barrier box is empty at node " + std::to_string(j));

  SolutionPair sp;
  sp.box_scale = std::max({bs.u_sub.values().cwiseAbs().maxCoeff(), bs.u_sup.values().cwiseAbs().maxCoeff(),
                           bs.v_sub.values().cwiseAbs().maxCoeff(), bs.v_sup.values().cwiseAbs().maxCoeff()});
  sp.outer_tol = opt.outer_tol > 0.0 ? opt.outer_tol : 1e-9 * std::max(sp.box_scale, 1e-300);
  sp.degenerate_kernel = P.weight.lambda == 0.0 && spec.label == "zero";

  const Eigen::VectorXd H1 = forcing_load(P, 0, g), H2 = forcing_load(P, 1, g);
  GridFunction u(gp, 0.5 * (bs.u_sub.values() + bs.u_sup.values()));
  GridFunction v(gp, 0.5 * (bs.v_sub.values() + bs.v_sup.values()));
  const double mu = P.mu;

  bool converged = false;
  for (int it = 1; it <= opt.max_outer; ++it) {
    const GridFunction tv = truncate(v, bs.v_sub, bs.v_sup);
    ScalarProblem pu;
    pu.p = P.exponents.p1;
    pu.bc = BoundaryCondition::NeumannZero;
    pu.fixed_load = H1;
    pu.rhs = [&](Index j, double s) {
      const double ts = std::clamp(s, bs.u_sub[j], bs.u_sup[j]);
      return spec.f(g.node(j), ts, tv[j]) - mu * penalty_value(s, bs.u_sub[j], bs.u_sup[j], pu.p);
    };
    GridFunction un = solve_scalar(pu, cfg, u);

    const GridFunction tu = truncate(un, bs.u_sub, bs.u_sup);
    ScalarProblem pv;
    pv.p = P.exponents.p2;
    pv.bc = BoundaryCondition::NeumannZero;
    pv.fixed_load = H2;
    pv.rhs = [&](Index j, double t) {
      const double tt = std::clamp(t, bs.v_sub[j], bs.v_sup[j]);
      return spec.g(g.node(j), tu[j], tt) - mu * penalty_value(t, bs.v_sub[j], bs.v_sup[j], pv.p);
    };
    GridFunction vn = solve_scalar(pv, cfg, v);

    const double change = std::max((un.values() - u.values()).cwiseAbs().maxCoeff(),
                                   (vn.values() - v.values()).cwiseAbs().maxCoeff());
    sp.changes.push_back(change);
    u = std::move(un);
    v = std::move(vn);
    sp.iterations = it;
    if (change <= sp.outer_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("block Gauss-Seidel did not converge in " + std::to_string(opt.max_outer) +
                               " outer iterations",
                           u.values(), sp.changes.empty() ? 0.0 : sp.changes.back());

  sp.u = u;
  sp.v = v;
  std::tie(sp.residual_u, sp.residual_v) = weak_residual(u, v, spec, P);
  const double tol = 1e-6 * sp.box_scale;
  sp.box_ok = true;
  for (Index j = 0; j < g.size(); ++j) {
    if (u[j] < bs.u_sub[j] - tol || u[j] > bs.u_sup[j] + tol) sp.box_ok = false;
    if (v[j] < bs.v_sub[j] - tol || v[j] > bs.v_sup[j] + tol) sp.box_ok = false;
  }
  sp.penalty_active = {penalty(u, bs.u_sub, bs.u_sup, P.exponents.p1).values().cwiseAbs().maxCoeff(),
                       penalty(v, bs.v_sub, bs.v_sup, P.exponents.p2).values().cwiseAbs().maxCoeff()};
  return sp;
}

CertificationReport certify_solution(const SolutionPair& sp, const BarrierSet& bs) {
  const Grid& g = *sp.u.grid();
  const double tol = 1e-6 * sp.box_scale;
  CertificationReport rep;
  for (int i = 0; i < 2; ++i) {
    const GridFunction& w = i == 0 ? sp.u : sp.v;
    const std::string c = i == 0 ? "u" : "v";
    MarginTracker box("system.box_containment." + c, &g);
    for (Index j = 0; j < g.size(); ++j) box.update(std::min(w[j] - bs.sub(i)[j], bs.sup(i)[j] - w[j]) + tol, j);
    rep.add(box.result());
    MarginTracker pen("system.penalty_inactive." + c, &g);
    pen.update(1e-6 - sp.penalty_active[i]);
    rep.add(pen.result());
    MarginTracker res("system.weak_residual." + c, &g);
    res.update(10.0 * sp.outer_tol - (i == 0 ? sp.residual_u : sp.residual_v));
    rep.add(res.result());
  }
  return rep;
}

double empirical_c(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  const Grid& g = *u.grid();
  double c = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < g.size(); ++j)
    if (!g.is_boundary(j)) c = std::min(c, std::min(u[j], v[j]) / g.distance()[j]);
  return c;
}

CertificationReport check_compatibility(const BarrierSet& bs, const NonlinearitySpec& spec,
                                        const BarrierParams& P) {
  const Grid& g = *bs.u_sub.grid();
  const double measure = g.node_weights().sum();
  const double fmax = box_bound(bs, spec);
  CertificationReport rep;
  for (int i = 0; i < 2; ++i) {
    const double total = forcing_load(P, i, g).sum();
    MarginTracker t(std::string("neumann_compatibility.") + (i == 0 ? "u" : "v"), &g);
    t.update(fmax * measure - std::abs(total));
    auto r = t.result();
    std::ostringstream note;
    note << "lambda*int(h)=" << total << " sup|f|*|Omega|=" << fmax * measure;
    r.note = note.str();
    rep.add(r);
  }
  return rep;
}

CertificationReport classify_solution(const SolutionPair& sp, const BarrierSet& bs, const BarrierParams& P) {
  const Grid& g = *sp.u.grid();
  CertificationReport rep;
  if (bs.kind == BarrierKind::Positive) {
    const double c = empirical_c(sp.u, sp.v);
    MarginTracker pos("positive.c_emp", &g);
    pos.update_strict(c);
    auto r = pos.result();
    r.note = "c_emp=" + format_number(c);
    rep.add(r);
    const double bound = P.constants.l / (8.0 * P.weight.lambda);
    MarginTracker b("positive.c_emp_vs_l_over_8lambda", &g);
    b.update(c - bound);
    auto rb = b.result();
    rb.note = "l/(8 lambda)=" + format_number(bound);
    rep.add(rb);
    return rep;
  }
  const double inner = std::exp(-P.weight.theta * std::log(P.weight.lambda) + std::log(P.weight.delta));
  for (int i = 0; i < 2; ++i) {
    const GridFunction& w = i == 0 ? sp.u : sp.v;
    const std::string c = i == 0 ? "u" : "v";
    const double thr = 1e-10 * w.values().cwiseAbs().maxCoeff();
    MarginTracker neg("nodal.negative_near_boundary." + c, &g);
    MarginTracker pos("nodal.positive_interior." + c, &g);
    MarginTracker both("nodal.sign_change." + c, &g);
    Index n_near = 0, n_far = 0;
    for (Index j = 0; j < g.size(); ++j) {
      const double d = g.distance()[j];
      if (d < inner) {
        neg.update_strict(-w[j] - thr, j);
        ++n_near;
      }
      if (d > P.weight.delta) {
        pos.update_strict(w[j] - thr, j);
        ++n_far;
      }
    }
    both.update_strict(std::min(w.values().maxCoeff(), -w.values().minCoeff()) - thr);
    auto rn = neg.result();
    rn.note = std::to_string(n_near) + " nodes with d < lambda^-theta delta";
    auto rp = pos.result();
    rp.note = std::to_string(n_far) + " nodes with d > delta";
    rep.add(rn);
    rep.add(rp);
    rep.add(both.result());
  }
  return rep;
}

void write_tsv(std::ostream& os, const SolutionPair& sp, const BarrierSet& bs) {
  const Grid& g = *sp.u.grid();
  os << "node\tx\td\tu\tv\tu_sub\tu_sup\tv_sub\tv_sup\tsign_u\tsign_v\n";
  auto sgn = [](double a, double thr) { return a > thr ? 1 : (a < -thr ? -1 : 0); };
  const double tu = 1e-10 * sp.u.values().cwiseAbs().maxCoeff();
  const double tv = 1e-10 * sp.v.values().cwiseAbs().maxCoeff();
  for (Index j = 0; j < g.size(); ++j)
    os << j << '\t' << g.node(j) << '\t' << g.distance()[j] << '\t' << sp.u[j] << '\t' << sp.v[j] << '\t'
       << bs.u_sub[j] << '\t' << bs.u_sup[j] << '\t' << bs.v_sub[j] << '\t' << bs.v_sup[j] << '\t'
       << sgn(sp.u[j], tu) << '\t' << sgn(sp.v[j], tv) << '\n';
}

}  // namespace nodal
