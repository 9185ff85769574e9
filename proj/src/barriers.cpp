#include "nodal/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <random>

#include "nodal/errors.hpp"

namespace nodal {

void BarrierParams::validate() const {
  if (!(mu > 0.0)) throw ConfigurationError("penalty coefficient mu must be positive");
  if (!(constants.l > 0.0) || !(constants.l <= constants.L)) throw ConfigurationError("need 0 < l <= L");
  if (!(weight.kappa[0] > 0.0 && weight.kappa[0] < 1.0 && weight.kappa[1] > 0.0 && weight.kappa[1] < 1.0))
    throw ConfigurationError("singular exponents outside (-1, 0)");
}

namespace {

void check_grids(const GridFunction& a, const GridFunction& b) { require_same_grid(a, b); }

GridFunction sub_of(const BarrierParams& P, const GridFunction& zd) {
  const double shift = 0.5 * P.constants.l * P.weight.delta;
  Eigen::VectorXd v = (zd.values().array() - shift) / P.weight.lambda;
  return GridFunction(zd.grid(), std::move(v));
}

GridFunction sup_of(const BarrierParams& P, int i, const GridFunction& z, bool shifted) {
  const double lnl = std::log(P.weight.lambda);
  const double pc = P.exponents.conj(i);
  const double om = P.weight.omega(i);
  const double c = shifted ? std::exp(om * (std::log(P.constants.L) + std::log(P.weight.delta) - P.weight.theta * lnl))
                           : 0.0;
  const double scale = std::exp(pc * lnl);
  Eigen::VectorXd v(z.size());
  for (Index j = 0; j < z.size(); ++j) {
    if (z[j] < 0.0) throw PositivityError("torsion function negative at node " + std::to_string(j));
    const double zw = z[j] == 0.0 ? 0.0 : std::exp(om * std::log(z[j]));
    v[j] = scale * (zw - c);
  }
  return GridFunction(z.grid(), std::move(v));
}

// K values in [lo, hi]: endpoints, midpoint, then uniform draws
void sample_range(double lo, double hi, int K, std::mt19937_64& rng, std::vector<double>& out) {
  if (lo > hi) std::swap(lo, hi);
  out.clear();
  out.push_back(lo);
  if (K >= 2) out.push_back(hi);
  if (K >= 3) out.push_back(0.5 * (lo + hi));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 3; k < K; ++k) out.push_back(lo + (hi - lo) * U(rng));
}

std::string comp(int i) { return i == 0 ? "u" : "v"; }

// lambda h_i(d) for d > 0, d != delta
double lambda_h(const BarrierParams& P, int i, double d) {
  const double mag = std::exp(std::log(P.weight.lambda) + (P.weight.kappa[i] - 1.0) * std::log(d));
  return d < P.weight.delta ? -mag : mag;
}

bool certified_node(const Grid& g, Index j, double delta) {
  return !g.is_boundary(j) && g.distance()[j] != delta;
}

}  // namespace

std::pair<GridFunction, GridFunction> build_sub(const BarrierParams& params, const GridFunction& z1d,
                                                const GridFunction& z2d) {
  check_grids(z1d, z2d);
  return {sub_of(params, z1d), sub_of(params, z2d)};
}

std::pair<GridFunction, GridFunction> build_super(const BarrierParams& params, const GridFunction& z1,
                                                  const GridFunction& z2) {
  check_grids(z1, z2);
  return {sup_of(params, 0, z1, true), sup_of(params, 1, z2, true)};
}

BarrierSet build_nodal_barriers(const BarrierParams& params, const GridFunction& z1, const GridFunction& z2,
                                const GridFunction& z1d, const GridFunction& z2d) {
  check_grids(z1, z1d);
  BarrierSet bs;
  bs.params = params;
  bs.kind = BarrierKind::Nodal;
  std::tie(bs.u_sub, bs.v_sub) = build_sub(params, z1d, z2d);
  std::tie(bs.u_sup, bs.v_sup) = build_super(params, z1, z2);
  bs.torsion = {z1, z2};
  return bs;
}

BarrierSet build_positive_barriers(const BarrierParams& params, const GridFunction& z1, const GridFunction& z2,
                                   const GridFunction& z1d, const GridFunction& z2d) {
  check_grids(z1, z2);
  check_grids(z1, z1d);
  check_grids(z1, z2d);
  BarrierSet bs;
  bs.params = params;
  bs.kind = BarrierKind::Positive;
  const double lam = params.weight.lambda;
  bs.u_sub = GridFunction(z1d.grid(), z1d.values() / lam);
  bs.v_sub = GridFunction(z2d.grid(), z2d.values() / lam);
  bs.u_sup = sup_of(params, 0, z1, false);
  bs.v_sup = sup_of(params, 1, z2, false);
  bs.torsion = {z1, z2};
  const Grid& g = *z1.grid();
  const double c = params.constants.l / (2.0 * lam);
  MarginTracker lb("positive.lower_bound", &g);
  for (Index j = 0; j < g.size(); ++j) {
    const double m = std::min(bs.u_sub[j], bs.v_sub[j]);
    const double bound = c * g.distance()[j];
    lb.update(m - bound + cert_tol(m, bound), j);
  }
  bs.certificates.add(lb.result());
  return bs;
}

CertificationReport certify_ordering(const BarrierSet& bs) {
  const Grid& g = *bs.u_sub.grid();
  CertificationReport rep;
  for (int i = 0; i < 2; ++i) {
    MarginTracker t("ordering." + comp(i), &g);
    const auto& lo = bs.sub(i);
    const auto& hi = bs.sup(i);
    for (Index j = 0; j < g.size(); ++j) t.update(hi[j] - lo[j] + cert_tol(lo[j], hi[j]), j);
    rep.add(t.result());
  }
  for (int i = 0; i < 2; ++i) {
    MarginTracker t("ordering." + comp(i) + ".boundary_negative", &g);
    if (bs.kind == BarrierKind::Positive) {
      auto r = t.result();
      r.skipped = true;
      r.note = "positive barriers vanish on the boundary";
      rep.add(r);
      continue;
    }
    for (Index b : g.boundary_nodes()) t.update_strict(-bs.sup(i)[b], b);
    rep.add(t.result());
  }
  return rep;
}

double sub_strong_form(const BarrierParams& P, int i, double d) {
  const double p = P.exponents.p(i);
  const double lnl = std::log(P.weight.lambda);
  if (d > P.weight.delta) return std::exp((1.0 - p) * lnl);
  return -std::exp(((P.weight.theta - 1.0) * p + 1.0) * lnl + (P.weight.kappa[i] - 1.0) * std::log(d));
}

double super_strong_form(const BarrierParams& P, int i, double z, double dz) {
  const double p = P.exponents.p(i);
  const double k = P.weight.kappa[i];
  const double lnl = std::log(P.weight.lambda);
  const double core = z - k * std::pow(std::abs(dz), p);
  return std::exp(p * lnl + (p - 1.0) * std::log1p(P.weight.omega_m1[i]) + (k - 1.0) * std::log(z)) * core;
}

CertificationReport certify_sub_inequality(const BarrierSet& bs, const NonlinearitySpec& spec,
                                           const BarrierParams& P, const SamplingOptions& opt) {
  const Grid& g = *bs.u_sub.grid();
  CertificationReport rep;
  std::mt19937_64 rng(opt.seed);
  std::vector<double> samples;
  for (int i = 0; i < 2; ++i) {
    MarginTracker t("sub." + comp(i), &g);
    const int o = 1 - i;
    for (Index j = 0; j < g.size(); ++j) {
      if (!certified_node(g, j, P.weight.delta)) continue;
      const double d = g.distance()[j];
      const double x = g.node(j);
      const double lhs = sub_strong_form(P, i, d) - lambda_h(P, i, d);
      sample_range(bs.sub(o)[j], bs.sup(o)[j], opt.samples, rng, samples);
      double inf = std::numeric_limits<double>::infinity();
      for (double w : samples) {
        const double val = i == 0 ? spec.f(x, bs.u_sub[j], w) : spec.g(x, w, bs.v_sub[j]);
        inf = std::min(inf, val);
      }
      t.update(inf - lhs + cert_tol(lhs, inf), j);
    }
    rep.add(t.result());
  }
  return rep;
}

CertificationReport certify_super_inequality(const BarrierSet& bs, const NonlinearitySpec& spec,
                                             const BarrierParams& P, const SamplingOptions& opt) {
  const Grid& g = *bs.u_sub.grid();
  CertificationReport rep;
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> samples;
  const double lnl = std::log(P.weight.lambda);
  std::array<double, 2> Ci{};
  for (int i = 0; i < 2; ++i) Ci[i] = std::exp(P.weight.omega(i) * std::log(P.constants.L * P.d_star));
  for (int i = 0; i < 2; ++i) {
    if (bs.torsion[i].size() != g.size())
      throw ConfigurationError("super-solution certificate needs the torsion functions");
    const GridFunction& zf = bs.torsion[i];
    const Eigen::VectorXd dz = nodal_gradient(zf);
    MarginTracker t("super." + comp(i), &g);
    MarginTracker env("super." + comp(i) + ".envelope", &g);
    const bool envelope = spec.meets_hypotheses && spec.q(i, P.exponents) < 1.0;
    const auto& gc = spec.growth[i];
    const double C = 2.0 * gc.M * std::pow(Ci[0], gc.alpha) * std::pow(Ci[1], gc.beta);
    const double bound = C * std::exp(spec.q(i, P.exponents) * lnl);
    const int o = 1 - i;
    for (Index j = 0; j < g.size(); ++j) {
      if (!certified_node(g, j, P.weight.delta)) continue;
      const double d = g.distance()[j];
      const double x = g.node(j);
      const double lhs = super_strong_form(P, i, zf[j], dz[j]);
      sample_range(bs.sub(o)[j], bs.sup(o)[j], opt.samples, rng, samples);
      double sup = -std::numeric_limits<double>::infinity();
      for (double w : samples) {
        const double val = i == 0 ? spec.f(x, bs.u_sup[j], w) : spec.g(x, w, bs.v_sup[j]);
        sup = std::max(sup, val);
        if (envelope) env.update(bound - val + cert_tol(bound, val), j);
      }
      const double rhs = sup + lambda_h(P, i, d);
      t.update(lhs - rhs + cert_tol(lhs, rhs), j);
    }
    rep.add(t.result());
    auto er = env.result();
    if (!envelope) {
      er.skipped = true;
      er.note = "growth hypothesis not met (q >= 1 or flagged spec)";
    } else {
      er.note = "C=" + std::to_string(C) + " C1=" + std::to_string(Ci[0]) + " C2=" + std::to_string(Ci[1]);
    }
    rep.add(er);
  }
  return rep;
}

double box_bound(const BarrierSet& bs, const NonlinearitySpec& spec, int n_samples) {
  const Grid& g = *bs.u_sub.grid();
  const double s0 = bs.u_sub.values().minCoeff(), s1 = bs.u_sup.values().maxCoeff();
  const double t0 = bs.v_sub.values().minCoeff(), t1 = bs.v_sup.values().maxCoeff();
  double M = 0.0;
  const Index m = std::min<Index>(n_samples, g.size());
  for (Index k = 0; k < m; ++k) {
    const double x = g.node(k * (g.size() - 1) / std::max<Index>(m - 1, 1));
    for (int a = 0; a < n_samples; ++a)
      for (int b = 0; b < n_samples; ++b) {
        const double s = s0 + (s1 - s0) * a / (n_samples - 1);
        const double t = t0 + (t1 - t0) * b / (n_samples - 1);
        M = std::max({M, std::abs(spec.f(x, s, t)), std::abs(spec.g(x, s, t))});
      }
  }
  return M;
}

double first_theta(const Exponents& exps) {
  return std::ceil(1.0 + std::max(exps.conj(0), exps.conj(1))) + 1.0;
}

namespace {

void relabel(CertificationReport& rep, const std::string& suffix) {
  for (auto& c : rep.checks) c.id += suffix;
}

std::string first_failure(const CertificationReport& rep) {
  for (const auto& c : rep.checks)
    if (!c.skipped && !c.pass) return c.id;
  return "";
}

}  // namespace

Selection evaluate_candidate(const NonlinearitySpec& spec, const Exponents& exps, const std::array<GridFunction, 2>& z,
                             double lambda, double theta, const SolverConfig& cfg, BarrierKind kind,
                             const SamplingOptions& opt, LadderRow& row, double fixed_delta) {
  Selection sel;
  sel.z = z;
  row.lambda = lambda;
  row.theta = theta;
  const GridPtr& grid = z[0].grid();
  MarginTracker tc("theta_condition");
  tc.update_strict(theta - 1.0 - std::max(exps.conj(0), exps.conj(1)));
  sel.report.add(tc.result());
  if (!tc.result().pass) {
    row.reason = "theta_condition";
    return sel;
  }
  for (int i = 0; i < 2; ++i) {
    const double k = singular_margin(exps.p(i), lambda, theta);
    if (!(k > 0.0 && k < 1.0) || !(k >= 1e-300)) {
      MarginTracker r("gamma_range");
      r.update(-1.0);
      sel.report.add(r.result());
      row.reason = "gamma_range";
      return sel;
    }
  }
  for (int i = 0; i < 2; ++i) sel.component_constants[i] = extract_constants(z[i], exps.p(i));
  TorsionConstants c;
  c.l = std::min(sel.component_constants[0].l, sel.component_constants[1].l);
  c.L = std::max(sel.component_constants[0].L, sel.component_constants[1].L);
  c.L_hat = std::max(sel.component_constants[0].L_hat, sel.component_constants[1].L_hat);

  double delta = fixed_delta;
  if (delta <= 0.0) {
    for (int i = 0; i < 2; ++i) sel.delta0[i] = find_delta0(exps.p(i), lambda, theta, z[i], cfg).delta0;
    row.delta0 = std::min(sel.delta0[0], sel.delta0[1]);
    const double rho = std::min(spec.rho[0], spec.rho[1]);
    delta = std::min(0.5 * row.delta0, lambda * rho / c.l);
  }
  row.delta = delta;
  MarginTracker dc("delta_constraint");
  const double rho = std::min(spec.rho[0], spec.rho[1]);
  dc.update_strict(rho - c.l * delta / (2.0 * lambda));
  sel.report.add(dc.result());
  if (!dc.result().pass) {
    row.reason = "delta_constraint";
    return sel;
  }

  BarrierParams P;
  P.exponents = exps;
  P.weight = SingularWeightParams::make(exps, lambda, theta, delta);
  P.constants = c;
  P.d_star = grid->domain().max_distance();
  for (int i = 0; i < 2; ++i) {
    sel.z_delta[i] = perturbed_torsion(exps.p(i), lambda, theta, delta, grid, cfg, &z[i]);
    auto l3 = check_strip_pair(make_torsion_pair(z[i], sel.z_delta[i], exps.p(i), lambda, theta, delta));
    relabel(l3, "." + comp(i));
    sel.report.merge(l3);
  }
  sel.barriers = kind == BarrierKind::Nodal
                     ? build_nodal_barriers(P, z[0], z[1], sel.z_delta[0], sel.z_delta[1])
                     : build_positive_barriers(P, z[0], z[1], sel.z_delta[0], sel.z_delta[1]);
  P.mu = 1.0 + box_bound(sel.barriers, spec);
  sel.barriers.params = P;
  sel.params = P;
  sel.report.merge(sel.barriers.certificates);
  sel.report.merge(certify_ordering(sel.barriers));
  sel.report.merge(certify_sub_inequality(sel.barriers, spec, P, opt));
  sel.report.merge(certify_super_inequality(sel.barriers, spec, P, opt));
  row.reason = first_failure(sel.report);
  row.pass = row.reason.empty();
  return sel;
}

Selection select_parameters(const NonlinearitySpec& spec, const Exponents& exps, const GridPtr& grid,
                            const Caps& caps, const SolverConfig& cfg, BarrierKind kind, const SamplingOptions& opt) {
  std::array<GridFunction, 2> z{torsion(exps.p1, grid, cfg), torsion(exps.p2, grid, cfg)};
  const double theta0 = first_theta(exps);
  std::vector<LadderRow> ladder;
  std::string last_failure = "no candidate evaluated";
  for (double lambda = 2.0; lambda <= caps.lambda_max; lambda *= 2.0) {
    std::vector<double> thetas;
    for (double th = theta0; th <= caps.theta_max; th *= 2.0) thetas.push_back(th);
    std::vector<std::future<std::pair<Selection, LadderRow>>> jobs;
    for (double th : thetas)
      jobs.push_back(std::async(std::launch::async, [&, th, lambda] {
        LadderRow row;
        try {
          Selection s = evaluate_candidate(spec, exps, z, lambda, th, cfg, kind, opt, row);
          return std::make_pair(std::move(s), row);
        } catch (const Error& e) {
          row.lambda = lambda;
          row.theta = th;
          row.pass = false;
          row.reason = std::string("error: ") + e.what();
          return std::make_pair(Selection{}, row);
        }
      }));
    std::vector<std::pair<Selection, LadderRow>> results;
    for (auto& j : jobs) results.push_back(j.get());
    for (auto& [sel, row] : results) {
      ladder.push_back(row);
      if (!row.pass) last_failure = row.reason;
    }
    for (auto& [sel, row] : results)
      if (row.pass) {
        sel.ladder = ladder;
        return std::move(sel);
      }
  }
  throw SelectionError("parameter ladder exhausted without a certified candidate", last_failure);
}

void write_tsv(std::ostream& os, const BarrierSet& bs) {
  const Grid& g = *bs.u_sub.grid();
  const GridFunction h1 = weight_h(bs.params.weight, 0, bs.u_sub.grid());
  const GridFunction h2 = weight_h(bs.params.weight, 1, bs.u_sub.grid());
  os << "node\tx\td\tu_sub\tu_sup\tv_sub\tv_sup\th1\th2\n";
  for (Index j = 0; j < g.size(); ++j)
    os << j << '\t' << g.node(j) << '\t' << g.distance()[j] << '\t' << bs.u_sub[j] << '\t' << bs.u_sup[j] << '\t'
       << bs.v_sub[j] << '\t' << bs.v_sup[j] << '\t' << h1[j] << '\t' << h2[j] << '\n';
}

}  // namespace nodal
