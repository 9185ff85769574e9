#include "nodal/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "nodal/errors.hpp"

namespace nodal {

namespace {

const char* comp(int i) { return i == 0 ? "u" : "v"; }

void relabel(CertificationReport& rep, const std::string& suffix) {
  for (auto& c : rep.checks) c.id += suffix;
}

std::string fmt(double x) {
  return format_number(x);
}

Verdict verdict_of(const std::exception& e) {
  if (dynamic_cast<const ConfigurationError*>(&e)) return Verdict::ConfigurationFailure;
  return Verdict::SolverFailure;
}

std::string describe(const std::exception& e) {
  std::string m = e.what();
  if (auto* s = dynamic_cast<const SelectionError*>(&e)) m += " (last failure: " + s->last_failure + ")";
  if (auto* c = dynamic_cast<const ConvergenceError*>(&e)) m += " (residual " + fmt(c->residual) + ")";
  return m;
}

class Runner {
 public:
  explicit Runner(RunReport& rep) : rep_(rep) {}

  // Runs fn as stage `name`. Returns false after a hard error.
  template <class Fn>
  bool stage(const std::string& name, bool mandatory, Fn&& fn) {
    StageRecord rec;
    rec.name = name;
    rec.mandatory = mandatory;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    try {
      rec.report = fn();
    } catch (const Error& e) {
      rec.error = describe(e);
      rep_.verdict = verdict_of(e);
      rep_.message = name + ": " + rec.error;
      ok = false;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep_.stages.push_back(std::move(rec));
    return ok;
  }

  void value(const std::string& key, double v, const std::string& def) { rep_.values.push_back({key, v, def}); }
  void table(const std::string& file, const std::string& desc, std::string content) {
    rep_.tables.push_back({file, desc, std::move(content)});
  }

 private:
  RunReport& rep_;
};

std::string torsion_table(const std::array<GridFunction, 2>& z) {
  const Grid& g = *z[0].grid();
  std::ostringstream os;
  os << std::setprecision(17) << "node\tx\td\tz1\tz2\tz1_over_d\tz2_over_d\n";
  for (Index j = 0; j < g.size(); ++j) {
    const double d = g.distance()[j];
    os << j << '\t' << g.node(j) << '\t' << d << '\t' << z[0][j] << '\t' << z[1][j] << '\t'
       << (d > 0 ? z[0][j] / d : NAN) << '\t' << (d > 0 ? z[1][j] / d : NAN) << '\n';
  }
  return os.str();
}

std::string ladder_table(const std::vector<LadderRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17) << "lambda\ttheta\tdelta0\tdelta\tpass\treason\n";
  for (const auto& r : rows)
    os << r.lambda << '\t' << r.theta << '\t' << r.delta0 << '\t' << r.delta << '\t' << (r.pass ? 1 : 0) << '\t'
       << (r.reason.empty() ? "-" : r.reason) << '\n';
  return os.str();
}

template <class F>
std::string stream_table(F&& writer) {
  std::ostringstream os;
  os << std::setprecision(17);
  writer(os);
  return os.str();
}

// Interval grid with the manufactured spec and lambda = 0 in a wide box.
double manufactured_error(Index n, const SolverConfig& cfg) {
  const GridPtr g = build_grid(DomainDesc::interval(0.0, 1.0), n, 1.0);
  const NonlinearitySpec spec = make_nonlinearity("manufactured");
  BarrierParams P;
  P.exponents = Exponents::make(2.0, 2.0, 1);
  P.mu = 1.0;
  P.constants = {1.0, 1.0, 1.0};
  BarrierSet bs;
  bs.params = P;
  bs.u_sub = bs.v_sub = GridFunction::constant(g, -10.0);
  bs.u_sup = bs.v_sup = GridFunction::constant(g, 10.0);
  const SolutionPair sp = solve_penalized_system(bs, spec, P, cfg);
  double e = 0.0;
  for (Index j = 0; j < g->size(); ++j) e = std::max(e, std::abs(sp.u[j] - std::cos(std::numbers::pi * g->node(j))));
  return e;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::CertificationFailure: return "certification_failure";
    case Verdict::SolverFailure: return "solver_failure";
    case Verdict::ConfigurationFailure: return "configuration_error";
  }
  return "?";
}

int RunReport::exit_code() const {
  switch (verdict) {
    case Verdict::Pass: return 0;
    case Verdict::CertificationFailure: return 2;
    case Verdict::SolverFailure: return 3;
    case Verdict::ConfigurationFailure: return 4;
  }
  return 1;
}

const DerivedValue* RunReport::value(const std::string& key) const {
  for (const auto& v : values)
    if (v.key == key) return &v;
  return nullptr;
}

const CheckResult* RunReport::check(const std::string& id) const {
  for (const auto& s : stages)
    if (auto* c = s.report.find(id)) return c;
  return nullptr;
}

CertificationReport verify_suite(const RunConfig& config) {
  CertificationReport rep;
  const SolverConfig& cfg = config.solver;

  {
    const GridPtr g = build_grid(DomainDesc::interval(0.0, 1.0), 512);
    const GridFunction one = GridFunction::constant(g, 1.0);
    MarginTracker t("verify.quadrature", g.get());
    for (double beta : {-0.9, -0.5, -0.1}) {
      Region r = Region::coordinates(-INFINITY, 0.5);
      r.hi = 0.1;
      const double exact = std::pow(0.1, beta + 1.0) / (beta + 1.0);
      t.update(1e-6 - std::abs(integrate_weighted(one, beta, r) - exact) / exact);
    }
    rep.add(t.result());
  }
  {
    const GridPtr g = build_grid(DomainDesc::interval(0.0, 1.0), 512);
    const GridFunction z = torsion(2.0, g, cfg);
    MarginTracker t("verify.torsion_oracle", g.get());
    for (Index j = 0; j < g->size(); ++j) {
      const double x = g->node(j);
      t.update(1e-9 - std::abs(z[j] - 0.5 * x * (1.0 - x)), j);
    }
    rep.add(t.result());
  }

  const GridPtr grid = build_grid(config.domain, config.nodes, config.grading);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_function = [&] {
    Eigen::VectorXd v(grid->size());
    for (Index j = 0; j < v.size(); ++j) v[j] = unif(rng);
    return GridFunction(grid, std::move(v));
  };
  for (double p : {1.5, 2.0, 3.0}) {
    const std::string tag = ".p" + fmt(p);
    MarginTracker kernel("verify.constant_kernel" + tag, grid.get());
    MarginTracker homog("verify.homogeneity" + tag, grid.get());
    MarginTracker mono("verify.monotonicity" + tag, grid.get());
    for (int k = 0; k < 100; ++k) {
      const GridFunction a = random_function(), b = random_function();
      const double c = 10.0 * unif(rng);
      kernel.update(-weak_plap(GridFunction::constant(grid, c), p).cwiseAbs().maxCoeff());
      const double t = (unif(rng) < 0 ? -1.0 : 1.0) * std::exp(std::log(4.0) * unif(rng));
      const Eigen::VectorXd lhs = weak_plap(GridFunction(grid, t * a.values()), p);
      const Eigen::VectorXd rhs = std::pow(std::abs(t), p - 2.0) * t * weak_plap(a, p);
      const double scale = std::max(lhs.cwiseAbs().maxCoeff(), 1e-300);
      homog.update(1e-10 - (lhs - rhs).cwiseAbs().maxCoeff() / scale);
      const double dot = (weak_plap(a, p) - weak_plap(b, p)).dot(a.values() - b.values());
      mono.update(dot + 1e-12);
    }
    rep.add(kernel.result());
    rep.add(homog.result());
    rep.add(mono.result());
  }

  const Exponents e = config.exponents();
  for (int i = 0; i < 2; ++i) {
    const GridFunction z = torsion(e.p(i), grid, cfg);
    auto c = check_constants(z, extract_constants(z, e.p(i)), e.p(i));
    relabel(c, std::string(".") + comp(i));
    for (auto& r : c.checks) r.id = "verify." + r.id;
    rep.merge(c);
  }

  const NonlinearitySpec spec = make_nonlinearity(config.nonlinearity, config.overrides);
  if (spec.meets_hypotheses) {
    rep.merge(validate_growth(spec, e, SampleBox{}, *grid));
    rep.merge(validate_sign(spec, default_eta_probe(), SignCaps{}, *grid));
  }

  MarginTracker m("verify.manufactured");
  const double err = manufactured_error(512, cfg);
  m.update(1e-3 - err);
  auto mr = m.result();
  mr.note = "max error " + fmt(err);
  rep.add(mr);
  return rep;
}

std::vector<SweepRow> sweep(const RunConfig& config) {
  config.validate();
  std::vector<std::pair<double, double>> ps = config.sweep.p;
  if (ps.empty()) ps.emplace_back(config.p1, config.p2);
  std::vector<double> deltas = config.sweep.delta;
  if (deltas.empty()) deltas.push_back(0.0);

  const GridPtr grid = build_grid(config.domain, config.nodes, config.grading);
  const NonlinearitySpec spec = make_nonlinearity(config.nonlinearity, config.overrides);
  const SamplingOptions opt = config.sampling();

  std::vector<SweepRow> rows;
  std::vector<std::size_t> which_p;
  for (std::size_t k = 0; k < ps.size(); ++k)
    for (double lambda : config.sweep.lambda)
      for (double theta : config.sweep.theta)
        for (double delta : deltas) {
          SweepRow r;
          r.p1 = ps[k].first;
          r.p2 = ps[k].second;
          r.row.lambda = lambda;
          r.row.theta = theta;
          r.row.delta = delta;
          rows.push_back(r);
          which_p.push_back(k);
        }
  if (rows.empty()) return rows;

  std::vector<std::array<GridFunction, 2>> z(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k)
    z[k] = {torsion(ps[k].first, grid, config.solver), torsion(ps[k].second, grid, config.solver)};

  auto eval = [&](std::size_t r) {
    SweepRow& out = rows[r];
    const double fixed = out.row.delta;
    try {
      const Exponents e = Exponents::make(out.p1, out.p2, config.domain.dimension());
      Selection s = evaluate_candidate(spec, e, z[which_p[r]], out.row.lambda, out.row.theta, config.solver,
                                       BarrierKind::Nodal, opt, out.row, fixed);
      out.report = std::move(s.report);
    } catch (const Error& e) {
      out.row.pass = false;
      out.row.reason = std::string("error: ") + e.what();
    }
  };
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < rows.size(); start += width) {
    std::vector<std::future<void>> jobs;
    for (std::size_t r = start; r < std::min(rows.size(), start + width); ++r)
      jobs.push_back(std::async(std::launch::async, eval, r));
    for (auto& j : jobs) j.get();
  }
  return rows;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& r : rows)
    for (const auto& c : r.report.checks)
      if (seen.insert(c.id).second) ids.push_back(c.id);
  std::ostringstream os;
  os << std::setprecision(17) << "p1\tp2\tlambda\ttheta\tdelta0\tdelta\tpass\treason";
  for (const auto& id : ids) os << '\t' << id;
  os << '\n';
  for (const auto& r : rows) {
    os << r.p1 << '\t' << r.p2 << '\t' << r.row.lambda << '\t' << r.row.theta << '\t' << r.row.delta0 << '\t'
       << r.row.delta << '\t' << (r.row.pass ? 1 : 0) << '\t' << (r.row.reason.empty() ? "-" : r.row.reason);
    for (const auto& id : ids) {
      const CheckResult* c = r.report.find(id);
      os << '\t' << (c == nullptr ? "-" : c->skipped ? "skip" : c->pass ? "pass" : "fail");
    }
    os << '\n';
  }
  return os.str();
}

RunReport run(const RunConfig& config) {
  RunReport rep;
  rep.config = config;
  try {
    config.validate();
  } catch (const Error& e) {
    rep.verdict = Verdict::ConfigurationFailure;
    rep.message = e.what();
    return rep;
  }
  Runner R(rep);
  const SolverConfig& cfg = config.solver;
  const Mode mode = config.mode;

  if (mode == Mode::VerifyAll) {
    R.stage("verify", true, [&] { return verify_suite(config); });
  } else if (mode == Mode::Sweep) {
    R.stage("sweep", true, [&] {
      const auto rows = sweep(config);
      double passing = 0;
      for (const auto& r : rows) passing += r.row.pass ? 1 : 0;
      R.value("sweep.rows", static_cast<double>(rows.size()), "number of (p, lambda, theta, delta) combinations");
      R.value("sweep.passing_rows", passing, "rows whose every barrier certificate passed");
      R.table("sweep.tsv", "feasibility per (p, lambda, theta, delta) with per-check status", sweep_table(rows));
      return CertificationReport{};
    });
  } else {
    GridPtr grid;
    NonlinearitySpec spec;
    Exponents exps;
    std::array<GridFunction, 2> z;
    Selection sel;
    SolutionPair sp;
    bool ok = R.stage("setup", true, [&] {
      grid = build_grid(config.domain, config.nodes, config.grading);
      spec = make_nonlinearity(config.nonlinearity, config.overrides);
      exps = config.exponents();
      R.value("grid.max_distance", config.domain.max_distance(), "max over the domain of the distance to the boundary");
      return CertificationReport{};
    });
    const bool full = mode != Mode::TorsionOnly;
    if (ok && full)
      ok = R.stage("hypotheses", spec.meets_hypotheses, [&] {
        CertificationReport h = validate_growth(spec, exps, SampleBox{}, *grid);
        h.merge(validate_sign(spec, default_eta_probe(), SignCaps{}, *grid));
        for (int i = 0; i < 2; ++i)
          R.value(std::string("q.") + comp(i), spec.q(i, exps), "growth order alpha_i p1' + beta_i p2'");
        return h;
      });
    if (ok)
      ok = R.stage("torsion", true, [&] {
        CertificationReport out;
        for (int i = 0; i < 2; ++i) {
          z[i] = (i == 1 && exps.p2 == exps.p1) ? z[0] : torsion(exps.p(i), grid, cfg);
          const TorsionConstants c = extract_constants(z[i], exps.p(i));
          auto chk = check_constants(z[i], c, exps.p(i));
          relabel(chk, std::string(".") + comp(i));
          out.merge(chk);
          const std::string s = comp(i);
          R.value("torsion.max." + s, z[i].values().maxCoeff(), "max of z_i, -Delta_{p_i} z_i = 1, z_i = 0 on the boundary");
          R.value("l." + s, c.l, "min over nodes of z_i / d (boundary: -dz_i/deta)");
          R.value("L." + s, c.L, "max(L_hat_i, max z_i / d)");
          R.value("L_hat." + s, c.L_hat, "max |z_i'|");
          R.value("holder.ratio." + s, holder_quotient(z[i], config.tau).ratio,
                  "sampled Holder seminorm of z_i / d over the C^{1,tau} norm of z_i");
        }
        R.table("torsion.tsv", "torsion functions and their ratio to d", torsion_table(z));
        return out;
      });
    const BarrierKind kind = mode == Mode::Positive ? BarrierKind::Positive : BarrierKind::Nodal;
    if (ok && full)
      ok = R.stage("selection", true, [&] {
        sel = select_parameters(spec, exps, grid, config.caps, cfg, kind, config.sampling());
        const BarrierParams& P = sel.params;
        R.value("lambda", P.weight.lambda, "selected lambda on the doubling ladder");
        R.value("theta", P.weight.theta, "selected theta on the doubling ladder");
        R.value("delta", P.weight.delta, "min(delta0 / 2, lambda rho / l)");
        for (int i = 0; i < 2; ++i) {
          const std::string s = comp(i);
          R.value("delta0." + s, sel.delta0[i], "largest certified strip width for the perturbed torsion of component i");
          R.value("gamma." + s, P.weight.gamma(i), "lambda^{-theta p_i}(p_i - 1) - 1");
          R.value("gamma_plus_one." + s, P.weight.kappa[i], "lambda^{-theta p_i}(p_i - 1)");
          R.value("omega." + s, P.weight.omega(i), "1 + lambda^{-theta p_i}");
          R.value("omega_minus_one." + s, P.weight.omega_m1[i], "lambda^{-theta p_i}");
          R.value("C." + s, spec.growth[i].M, "growth constant M_i in |f_i| <= M_i (1+|s|^alpha_i)(1+|t|^beta_i)");
        }
        R.value("l", P.constants.l, "min of l_1, l_2");
        R.value("L", P.constants.L, "max of L_1, L_2");
        R.value("L_hat", P.constants.L_hat, "max of L_hat_1, L_hat_2");
        R.value("C", P.mu - 1.0, "sampled sup of |f|, |g| over the barrier box");
        R.value("mu", P.mu, "penalty coefficient 1 + C");
        R.table("ladder.tsv", "every evaluated (lambda, theta) candidate", ladder_table(sel.ladder));
        R.table("barriers.tsv", "sub- and super-solutions and the singular weights",
                stream_table([&](std::ostream& os) { write_tsv(os, sel.barriers); }));
        for (int i = 0; i < 2; ++i)
          R.table(std::string("torsion_pair_") + comp(i) + ".tsv", "torsion and perturbed torsion of one component",
                  stream_table([&](std::ostream& os) {
                    write_tsv(os, make_torsion_pair(sel.z[i], sel.z_delta[i], exps.p(i), P.weight.lambda,
                                                    P.weight.theta, P.weight.delta));
                  }));
        return sel.report;
      });
    if (ok && (mode == Mode::Nodal || mode == Mode::Positive))
      ok = R.stage("system", true, [&] {
        sp = solve_penalized_system(sel.barriers, spec, sel.params, cfg, config.system);
        CertificationReport out = certify_solution(sp, sel.barriers);
        out.merge(check_compatibility(sel.barriers, spec, sel.params));
        R.value("system.iterations", sp.iterations, "block Gauss-Seidel outer iterations");
        R.value("system.outer_tol", sp.outer_tol, "outer tolerance on the max-norm change");
        R.value("system.box_scale", sp.box_scale, "max |barrier| over nodes");
        R.value("system.residual.u", sp.residual_u, "max nodal weak residual of the u equation");
        R.value("system.residual.v", sp.residual_v, "max nodal weak residual of the v equation");
        R.value("system.penalty.u", sp.penalty_active[0], "max |chi_1| at the solution");
        R.value("system.penalty.v", sp.penalty_active[1], "max |chi_2| at the solution");
        R.value("c_emp", empirical_c(sp.u, sp.v), "min over interior nodes of min(u, v) / d");
        R.table("solution.tsv", "solution pair, barrier box and signs",
                stream_table([&](std::ostream& os) { write_tsv(os, sp, sel.barriers); }));
        return out;
      });
    if (ok && (mode == Mode::Nodal || mode == Mode::Positive))
      R.stage("classification", true, [&] { return classify_solution(sp, sel.barriers, sel.params); });
  }

  if (rep.verdict == Verdict::Pass)
    for (const auto& s : rep.stages)
      if (s.mandatory && !s.report.passed()) {
        rep.verdict = Verdict::CertificationFailure;
        for (const auto& c : s.report.checks)
          if (!c.skipped && !c.pass) {
            rep.message = s.name + ": " + c.id + " failed";
            break;
          }
        break;
      }
  return rep;
}

void RunReport::write_dat(std::ostream& os) const {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "[run]\nmode = " << mode_name(config.mode) << "\nseed = " << config.seed << "\nverdict = "
    << verdict_name(verdict) << "\nexit_code = " << exit_code() << "\nmessage = " << message << "\n\n[config]\n";
  config.write(s);
  s << "\n[values]\n";
  for (const auto& v : values) s << v.key << " = " << format_number(v.value) << '\n';
  s << "\n[definitions]\n";
  for (const auto& v : values) s << v.key << " = " << v.definition << '\n';
  for (const auto& st : stages) {
    s << "\n[stage." << st.name << "]\nmandatory = " << (st.mandatory ? 1 : 0) << "\npassed = "
      << (st.error.empty() && st.report.passed() ? 1 : 0) << '\n';
    if (!st.error.empty()) s << "error = " << st.error << '\n';
    st.report.write(s);
  }
  s << "\n[tables]\n";
  for (const auto& t : tables) s << t.file << " = " << t.description << '\n';
  os << s.str();
}

void RunReport::write_text(std::ostream& os) const {
  std::ostringstream s;
  s << std::setprecision(6);
  s << "mode: " << mode_name(config.mode) << "   seed: " << config.seed << '\n';
  s << "verdict: " << verdict_name(verdict) << " (exit " << exit_code() << ")\n";
  if (!message.empty()) s << "  " << message << '\n';
  for (const auto& st : stages) {
    const bool pass = st.error.empty() && st.report.passed();
    s << '\n' << st.name << (st.mandatory ? "" : " (advisory)") << ": " << (pass ? "pass" : "FAIL") << "  ["
      << std::fixed << std::setprecision(3) << st.seconds << " s]" << std::defaultfloat << std::setprecision(6)
      << '\n';
    if (!st.error.empty()) s << "  error: " << st.error << '\n';
    for (const auto& c : st.report.checks) {
      s << "  " << (c.skipped ? "skip" : c.pass ? "ok  " : "FAIL") << "  " << c.id;
      if (!c.skipped) s << "  worst margin " << c.worst_margin;
      if (c.node >= 0) s << " at node " << c.node << " (x = " << c.location << ")";
      if (!c.note.empty()) s << "  [" << c.note << "]";
      s << '\n';
    }
  }
  if (!values.empty()) {
    s << "\nvalues:\n";
    for (const auto& v : values) s << "  " << v.key << " = " << v.value << '\n';
  }
  os << s.str();
}

void write_outputs(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw ConfigurationError("cannot create output directory '" + dir + "': " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream f(root / name);
    if (!f) throw ConfigurationError("cannot write '" + (root / name).string() + "'");
    return f;
  };
  {
    auto f = open("report.txt");
    report.write_text(f);
  }
  {
    auto f = open("report.dat");
    report.write_dat(f);
  }
  auto m = open("manifest.tsv");
  m << "file\tdescription\n";
  m << "report.txt\thuman-readable summary with stage timing\n";
  m << "report.dat\tmachine-readable key = value blocks\n";
  for (const auto& t : report.tables) {
    auto f = open(t.file);
    f << t.content;
    m << t.file << '\t' << t.description << '\n';
  }
}

}  // namespace nodal
