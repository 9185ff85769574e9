#include "nodal/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nodal/errors.hpp"

namespace nodal {

Exponents Exponents::make(double p1, double p2, int N) {
  if (!(p1 > 1.0) || !(p2 > 1.0) || !std::isfinite(p1) || !std::isfinite(p2))
    throw ConfigurationError("exponents must exceed 1");
  if (N < 1) throw ConfigurationError("dimension must be positive");
  return Exponents{p1, p2, N};
}

double Exponents::conj(int i) const {
  const double q = p(i);
  return q / (q - 1.0);
}

bool Exponents::within_standing_hypothesis() const { return p1 < N && p2 < N; }

double singular_margin(double p, double lambda, double theta) {
  return std::exp(-theta * p * std::log(lambda) + std::log(p - 1.0));
}

SingularWeightParams SingularWeightParams::make(const Exponents& e, double lambda, double theta, double delta) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigurationError("lambda must be positive");
  if (!std::isfinite(theta)) throw ConfigurationError("theta must be finite");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigurationError("delta must be positive");
  SingularWeightParams w;
  w.lambda = lambda;
  w.theta = theta;
  w.delta = delta;
  for (int i = 0; i < 2; ++i) {
    w.p[i] = e.p(i);
    w.omega_m1[i] = std::exp(-theta * e.p(i) * std::log(lambda));
    w.kappa[i] = singular_margin(e.p(i), lambda, theta);
    if (!(w.kappa[i] < 1.0))
      throw ConfigurationError("singular exponent gamma_" + std::to_string(i + 1) + " is not negative");
    if (!(w.kappa[i] >= 1e-300))
      throw ConfigurationError("singular exponent gamma_" + std::to_string(i + 1) +
                               " is not representable above -1 in double precision");
  }
  return w;
}

double SingularWeightParams::log_lambda() const { return std::log(lambda); }

bool SingularWeightParams::theta_condition(const Exponents& e) const {
  return theta > 1.0 + e.conj(0) && theta > 1.0 + e.conj(1);
}

double NonlinearitySpec::q(int i, const Exponents& e) const {
  return growth[i].alpha * e.conj(0) + growth[i].beta * e.conj(1);
}

GridFunction weight_h(const SingularWeightParams& params, int i, const GridPtr& grid) {
  const WeightExponent ex = params.exponent(i);
  Eigen::VectorXd h(grid->size());
  const auto& d = grid->distance();
  for (Index j = 0; j < h.size(); ++j) {
    if (d[j] == params.delta)
      h[j] = 0.0;
    else if (d[j] == 0.0)
      h[j] = -std::numeric_limits<double>::infinity();
    else
      h[j] = (d[j] < params.delta ? -1.0 : 1.0) * ex.pow(d[j]);
  }
  return GridFunction(grid, std::move(h));
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
  return v;
}

std::vector<Index> sample_nodes(const Grid& g, int n) {
  std::vector<Index> out;
  const Index m = std::min<Index>(n, g.size());
  for (Index k = 0; k < m; ++k) out.push_back(m == 1 ? 0 : k * (g.size() - 1) / (m - 1));
  return out;
}

}  // namespace

CertificationReport validate_growth(const NonlinearitySpec& spec, const Exponents& e, const SampleBox& box,
                                const Grid& grid, int n_samples) {
  CertificationReport rep;
  for (int i = 0; i < 2; ++i) {
    MarginTracker q("growth.q" + std::to_string(i + 1));
    q.update(1.0 - spec.q(i, e));
    rep.add(q.result());
  }
  const auto ss = linspace(box.s_lo, box.s_hi, n_samples);
  const auto ts = linspace(box.t_lo, box.t_hi, n_samples);
  for (int i = 0; i < 2; ++i) {
    MarginTracker env(std::string("growth.envelope.") + (i == 0 ? "f" : "g"), &grid);
    const auto& gc = spec.growth[i];
    for (Index j : sample_nodes(grid, n_samples)) {
      const double x = grid.node(j);
      for (double s : ss)
        for (double t : ts) {
          const double bound =
              gc.M * (1.0 + std::pow(std::abs(s), gc.alpha)) * (1.0 + std::pow(std::abs(t), gc.beta));
          env.update(1.0 - std::abs(spec.eval(i, x, s, t)) / bound, j);
        }
    }
    rep.add(env.result());
  }
  return rep;
}

std::vector<double> default_eta_probe() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

CertificationReport validate_sign(const NonlinearitySpec& spec, const std::vector<double>& eta_probe,
                                const SignCaps& caps, const Grid& grid, int n_samples) {
  CertificationReport rep;
  for (int i = 0; i < 2; ++i) {
    MarginTracker tr(std::string("sign.") + (i == 0 ? "f" : "g"), &grid);
    if (!(spec.m[i] > 0.0) || !(spec.rho[i] > 0.0)) {
      tr.update(-1.0);
      tr.fail_note("m and rho must be positive");
      rep.add(tr.result());
      continue;
    }
    // only the tail of the probe sequence decides ("sufficiently small")
    const std::size_t first = eta_probe.size() / 2;
    std::ostringstream infs;
    const double cap = i == 0 ? caps.t_cap : caps.s_cap;
    const auto other = linspace(-spec.rho[i], std::max(cap, -spec.rho[i]), n_samples);
    for (std::size_t k = 0; k < eta_probe.size(); ++k) {
      const double eta = eta_probe[k];
      const auto small = linspace(-eta, eta, n_samples);
      double inf = std::numeric_limits<double>::infinity();
      Index where = -1;
      for (Index j : sample_nodes(grid, n_samples)) {
        const double x = grid.node(j);
        for (double a : small)
          for (double b : other) {
            const double val = i == 0 ? spec.f(x, a, b) : spec.g(x, b, a);
            if (val < inf) {
              inf = val;
              where = j;
            }
          }
      }
      infs << (k ? "," : "") << inf;
      if (k >= first) tr.update(inf + spec.m[i], where);
    }
    tr.fail_note("infima " + infs.str());
    rep.add(tr.result());
  }
  return rep;
}

NonlinearitySpec make_nonlinearity(const std::string& name, const std::map<std::string, double>& ov) {
  NonlinearitySpec s;
  s.label = name;
  if (name == "zero") {
    s.f = [](double, double, double) { return 0.0; };
    s.g = s.f;
  } else if (name == "trig") {
    s.f = [](double, double a, double b) { return std::sin(a) * std::cos(b); };
    s.g = [](double, double a, double b) { return std::cos(a) * std::sin(b); };
  } else if (name == "power") {
    s.growth = {GrowthConstants{0.1, 0.1, 1.0}, GrowthConstants{0.1, 0.1, 1.0}};
  } else if (name == "manufactured") {
    const double c = M_PI * M_PI + 1.0;
    s.f = [c](double x, double a, double) { return c * std::cos(M_PI * x) - a; };
    s.g = [c](double x, double, double b) { return c * std::cos(M_PI * x) - b; };
    // linear in the own variable: declared as such, violating q < 1
    s.growth = {GrowthConstants{1.0, 0.0, c}, GrowthConstants{0.0, 1.0, c}};
    s.meets_hypotheses = false;
  } else {
    throw ConfigurationError("unknown nonlinearity '" + name + "'");
  }
  static const std::vector<std::string> keys = {"M1", "M2", "alpha1", "beta1", "alpha2",
                                                "beta2", "m1", "m2", "rho1", "rho2"};
  for (const auto& [k, v] : ov) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ConfigurationError("unknown nonlinearity constant '" + k + "'");
    if (!std::isfinite(v)) throw ConfigurationError("nonlinearity constant '" + k + "' is not finite");
    const int i = k.back() == '1' ? 0 : 1;
    const std::string base = k.substr(0, k.size() - 1);
    if (base == "M") s.growth[i].M = v;
    if (base == "alpha") s.growth[i].alpha = v;
    if (base == "beta") s.growth[i].beta = v;
    if (base == "m") s.m[i] = v;
    if (base == "rho") s.rho[i] = v;
  }
  if (name == "power") {
    const auto g = s.growth;
    s.f = [g](double, double a, double b) {
      return g[0].M * std::pow(std::abs(a), g[0].alpha) * std::pow(std::abs(b), g[0].beta);
    };
    s.g = [g](double, double a, double b) {
      return g[1].M * std::pow(std::abs(a), g[1].alpha) * std::pow(std::abs(b), g[1].beta);
    };
  }
  return s;
}

std::map<std::string, NonlinearitySpec> builtin_nonlinearities() {
  std::map<std::string, NonlinearitySpec> m;
  for (const char* n : {"zero", "trig", "power", "manufactured"}) m.emplace(n, make_nonlinearity(n));
  return m;
}

}  // namespace nodal
