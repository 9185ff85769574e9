#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nodal/domain.hpp"
#include "nodal/report.hpp"

namespace nodal {

// Components are indexed 0 (u, exponent p1) and 1 (v, exponent p2).
struct Exponents {
  double p1 = 2.0, p2 = 2.0;
  int N = 1;

  static Exponents make(double p1, double p2, int N);
  double p(int i) const { return i == 0 ? p1 : p2; }
  // conjugate exponent p/(p-1)
  double conj(int i) const;
  // 1 < p_i < N; false for the interval testbed
  bool within_standing_hypothesis() const;
};

struct SingularWeightParams {
  double lambda = 0.0, theta = 0.0, delta = 0.0;
  std::array<double, 2> p{2.0, 2.0};
  std::array<double, 2> kappa{};     // gamma_i + 1 = lambda^{-theta p_i} (p_i - 1)
  std::array<double, 2> omega_m1{};  // omega_i - 1 = lambda^{-theta p_i}

  static SingularWeightParams make(const Exponents& e, double lambda, double theta, double delta);

  double gamma(int i) const { return kappa[i] - 1.0; }
  double omega(int i) const { return 1.0 + omega_m1[i]; }
  WeightExponent exponent(int i) const { return WeightExponent::from_margin(kappa[i]); }
  double log_lambda() const;
  // theta > 1 + p_i' for both components
  bool theta_condition(const Exponents& e) const;
};

// kappa = lambda^{-theta p}(p-1) for one component, computed in log space.
double singular_margin(double p, double lambda, double theta);

using Coupling = std::function<double(double x, double s, double t)>;

struct GrowthConstants {
  double alpha = 0.0, beta = 0.0, M = 1.0;
};

struct NonlinearitySpec {
  std::string label;
  Coupling f, g;
  std::array<GrowthConstants, 2> growth{};  // |f| <= M (1+|s|^alpha)(1+|t|^beta), same for g
  std::array<double, 2> m{1.0, 1.0};
  std::array<double, 2> rho{1.0, 1.0};
  bool meets_hypotheses = true;

  // q_i = alpha_i p1' + beta_i p2'
  double q(int i, const Exponents& e) const;
  double eval(int i, double x, double s, double t) const { return i == 0 ? f(x, s, t) : g(x, s, t); }
};

// Values -d^gamma on d < delta, +d^gamma on d > delta, 0 on d = delta,
// -inf at boundary nodes.
GridFunction weight_h(const SingularWeightParams& params, int i, const GridPtr& grid);

struct SampleBox {
  double s_lo = -1.0, s_hi = 1.0, t_lo = -1.0, t_hi = 1.0;
};

CertificationReport validate_growth(const NonlinearitySpec& spec, const Exponents& e, const SampleBox& box,
                                const Grid& grid, int n_samples = 21);

// Upper caps for the free variable: t for f, s for g.
struct SignCaps {
  double t_cap = 1.0, s_cap = 1.0;
};

std::vector<double> default_eta_probe();

CertificationReport validate_sign(const NonlinearitySpec& spec, const std::vector<double>& eta_probe,
                                const SignCaps& caps, const Grid& grid, int n_samples = 21);

// Catalog names: zero, trig, power, manufactured. Overrides accept
// M1 M2 alpha1 beta1 alpha2 beta2 m1 m2 rho1 rho2.
NonlinearitySpec make_nonlinearity(const std::string& name, const std::map<std::string, double>& overrides = {});
std::map<std::string, NonlinearitySpec> builtin_nonlinearities();

}  // namespace nodal
