#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nodal/auxiliary.hpp"
#include "nodal/errors.hpp"

using namespace nodal;

namespace {

double radial_torsion(double p, int N, double r) {
  const double pc = p / (p - 1.0);
  return (p - 1.0) / p * std::pow(N, -1.0 / (p - 1.0)) * (1.0 - std::pow(r, pc));
}

}  // namespace

TEST_CASE("torsion on the ball against the radial closed form") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::ball(1, 3), 1024);
  for (double p : {1.5, 2.0, 3.0}) {
    auto z = torsion(p, g, cfg);
    double e = 0;
    for (Index j = 0; j < g->size(); ++j) e = std::max(e, std::abs(z[j] - radial_torsion(p, 3, g->node(j))));
    CHECK(e < 1e-4);
  }
  auto g2 = build_grid(DomainDesc::ball(1, 2), 1024);
  auto z2 = torsion(2.0, g2, cfg);
  CHECK(z2[0] == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("constants of the interval torsion, p = 2") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::interval(0, 1), 513);
  auto z = torsion(2.0, g, cfg);
  auto c = extract_constants(z, 2.0);
  CHECK(c.L_hat == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(c.L == doctest::Approx(0.5).epsilon(1e-10));
  // z/d = (1 - d)/2 is smallest at the centre
  CHECK(c.l == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(check_constants(z, c, 2.0).passed());
}

TEST_CASE("constants reject a non-positive function") {
  auto g = build_grid(DomainDesc::interval(0, 1), 33);
  auto z = GridFunction::from(g, [](double x) { return x * (1 - x) * (x - 0.5); });
  CHECK_THROWS_AS(extract_constants(z, 2.0), PositivityError);
}

TEST_CASE("constants certificate catches a wrong constant") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::ball(1, 3), 256, 2.0);
  auto z = torsion(2.5, g, cfg);
  auto c = extract_constants(z, 2.5);
  CHECK(check_constants(z, c, 2.5).passed());
  c.l *= 1.5;
  CHECK_FALSE(check_constants(z, c, 2.5).find("constants.lower")->pass);
}

TEST_CASE("perturbed torsion") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::ball(1, 3), 257, 2.0);
  auto z = torsion(2.0, g, cfg);
  SUBCASE("load is exact") {
    // lambda = 2, theta = 1, p = 2: off the strip 1, on it -4 d^{-3/4}
    const Eigen::VectorXd L = perturbed_torsion_load(2.0, 2.0, 1.0, 0.1, *g);
    auto one = GridFunction::constant(g, 1.0);
    const double off = integrate_weighted(one, 0.0, Region::outside(0.1));
    const double on = integrate_weighted(one, -0.75, Region::strip(0.1));
    CHECK(L.sum() == doctest::Approx(off - 4.0 * on).epsilon(1e-12));
  }
  SUBCASE("gamma outside (-1, 0) is a configuration error") {
    CHECK_THROWS_AS(perturbed_torsion(2.0, 0.5, 1.0, 0.1, g, cfg), ConfigurationError);
  }
  SUBCASE("strip forcing lowers the solution") {
    auto zd = perturbed_torsion(2.0, 2.0, 1.0, 0.05, g, cfg, &z);
    for (Index j = 0; j < g->size(); ++j) CHECK(zd[j] <= z[j] + 1e-12);
  }
}

TEST_CASE("strip pair: boundary slope and half height") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::ball(1, 3), 257, 2.0);
  auto z = torsion(2.0, g, cfg);
  SUBCASE("z_delta = z certifies both parts (a < a/2 for a < 0)") {
    auto rep = check_strip_pair(make_torsion_pair(z, z, 2.0, 4.0, 8.0, 0.1));
    CHECK(rep.find("strip.slope")->pass);
    CHECK(rep.find("strip.height")->pass);
  }
  SUBCASE("a strongly lowered z_delta fails j2") {
    auto low = GridFunction(g, 0.4 * z.values());
    CHECK_FALSE(check_strip_pair(make_torsion_pair(z, low, 2.0, 4.0, 8.0, 0.1)).find("strip.height")->pass);
  }
  SUBCASE("boundary slope below half fails j1") {
    auto flat = GridFunction(g, 0.45 * z.values());
    CHECK_FALSE(check_strip_pair(make_torsion_pair(z, flat, 2.0, 4.0, 8.0, 0.1)).find("strip.slope")->pass);
    auto steep = GridFunction(g, 0.55 * z.values());
    CHECK(check_strip_pair(make_torsion_pair(z, steep, 2.0, 4.0, 8.0, 0.1)).find("strip.slope")->pass);
  }
}

TEST_CASE("strip width search") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::ball(1, 3), 257, 2.0);
  auto z = torsion(2.0, g, cfg);
  auto s = find_delta0(2.0, 4.0, 8.0, z, cfg);
  CHECK(s.delta0 > 0.0);
  CHECK(s.delta == doctest::Approx(0.5 * s.delta0));
  CHECK(s.report.passed());
  CHECK(s.solves > 0);
  // with mild parameters the whole range certifies or the bracket is tight
  auto m = find_delta0(2.0, 2.0, 1.0, z, cfg);
  CHECK(m.delta0 > s.delta0);
}

TEST_CASE("perturbed torsion converges as the strip shrinks") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::interval(0, 1), 257, 2.0);
  for (double p : {1.5, 2.0, 3.0}) {
    auto z = torsion(p, g, cfg);
    double prev = INFINITY;
    for (double delta : {0.1, 0.05, 0.025, 0.0125}) {
      auto zd = perturbed_torsion(p, 2.0, 1.0, delta, g, cfg, &z);
      const double d = (zd.values() - z.values()).cwiseAbs().maxCoeff();
      CHECK(d < prev);
      prev = d;
    }
  }
}

TEST_CASE("Holder quotient") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::interval(0, 1), 257);
  auto z = torsion(2.0, g, cfg);
  auto h = holder_quotient(z);
  CHECK(std::isfinite(h.ratio));
  CHECK(h.ratio > 0.0);
  CHECK(h.ratio == doctest::Approx(h.seminorm_estimate / h.c1tau_norm));
  CHECK_THROWS_AS(holder_quotient(z, 1.0), ConfigurationError);
  CHECK_THROWS_AS(holder_quotient(GridFunction::constant(g, 1.0)), PreconditionError);
}

TEST_CASE("torsion pair table") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::interval(0, 1), 33);
  auto z = torsion(2.0, g, cfg);
  std::ostringstream os;
  write_tsv(os, make_torsion_pair(z, z, 2.0, 2.0, 1.0, 0.1));
  CHECK(os.str().find("z_delta") != std::string::npos);
}
