#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nodal/errors.hpp"
#include "nodal/plap.hpp"

using namespace nodal;

namespace {

// one-dimensional torsion on [0, 1]
double torsion_1d(double p, double x) {
  const double pc = p / (p - 1.0);
  return (p - 1.0) / p * (std::pow(0.5, pc) - std::pow(std::abs(x - 0.5), pc));
}

double max_err(const GridFunction& u, double (*f)(double, double), double p) {
  double e = 0;
  for (Index j = 0; j < u.size(); ++j) e = std::max(e, std::abs(u[j] - f(p, u.grid()->node(j))));
  return e;
}

}  // namespace

TEST_CASE("regularized flux") {
  CHECK(reg_flux(0.3, 2.0, 0.0) == doctest::Approx(0.3));
  CHECK(reg_flux(-2.0, 3.0, 0.0) == doctest::Approx(-4.0));
  CHECK(reg_flux(0.0, 1.5, 1e-3) == 0.0);
  CHECK(reg_flux_derivative(0.5, 2.0, 0.1) == doctest::Approx(1.0));
  // derivative against a central difference
  for (double p : {1.5, 2.5, 4.0}) {
    const double g = 0.7, h = 1e-6;
    const double fd = (reg_flux(g + h, p, 1e-2) - reg_flux(g - h, p, 1e-2)) / (2 * h);
    CHECK(reg_flux_derivative(g, p, 1e-2) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.eps_schedule = {};
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
  c.eps_schedule = {1e-4, 1e-2};
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
  c = SolverConfig{};
  c.newton_tol = 0;
  CHECK_THROWS_AS(c.validate(), ConfigurationError);
}

TEST_CASE("operator of a quadratic") {
  auto g = build_grid(DomainDesc::interval(0, 1), 65);
  auto u = GridFunction::from(g, [](double x) { return 0.5 * x * (1 - x); });
  auto r = apply_plap(u, 2.0, 0.0, BoundaryCondition::DirichletZero);
  for (Index j = 1; j + 1 < g->size(); ++j) CHECK(r[j] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r[0] == 0.0);
  CHECK(weak_plap(GridFunction::constant(g, 3.0), 2.5).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Dirichlet torsion on the interval") {
  auto g = build_grid(DomainDesc::interval(0, 1), 513);
  SolverConfig cfg;
  auto one = [](Index, double) { return 1.0; };
  auto z0 = GridFunction::constant(g, 0.0);
  CHECK(max_err(solve_scalar(one, 2.0, BoundaryCondition::DirichletZero, cfg, z0), torsion_1d, 2.0) < 1e-12);
  // nonlinear cases converge at the discretization rate only
  CHECK(max_err(solve_scalar(one, 3.0, BoundaryCondition::DirichletZero, cfg, z0), torsion_1d, 3.0) < 1e-4);
  CHECK(max_err(solve_scalar(one, 1.6, BoundaryCondition::DirichletZero, cfg, z0), torsion_1d, 1.6) < 1e-4);
}

TEST_CASE("p must exceed one") {
  auto g = build_grid(DomainDesc::interval(0, 1), 32);
  auto one = [](Index, double) { return 1.0; };
  CHECK_THROWS_AS(solve_scalar(one, 1.0, BoundaryCondition::DirichletZero, SolverConfig{}, GridFunction::constant(g, 0)),
                  ConfigurationError);
}

TEST_CASE("Neumann problems") {
  auto g = build_grid(DomainDesc::interval(0, 1), 129);
  SolverConfig cfg;
  auto z0 = GridFunction::constant(g, 0.0);
  SUBCASE("incompatible data") {
    auto one = [](Index, double) { return 1.0; };
    CHECK_THROWS_AS(solve_scalar(one, 2.0, BoundaryCondition::NeumannZero, cfg, z0), CompatibilityError);
  }
  SUBCASE("compatible data: zero-mean solution") {
    auto cosine = [&](Index j, double) { return std::cos(std::numbers::pi * g->node(j)); };
    auto u = solve_scalar(cosine, 2.0, BoundaryCondition::NeumannZero, cfg, z0);
    const double c = 1.0 / (std::numbers::pi * std::numbers::pi);
    for (Index j = 0; j < g->size(); ++j) CHECK(u[j] == doctest::Approx(c * std::cos(std::numbers::pi * g->node(j))).epsilon(1e-3));
  }
  SUBCASE("coercive right-hand side") {
    auto rhs = [](Index, double s) { return 2.0 - s; };
    auto u = solve_scalar(rhs, 3.0, BoundaryCondition::NeumannZero, cfg, z0);
    for (Index j = 0; j < g->size(); ++j) CHECK(u[j] == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("non-convergence carries the last iterate") {
  auto g = build_grid(DomainDesc::interval(0, 1), 64);
  SolverConfig cfg;
  cfg.max_newton = 1;
  cfg.eps_schedule = {1e-10};
  auto one = [](Index, double) { return 1.0; };
  try {
    solve_scalar(one, 4.0, BoundaryCondition::DirichletZero, cfg, GridFunction::constant(g, 0.0));
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate.size() == g->size());
    CHECK(e.residual > 0.0);
  }
}

TEST_CASE("nodal gradient and boundary flux") {
  auto g = build_grid(DomainDesc::interval(0, 1), 41, 1.7);
  auto u = GridFunction::from(g, [](double x) { return 0.5 * x * (1 - x); });
  const Eigen::VectorXd du = nodal_gradient(u);
  for (Index j = 0; j < g->size(); ++j) CHECK(du[j] == doctest::Approx(0.5 - g->node(j)).epsilon(1e-10));
  auto fl = boundary_flux(u, 3.0);
  REQUIRE(fl.size() == 2);
  for (const auto& b : fl) {
    CHECK(b.normal_derivative == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(b.conormal == doctest::Approx(-0.25).epsilon(1e-12));
  }
  auto gb = build_grid(DomainDesc::ball(1, 3), 65);
  auto r2 = GridFunction::from(gb, [](double r) { return r * r; });
  CHECK(nodal_gradient(r2)[0] == 0.0);
  CHECK(boundary_flux(r2, 2.0)[0].normal_derivative == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("trace output") {
  auto g = build_grid(DomainDesc::interval(0, 1), 32);
  std::ostringstream os;
  SolverConfig cfg;
  cfg.trace = &os;
  auto one = [](Index, double) { return 1.0; };
  solve_scalar(one, 2.5, BoundaryCondition::DirichletZero, cfg, GridFunction::constant(g, 0.0));
  CHECK(!os.str().empty());
}
