// Randomized properties across modules. Every case draws from a fixed seed.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nodal/config.hpp"
#include "nodal/system.hpp"

using namespace nodal;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 r(20240601);
  return r;
}

double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

GridPtr random_grid() {
  const Index n = 16 + static_cast<Index>(uniform(0, 300));
  const double grading = uniform(1.0, 3.0);
  if (uniform(0, 1) < 0.5) return build_grid(DomainDesc::interval(uniform(-2, 0), uniform(0.5, 3)), n, grading);
  return build_grid(DomainDesc::ball(uniform(0.5, 2), 2 + static_cast<int>(uniform(0, 4))), n, grading);
}

GridFunction random_function(const GridPtr& g) {
  Eigen::VectorXd v(g->size());
  for (Index j = 0; j < v.size(); ++j) v[j] = uniform(-1, 1);
  return GridFunction(g, std::move(v));
}

}  // namespace

TEST_CASE("signed weighted integral is linear") {
  for (int k = 0; k < 50; ++k) {
    auto g = random_grid();
    auto u = random_function(g), v = random_function(g);
    const double a = uniform(-3, 3), b = uniform(-3, 3);
    auto w = WeightExponent::from_value(uniform(-0.95, 0.5));
    const double delta = uniform(0.01, 1.0) * g->domain().max_distance();
    const Region r = Region::strip(delta);
    const double lhs = integrate_signed(GridFunction(g, a * u.values() + b * v.values()), w, r);
    const double rhs = a * integrate_signed(u, w, r) + b * integrate_signed(v, w, r);
    const double scale = integrate_weighted(GridFunction::constant(g, 1.0), w, r) * (std::abs(a) + std::abs(b));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("strip and complement add up to the whole domain") {
  for (int k = 0; k < 50; ++k) {
    auto g = random_grid();
    auto u = random_function(g);
    auto w = WeightExponent::from_value(uniform(-0.95, 0.5));
    const double delta = uniform(0.01, 1.0) * g->domain().max_distance();
    const double whole = integrate_weighted(u, w);
    const double parts = integrate_weighted(u, w, Region::strip(delta)) + integrate_weighted(u, w, Region::outside(delta));
    CHECK(parts == doctest::Approx(whole).epsilon(1e-12));
    CHECK(whole >= 0.0);
  }
}

TEST_CASE("discrete operator: kernel, homogeneity, monotonicity") {
  for (int k = 0; k < 100; ++k) {
    auto g = random_grid();
    const double p = uniform(1.2, 4.0);
    auto u = random_function(g), v = random_function(g);
    CHECK(weak_plap(GridFunction::constant(g, uniform(-5, 5)), p).cwiseAbs().maxCoeff() == 0.0);
    const double t = uniform(-3, 3);
    const Eigen::VectorXd lhs = weak_plap(GridFunction(g, t * u.values()), p);
    const Eigen::VectorXd rhs = std::pow(std::abs(t), p - 2) * t * weak_plap(u, p);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1e-300, lhs.cwiseAbs().maxCoeff()));
    CHECK((weak_plap(u, p) - weak_plap(v, p)).dot(u.values() - v.values()) >= -1e-12);
  }
}

TEST_CASE("torsion scales with the load") {
  // -Delta_p (c^{1/(p-1)} z) = c
  SolverConfig cfg;
  for (int k = 0; k < 8; ++k) {
    auto g = build_grid(DomainDesc::ball(1, 3), 129, 2.0);
    const double p = uniform(1.4, 3.5), c = uniform(0.2, 5.0);
    auto z = torsion(p, g, cfg);
    auto zc = solve_scalar([c](Index, double) { return c; }, p, BoundaryCondition::DirichletZero, cfg, z);
    const Eigen::VectorXd expect = std::pow(c, 1 / (p - 1)) * z.values();
    CHECK((zc.values() - expect).cwiseAbs().maxCoeff() <= 1e-8 * expect.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("comparison: strip forcing never raises the torsion function") {
  SolverConfig cfg;
  auto g = build_grid(DomainDesc::interval(0, 1), 129, 2.0);
  for (int k = 0; k < 8; ++k) {
    const double p = uniform(1.5, 3.0), delta = uniform(0.01, 0.5);
    auto z = torsion(p, g, cfg);
    auto zd = perturbed_torsion(p, 2.0, 1.0, delta, g, cfg, &z);
    CHECK((zd.values() - z.values()).maxCoeff() <= 1e-10 * z.values().maxCoeff());
  }
}

TEST_CASE("truncation is idempotent and penalty is monotone") {
  for (int k = 0; k < 50; ++k) {
    auto g = random_grid();
    auto a = random_function(g), b = random_function(g);
    Eigen::VectorXd lo = a.values().cwiseMin(b.values()), hi = a.values().cwiseMax(b.values());
    GridFunction L(g, lo), H(g, hi);
    auto w = GridFunction(g, 2.0 * random_function(g).values());
    auto t = truncate(w, L, H);
    CHECK((truncate(t, L, H).values() - t.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((t.values() - lo).minCoeff() >= 0.0);
    CHECK((hi - t.values()).minCoeff() >= 0.0);
    const double p = uniform(1.2, 4.0);
    auto w2 = GridFunction(g, w.values().array() + uniform(0, 1));
    CHECK((penalty(w2, L, H, p).values() - penalty(w, L, H, p).values()).minCoeff() >= 0.0);
    CHECK(penalty(t, L, H, p).values().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("random configs echo and read back unchanged") {
  for (int k = 0; k < 30; ++k) {
    RunConfig c;
    c.domain = uniform(0, 1) < 0.5 ? DomainDesc::interval(uniform(-1, 0), uniform(1, 2))
                                   : DomainDesc::ball(uniform(0.5, 2), 2 + static_cast<int>(uniform(0, 5)));
    c.nodes = 16 + static_cast<Index>(uniform(0, 1000));
    c.grading = uniform(1, 3);
    c.p1 = uniform(1.1, 5);
    c.p2 = uniform(1.1, 5);
    c.seed = static_cast<std::uint64_t>(uniform(0, 1e9));
    c.sweep.lambda = {uniform(2, 100), uniform(2, 100)};
    c.sweep.p = {{uniform(1.1, 3), uniform(1.1, 3)}};
    c.overrides["m1"] = uniform(0.1, 2);
    std::ostringstream a, b;
    c.write(a);
    std::istringstream is(a.str());
    parse_config(is).write(b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("singular margins stay in (0, 1) and decrease along the ladder") {
  for (double p : {1.5, 2.0, 2.8, 4.0})
    for (double theta : {4.0, 8.0, 16.0}) {
      double prev = 1.0;
      for (double lambda = 2; lambda <= 65536; lambda *= 2) {
        const double k = singular_margin(p, lambda, theta);
        if (!(k >= 1e-300)) break;
        CHECK(k > 0.0);
        CHECK(k < prev);
        prev = k;
      }
    }
}
