#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nodal/domain.hpp"
#include "nodal/errors.hpp"

using namespace nodal;
using std::numbers::pi;

TEST_CASE("domain descriptors") {
  CHECK(DomainDesc::interval(0, 2).max_distance() == doctest::Approx(1.0));
  CHECK(DomainDesc::interval(0, 2).measure() == doctest::Approx(2.0));
  CHECK(DomainDesc::ball(2, 3).measure() == doctest::Approx(4.0 / 3.0 * pi * 8.0));
  CHECK(DomainDesc::ball(1, 3).dimension() == 3);
  CHECK(DomainDesc::interval(0, 1).dimension() == 1);
  CHECK_THROWS_AS(DomainDesc::interval(1, 0).validate(), ConfigurationError);
  CHECK_THROWS_AS(DomainDesc::ball(-1, 3).validate(), ConfigurationError);
  CHECK_THROWS_AS(DomainDesc::ball(1, 1).validate(), ConfigurationError);
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * pi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * pi));
}

TEST_CASE("build_grid rejects small grids and bad grading") {
  CHECK_THROWS_AS(build_grid(DomainDesc::interval(0, 1), 5), ConfigurationError);
  CHECK_THROWS_AS(build_grid(DomainDesc::interval(0, 1), 15), ConfigurationError);
  CHECK_THROWS_AS(build_grid(DomainDesc::interval(0, 1), 64, 0.5), ConfigurationError);
  CHECK_NOTHROW(build_grid(DomainDesc::interval(0, 1), 16));
}

TEST_CASE("uniform interval grid") {
  auto g = build_grid(DomainDesc::interval(0, 1), 17);
  for (Index i = 0; i < g->size(); ++i) CHECK(g->node(i) == doctest::Approx(i / 16.0).epsilon(1e-15));
  CHECK(g->boundary_nodes().size() == 2);
  CHECK(g->outward_sign(0) == -1.0);
  CHECK(g->outward_sign(16) == 1.0);
  CHECK(g->distance()[8] == doctest::Approx(0.5));
  CHECK(g->distance()[3] == doctest::Approx(3.0 / 16.0));
}

TEST_CASE("graded grids refine toward the boundary") {
  auto gi = build_grid(DomainDesc::interval(0, 1), 65, 2.0);
  CHECK(gi->spacing(0) < gi->spacing(31));
  CHECK(gi->spacing(63) == doctest::Approx(gi->spacing(0)));
  auto gb = build_grid(DomainDesc::ball(1, 3), 65, 2.0);
  CHECK(gb->node(0) == 0.0);
  CHECK(gb->node(64) == 1.0);
  CHECK(gb->spacing(63) < gb->spacing(0));
  CHECK(gb->boundary_nodes() == std::vector<Index>{64});
  CHECK(gb->distance()[0] == doctest::Approx(1.0));
}

TEST_CASE("lumped mass and cell weights add up to the measure") {
  for (double grading : {1.0, 1.5, 3.0})
    for (Index n : {16, 101, 400}) {
      auto gi = build_grid(DomainDesc::interval(-1, 2), n, grading);
      CHECK(gi->node_weights().sum() == doctest::Approx(3.0).epsilon(1e-13));
      CHECK(gi->cell_weights().sum() == doctest::Approx(3.0).epsilon(1e-13));
      for (int N : {2, 3, 5}) {
        auto gb = build_grid(DomainDesc::ball(1.5, N), n, grading);
        const double m = DomainDesc::ball(1.5, N).measure();
        CHECK(gb->node_weights().sum() == doctest::Approx(m).epsilon(1e-12));
        CHECK(gb->cell_weights().sum() == doctest::Approx(m).epsilon(1e-12));
      }
    }
}

TEST_CASE("grid functions") {
  auto g = build_grid(DomainDesc::interval(0, 1), 33);
  auto h = build_grid(DomainDesc::interval(0, 1), 34);
  auto u = GridFunction::from(g, [](double x) { return x * x; });
  CHECK(u[16] == doctest::Approx(0.25));
  CHECK_THROWS_AS(require_same_grid(u, GridFunction::constant(h, 1.0)), ConfigurationError);
  CHECK_NOTHROW(require_same_grid(u, GridFunction::constant(g, 1.0)));
  CHECK_THROWS_AS(GridFunction(g, Eigen::VectorXd::Zero(3)), ConfigurationError);
  auto d = distance(g);
  CHECK(d[0] == 0.0);
  CHECK(d[16] == doctest::Approx(0.5));
}

TEST_CASE("delta strip") {
  auto g = build_grid(DomainDesc::interval(0, 1), 21);
  auto s = delta_strip(*g, 0.12);
  // d = 0, 0.05, 0.1 at each end
  CHECK(s.size() == 6);
  CHECK_THROWS_AS(delta_strip(*g, 0.0), ConfigurationError);
  CHECK_THROWS_AS(delta_strip(*g, 0.6), ConfigurationError);
  CHECK(delta_strip(*g, 0.5).size() == 20);
}

TEST_CASE("weight exponents keep the margin") {
  auto w = WeightExponent::from_margin(1e-300);
  CHECK(w.margin() == 1e-300);
  CHECK(w.value() == -1.0);
  auto v = WeightExponent::from_value(-0.5);
  CHECK(v.margin() == doctest::Approx(0.5));
  CHECK(v.pow(4.0) == doctest::Approx(0.5));
  CHECK(v.log_pow(4.0) == doctest::Approx(std::log(0.5)));
  CHECK_THROWS_AS(WeightExponent::from_value(-1.0), SingularityError);
  CHECK_THROWS_AS(WeightExponent::from_margin(0.0), SingularityError);
}

TEST_CASE("weighted integrals against closed forms") {
  auto g = build_grid(DomainDesc::interval(0, 1), 512);
  auto one = GridFunction::constant(g, 1.0);
  SUBCASE("strip near the left end") {
    for (double beta : {-0.9, -0.5, -0.1, 0.0, 0.7}) {
      Region r = Region::coordinates(-INFINITY, 0.5);
      r.hi = 0.1;
      const double exact = std::pow(0.1, beta + 1) / (beta + 1);
      CHECK(integrate_weighted(one, beta, r) == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  SUBCASE("whole interval, both ends") {
    const double beta = -0.5;
    const double exact = 2.0 * std::pow(0.5, beta + 1) / (beta + 1);
    CHECK(integrate_weighted(one, beta) == doctest::Approx(exact).epsilon(1e-12));
  }
  SUBCASE("absolute value cuts at sign changes") {
    auto u = GridFunction::from(g, [](double x) { return x - 0.3; });
    // int |x - 0.3| dx on [0,1]
    CHECK(integrate_weighted(u, 0.0) == doctest::Approx(0.5 * (0.09 + 0.49)).epsilon(1e-13));
    CHECK(integrate_signed(u, WeightExponent::from_value(0.0)) == doctest::Approx(0.2).epsilon(1e-13));
  }
  SUBCASE("ball measure") {
    auto gb = build_grid(DomainDesc::ball(1, 3), 300, 2.0);
    auto ob = GridFunction::constant(gb, 1.0);
    CHECK(integrate_weighted(ob, 0.0) == doctest::Approx(4.0 / 3.0 * pi).epsilon(1e-12));
    // int_B (1 - r)^{-1/2} dx = 4 pi int_0^1 r^2 (1-r)^{-1/2} dr = 4 pi * 16/15
    CHECK(integrate_weighted(ob, -0.5) == doctest::Approx(4 * pi * 16.0 / 15.0).epsilon(1e-11));
  }
}

TEST_CASE("weighted load sums to the weighted integral") {
  auto g = build_grid(DomainDesc::ball(1, 3), 200, 2.0);
  auto w = WeightExponent::from_value(-0.7);
  for (double delta : {0.01, 0.3, 0.99}) {
    const Eigen::VectorXd L = weighted_load(*g, w, Region::strip(delta));
    CHECK(L.sum() == doctest::Approx(integrate_weighted(GridFunction::constant(g, 1.0), w, Region::strip(delta)))
                         .epsilon(1e-12));
    CHECK(L.minCoeff() >= 0.0);
  }
}

TEST_CASE("grid table") {
  auto g = build_grid(DomainDesc::interval(0, 1), 16);
  std::ostringstream os;
  write_tsv(os, *g);
  std::string line;
  std::istringstream is(os.str());
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 17);
}
