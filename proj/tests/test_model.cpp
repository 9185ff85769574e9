#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nodal/errors.hpp"
#include "nodal/model.hpp"

using namespace nodal;

TEST_CASE("exponents") {
  auto e = Exponents::make(2.2, 2.8, 3);
  CHECK(e.conj(0) == doctest::Approx(2.2 / 1.2));
  CHECK(e.conj(1) == doctest::Approx(2.8 / 1.8));
  CHECK(e.within_standing_hypothesis());
  CHECK_FALSE(Exponents::make(2.0, 2.0, 1).within_standing_hypothesis());
  CHECK_THROWS_AS(Exponents::make(1.0, 2.0, 3), ConfigurationError);
}

TEST_CASE("singular weight parameters") {
  auto e = Exponents::make(2.0, 3.0, 3);
  CHECK(singular_margin(2.0, 2.0, 1.0) == doctest::Approx(0.25));
  auto w = SingularWeightParams::make(e, 2.0, 1.0, 0.1);
  CHECK(w.gamma(0) == doctest::Approx(-0.75));
  CHECK(w.gamma(1) == doctest::Approx(0.25 - 1.0));  // 2^{-3} * 2
  CHECK(w.omega(0) == doctest::Approx(1.25));
  CHECK(w.omega(1) == doctest::Approx(1.125));
  CHECK(w.log_lambda() == doctest::Approx(std::log(2.0)));

  SUBCASE("tiny margins survive in log space") {
    auto big = SingularWeightParams::make(e, 16384.0, 4.0, 1e-50);
    CHECK(big.kappa[0] > 0.0);
    CHECK(big.kappa[0] == doctest::Approx(std::exp(-8.0 * std::log(16384.0))).epsilon(1e-12));
    CHECK(big.gamma(0) == -1.0);  // the value itself rounds; the margin does not
  }
  SUBCASE("underflowing margin is rejected") {
    CHECK_THROWS_AS(SingularWeightParams::make(e, 65536.0, 64.0, 1e-3), ConfigurationError);
  }
  SUBCASE("theta condition") {
    CHECK(SingularWeightParams::make(e, 2.0, 3.5, 0.1).theta_condition(e));
    CHECK_FALSE(SingularWeightParams::make(e, 2.0, 3.0, 0.1).theta_condition(e));
  }
}

TEST_CASE("singular weight values") {
  auto g = build_grid(DomainDesc::interval(0, 1), 21);
  auto e = Exponents::make(2.0, 2.0, 1);
  auto w = SingularWeightParams::make(e, 2.0, 1.0, 0.25);
  auto h = weight_h(w, 0, g);
  CHECK(std::isinf(h[0]));
  CHECK(h[0] < 0);
  CHECK(h[1] < 0);  // d = 0.05
  CHECK(h[5] == 0.0);  // d = 0.25
  CHECK(h[10] == doctest::Approx(std::pow(0.5, -0.75)));
}

TEST_CASE("nonlinearity catalog") {
  auto all = builtin_nonlinearities();
  CHECK(all.size() == 4);
  CHECK_THROWS_AS(make_nonlinearity("cubic"), ConfigurationError);
  CHECK_THROWS_AS(make_nonlinearity("trig", {{"gamma", 1.0}}), ConfigurationError);
  auto trig = make_nonlinearity("trig");
  CHECK(trig.f(0.0, 0.5, 0.0) == doctest::Approx(std::sin(0.5)));
  auto power = make_nonlinearity("power", {{"M1", 3.0}, {"alpha1", 0.2}});
  CHECK(power.f(0.0, 2.0, 1.0) == doctest::Approx(3.0 * std::pow(2.0, 0.2)));
  auto e = Exponents::make(2.0, 2.0, 3);
  CHECK(power.q(0, e) == doctest::Approx(0.2 * 2 + 0.1 * 2));
  CHECK_FALSE(make_nonlinearity("manufactured").meets_hypotheses);
}

TEST_CASE("growth and sign hypotheses") {
  auto g = build_grid(DomainDesc::ball(1, 3), 64, 2.0);
  auto e = Exponents::make(2.2, 2.8, 3);
  for (const char* name : {"zero", "trig", "power"}) {
    auto s = make_nonlinearity(name);
    CHECK(validate_growth(s, e, SampleBox{}, *g).passed());
    CHECK(validate_sign(s, default_eta_probe(), SignCaps{}, *g).passed());
  }
  SUBCASE("growth order at least one fails") {
    auto s = make_nonlinearity("power", {{"alpha1", 0.6}});
    auto rep = validate_growth(s, e, SampleBox{}, *g);
    CHECK_FALSE(rep.find("growth.q1")->pass);
  }
  SUBCASE("envelope violated") {
    auto s = make_nonlinearity("trig", {{"M1", 0.1}});
    CHECK_FALSE(validate_growth(s, e, SampleBox{}, *g).find("growth.envelope.f")->pass);
  }
  SUBCASE("f bounded below away from zero fails the sign condition") {
    auto s = make_nonlinearity("zero", {{"m1", 0.5}});
    s.f = [](double, double, double) { return -1.0; };
    CHECK_FALSE(validate_sign(s, default_eta_probe(), SignCaps{}, *g).find("sign.f")->pass);
  }
}
