#include "gaplab/nonlinearity.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gaplab;

TEST_CASE("pure power evaluators") {
  auto nl = Nonlinearity::pure_power(4.0, PeriodicWeight::constant(1.0));
  CHECK(nl.f(0.3, 0.5) == Catch::Approx(4.0 * 0.125));  // 4 u^3
  CHECK(nl.F(0.3, 0.5) == Catch::Approx(0.0625));
  CHECK(nl.alpha() == 4.0);
  CHECK(nl.p() == 4.0);
  // superquadraticity holds with exact equality: alpha F = f u
  for (double u : {-2.0, -0.1, 0.7, 3.0})
    CHECK(nl.alpha() * nl.F(0.1, u) == Catch::Approx(nl.f(0.1, u) * u));
}

TEST_CASE("cosine weight is nonnegative with a zero") {
  auto B = PeriodicWeight::one_plus_cos();
  CHECK(B.min() == 0.0);
  CHECK(B.max() == 2.0);
  auto t = B.cell_table(32);
  for (double v : t) CHECK(v >= 0.0);
  CHECK(t[16] == 0.0);  // exact zero at the half-cell
  CHECK_THROWS_AS(PeriodicWeight::constant(0.0), Error);
  CHECK_THROWS_AS(PeriodicWeight::constant(-1.0), Error);
}

TEST_CASE("exponent windows") {
  CHECK_THROWS_AS(Nonlinearity::pure_power(2.0, PeriodicWeight::constant(1.0)), Error);
  CHECK_THROWS_AS(Nonlinearity::pure_power(6.0, PeriodicWeight::constant(1.0)), Error);
  CHECK_THROWS_AS(Nonlinearity::minorant(5.0, 4.0, PeriodicWeight::constant(1.0)), Error);
  CHECK_NOTHROW(Nonlinearity::minorant(3.0, 4.0, PeriodicWeight::constant(1.0)));
}

TEST_CASE("assumption report for the built-in families") {
  auto pp = Nonlinearity::pure_power(4.0, PeriodicWeight::constant(1.0));
  AssumptionReport r = check_assumptions(pp);
  CHECK(r.passes_all());
  CHECK(r.entry("superquadraticity").pass);
  CHECK(r.entry("positivity_at_infinity").required);

  auto mn = Nonlinearity::minorant(3.0, 4.0, PeriodicWeight::constant(1.0));
  AssumptionReport rm = check_assumptions(mn);
  CHECK(rm.passes_all());
  CHECK(rm.entry("growth_bound").pass);  // c = beta max B, p = beta
  CHECK(rm.entry("lower_pinching").pass);
}

TEST_CASE("vanishing weight disarms only the infinity check") {
  auto nl = Nonlinearity::pure_power(4.0, PeriodicWeight::one_plus_cos());
  AssumptionReport r = check_assumptions(nl);
  CHECK(r.passes_required());
  const auto& f5 = r.entry("positivity_at_infinity");
  CHECK_FALSE(f5.required);  // the weight vanishes at one point per cell
  CHECK_FALSE(f5.pass);      // and the report says so instead of hiding it
  CHECK(f5.worst == 0.0);
}

TEST_CASE("linear nonlinearity fails the small-u slope check") {
  auto lin = Nonlinearity::custom(
      3.0, 3.0, 3.0, [](double, double u) { return u; },
      [](double, double u) { return 0.5 * u * u; });
  AssumptionReport r = check_assumptions(lin);
  CHECK_FALSE(r.entry("vanishing_slope").pass);
  CHECK_FALSE(r.entry("superquadraticity").pass);  // alpha F = 1.5 u^2 > u^2 = f u
}

TEST_CASE("superquadratic lower bound constant") {
  auto pp = Nonlinearity::pure_power(4.0, PeriodicWeight::constant(1.0));
  // F = u^4 >= c1 u^4 - delta u^2 holds with c1 = 1
  const double c1 = lower_bound_c1(pp, 1.0);
  CHECK(c1 >= 1.0);
  for (double u : {0.1, 1.0, 10.0})
    CHECK(pp.F(0.0, u) >= c1 * std::pow(u, 4.0) - 1.0 * u * u - 1e-12);
  // shrinking delta shrinks the certificate
  const double c_small = lower_bound_c1(pp, 0.01);
  const double c_large = lower_bound_c1(pp, 0.5);
  CHECK(c_small <= c_large);

  auto mn = Nonlinearity::minorant(3.0, 4.0, PeriodicWeight::constant(1.0));
  CHECK(lower_bound_c1(mn, 0.1) > 0.0);
  CHECK_THROWS_AS(lower_bound_c1(mn, -1.0), Error);
}

TEST_CASE("primitive consistency by quadrature") {
  for (auto nl : {Nonlinearity::pure_power(4.0, PeriodicWeight::one_plus_cos()),
                  Nonlinearity::minorant(3.0, 4.0, PeriodicWeight::one_plus_cos())}) {
    AssumptionReport r = check_assumptions(nl);
    CHECK(r.entry("primitive_consistency").pass);
  }
}
