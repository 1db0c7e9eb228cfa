#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rellich/params.hpp"

using namespace rellich;

TEST_CASE("derived quantities, n=5 p=q=2 alpha=0") {
  const Params P{5, 2.0, 2.0, 0.0};
  validate(P);
  const DerivedParams d = derive_params(P);
  // every intermediate is exact in binary floating point here
  CHECK(d.beta == 4.0);
  CHECK(d.gamma == 1.25);
  CHECK(d.H1 == 0.5);  // a = alpha − p = −2
  CHECK(d.H2 == 0.5);
  CHECK(d.A == 1.0);
  CHECK(d.alpha_star == 2.0);
  REQUIRE(d.p_crit.has_value());
  CHECK(*d.p_crit == 10.0);
  REQUIRE(d.gamma_bar.has_value());
  CHECK(*d.gamma_bar == 3.25);  // (3/2)² + 1²
}

TEST_CASE("derived quantities, fractional p") {
  const Params P{6, 1.5, 1.5, 1.0};
  const DerivedParams d = derive_params(P);
  CHECK(d.H2 == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(d.gamma == doctest::Approx(32.0 / 9.0).epsilon(1e-15));
  REQUIRE(d.p_crit.has_value());  // n = 6 > 2p = 3
  CHECK(*d.p_crit == 3.0);        // np/(n−2p)
  CHECK_FALSE(d.gamma_bar.has_value());
}

TEST_CASE("gamma vanishes at the lower admissibility endpoint") {
  const DerivedParams d = derive_params(Params{4, 3.0, 3.0, 2.0});  // alpha = 2p−n
  CHECK(d.gamma == 0.0);
  CHECK_FALSE(d.p_crit.has_value());  // n = 4 < 2p = 6
}

TEST_CASE("gamma and gamma_bar at the log-remainder example") {
  const DerivedParams d = derive_params(Params{5, 2.0, 2.0, 4.0});
  CHECK(d.gamma == 1.25);
  REQUIRE(d.gamma_bar.has_value());
  CHECK(*d.gamma_bar == 11.25);  // (3/2)² + 3²
}

TEST_CASE("gamma negative beyond the upper endpoint") {
  CHECK(derive_params(Params{3, 2.0, 2.0, 6.0}).gamma == -3.75);
  CHECK(derive_params(Params{5, 2.0, 2.0, 7.0}).gamma == -4.0);
}

TEST_CASE("gamma is even and A odd about alpha_star") {
  const int n = 5;
  for (double dd : {0.3, 1.1, 2.6, 4.9}) {
    const DerivedParams lo = derive_params(Params{n, 2.0, 2.0, 2.0 - dd});
    const DerivedParams hi = derive_params(Params{n, 2.0, 2.0, 2.0 + dd});
    CHECK(lo.gamma == doctest::Approx(hi.gamma).epsilon(1e-14));
    CHECK(lo.A == doctest::Approx(-hi.A).epsilon(1e-14));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate(Params{2, 2.0, 2.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Params{5, 1.0, 2.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Params{5, 2.0, 1.9, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(Params{3, 2.0, 4.0, 6.0}));
}

TEST_CASE("first-order exponent") {
  CHECK(hardy_exponent(Params{3, 2.0, 2.0, 0.0}, 0.0) == 0.5);
  CHECK(hardy_exponent(Params{4, 2.0, 2.0, 0.0}, 0.0) == 1.0);
  CHECK(hardy_exponent(Params{5, 2.0, 2.0, 0.0}, -2.0) == 0.5);
  // degenerate at a = p − n
  CHECK(hardy_exponent(Params{5, 2.0, 2.0, 0.0}, -3.0) == 0.0);
}

TEST_CASE("sphere eigenvalues") {
  CHECK(sphere_eigenvalue(0, 5) == 0.0);
  CHECK(sphere_eigenvalue(1, 5) == 4.0);
  CHECK(sphere_eigenvalue(2, 5) == 10.0);
  CHECK(sphere_eigenvalue(1, 3) == 2.0);
  CHECK(sphere_eigenvalue(3, 4) == 15.0);
}

TEST_CASE("resonant weights, p = 2") {
  auto k = resonant_mode(Params{5, 2.0, 2.0, 7.0});
  REQUIRE(k.has_value());
  CHECK(*k == 1);
  CHECK(*resonant_mode(Params{5, 2.0, 2.0, 5.0}) == 0);
  CHECK(*resonant_mode(Params{5, 2.0, 2.0, -1.0}) == 0);
  CHECK(*resonant_mode(Params{5, 2.0, 2.0, 9.0}) == 2);
  CHECK(*resonant_mode(Params{5, 2.0, 2.0, 13.0}) == 4);
  CHECK_FALSE(resonant_mode(Params{5, 2.0, 2.0, 6.0}).has_value());
  CHECK_FALSE(is_resonant(Params{5, 2.0, 2.0, 0.0}));
}

TEST_CASE("resonant weights, general p") {
  CHECK(*resonant_mode(Params{4, 3.0, 3.0, 8.0}) == 0);
  CHECK(*resonant_mode(Params{4, 3.0, 3.0, 2.0}) == 0);
  CHECK(*resonant_mode(Params{3, 3.0, 3.0, 9.0}) == 1);
  CHECK_FALSE(is_resonant(Params{4, 3.0, 3.0, 5.0}));
}

TEST_CASE("resonant set of n=5, p=2 on a fine scan") {
  const std::vector<double> expected = {-1.0, 5.0, 7.0, 9.0, 11.0, 13.0};
  std::vector<double> found;
  for (int i = 0; i <= 178; ++i) {
    const double a = -2.9 + 0.1 * i;  // [−2.9, 14.9]
    if (is_resonant(Params{5, 2.0, 2.0, a})) found.push_back(a);
  }
  REQUIRE(found.size() == expected.size());
  for (std::size_t i = 0; i < found.size(); ++i)
    CHECK(found[i] == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("closed-form p=q=2 constant") {
  Mu22 m = mu22_closed_form(5, 0.0);
  CHECK(m.value == doctest::Approx(25.0 / 16.0).epsilon(1e-15));
  CHECK(m.argmin_k == 0);

  m = mu22_closed_form(5, 7.0);
  CHECK(m.value == 0.0);
  CHECK(m.argmin_k == 1);

  m = mu22_closed_form(4, 2.0);
  CHECK(m.value == 1.0);
  CHECK(m.argmin_k == 0);
}

TEST_CASE("closed-form constant vanishes exactly at resonances") {
  for (double a : {-1.0, 5.0, 7.0, 9.0, 11.0, 13.0})
    CHECK(mu22_closed_form(5, a).value == doctest::Approx(0.0));
  CHECK(mu22_closed_form(5, 6.0).value > 0.0);
}

TEST_CASE("closed-form constant symmetric about alpha_star") {
  for (double a : {-0.7, 1.3, 3.9, 8.2})
    CHECK(mu22_closed_form(5, a).value ==
          doctest::Approx(mu22_closed_form(5, 4.0 - a).value).epsilon(1e-12));
}
