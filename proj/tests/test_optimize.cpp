#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rellich/modes.hpp"
#include "rellich/optimize.hpp"
#include "rellich/rng.hpp"

using namespace rellich;

TEST_CASE("p=2 estimate hits the closed form, drift-free weight") {
  // alpha = alpha*: the first-order drift vanishes and the constant is
  // (gamma + lambda_0)^2 = 81/16
  const Params P{5, 2.0, 2.0, 2.0};
  const Grid1D grid = Grid1D::uniform(-80.0, 80.0, 8192);
  const ConstantEstimate est =
      estimate_constant(P, ConstantEstimate::Kind::mu, -1, grid, false);
  CHECK(est.kind == ConstantEstimate::Kind::mu);
  CHECK(est.exactness == ConstantEstimate::Exactness::eigen_converged);
  REQUIRE(est.closed_form_value.has_value());
  CHECK(*est.closed_form_value == doctest::Approx(81.0 / 16.0).epsilon(1e-14));
  CHECK(est.value == doctest::Approx(81.0 / 16.0).epsilon(1e-3));
}

TEST_CASE("p=2 estimate hits the closed form, generic weight") {
  const Params P{5, 2.0, 2.0, 0.0};
  const Grid1D grid = Grid1D::uniform(-80.0, 80.0, 8192);
  const ConstantEstimate est =
      estimate_constant(P, ConstantEstimate::Kind::mu, -1, grid, true);
  CHECK(est.value == doctest::Approx(25.0 / 16.0).epsilon(2.5e-3));
  REQUIRE(est.symbol_value.has_value());
  CHECK(*est.symbol_value == doctest::Approx(25.0 / 16.0).epsilon(1e-12));
  // the half-span indicator reports a worse (larger-gap) value
  REQUIRE(est.value_half_span.has_value());
  REQUIRE(est.span_difference.has_value());
  CHECK(*est.span_difference >= 0.0);
}

TEST_CASE("resonant weight: discrete value decays with the span") {
  const Params P{5, 2.0, 2.0, 7.0};
  REQUIRE(is_resonant(P));
  const ConstantEstimate e40 = estimate_constant(
      P, ConstantEstimate::Kind::mu, -1, Grid1D::uniform(-40.0, 40.0, 2048), false);
  const ConstantEstimate e80 = estimate_constant(
      P, ConstantEstimate::Kind::mu, -1, Grid1D::uniform(-80.0, 80.0, 4096), false);
  const ConstantEstimate e160 = estimate_constant(
      P, ConstantEstimate::Kind::mu, -1, Grid1D::uniform(-160.0, 160.0, 8192), false);
  CHECK(e40.value > e80.value);
  CHECK(e80.value > e160.value);
  CHECK(e160.value > 0.0);
  CHECK(e160.value < 1e-2);
}

TEST_CASE("discrete per-mode quotient never undercuts the symbol") {
  const Grid1D grid = Grid1D::uniform(-40.0, 40.0, 2048);
  for (double alpha : {0.0, 2.0, 6.0}) {
    const Params P{5, 2.0, 2.0, alpha};
    const DerivedParams d = derive_params(P);
    for (int k = 0; k <= 2; ++k) {
      const SphericalMode mode = SphericalMode::harmonic(k, 5);
      const QuotientReport r = minimize_mode_p2(mode, P, grid);
      const double sym = symbol_infimum(d.A, d.gamma + mode.eigenvalue).value;
      CHECK(r.quotient >= sym - 1e-9 * std::max(1.0, sym));
      // relative eigen residual; the iteration stops on Rayleigh-value
      // stagnation, which leaves ~1e-6 when interior-branch pairs are nearly
      // degenerate
      CHECK(r.residual < 1e-5);
      CHECK(r.method == QuotientReport::Method::eigen);
    }
  }
}

TEST_CASE("general-path minimizer agrees with the eigen path at p = 2") {
  const Params P{5, 2.0, 2.0, 0.0};
  const Grid1D grid = Grid1D::uniform(-20.0, 20.0, 512);
  const SphericalMode mode = SphericalMode::harmonic(0, 5);
  const QuotientReport eig = minimize_mode_p2(mode, P, grid);
  const QuotientReport gen = minimize_mode_general(mode, P, grid, 12345);
  // descent gives an upper bound on the same discrete objective; conjugate
  // gradient with a backtracking line search lands within ~0.5 % of the eigen
  // value on this conditioning, so the bound here guards wiring, not
  // machine-precision convergence
  CHECK(gen.quotient >= eig.quotient * (1.0 - 1e-10));
  CHECK(gen.quotient <= eig.quotient * (1.0 + 1e-2));
  CHECK(gen.method == QuotientReport::Method::gradient);
}

TEST_CASE("analytic gradient matches finite differences") {
  const Params P{5, 3.0, 4.0, 2.0};
  const Grid1D grid = Grid1D::uniform(-10.0, 10.0, 64);
  const GeneralObjective obj(SphericalMode::harmonic(0, 5), P, grid);
  Rng rng(99);
  std::vector<double> w(obj.dim());
  for (auto& x : w) x = rng.uniform(-1.0, 1.0);

  const std::vector<double> g = obj.grad(w);
  double gn = 0.0, dn = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double delta = 1e-6 * std::max(1.0, std::fabs(w[i]));
    std::vector<double> wp = w, wm = w;
    wp[i] += delta;
    wm[i] -= delta;
    const double fd = (obj.eval(wp) - obj.eval(wm)) / (2.0 * delta);
    dn += (fd - g[i]) * (fd - g[i]);
    gn += g[i] * g[i];
  }
  CHECK(std::sqrt(dn) <= 1e-5 * std::sqrt(gn));
}

TEST_CASE("objective rejects the zero profile") {
  const Params P{5, 3.0, 4.0, 2.0};
  const Grid1D grid = Grid1D::uniform(-10.0, 10.0, 64);
  const GeneralObjective obj(SphericalMode::harmonic(0, 5), P, grid);
  const std::vector<double> zero(obj.dim(), 0.0);
  CHECK_THROWS_AS(obj.eval(zero), std::invalid_argument);
  CHECK_THROWS_AS(obj.grad(zero), std::invalid_argument);
}

TEST_CASE("projected descent never increases the objective") {
  const Params P{5, 2.0, 3.0, 1.0};
  const Grid1D grid = Grid1D::uniform(-15.0, 15.0, 256);
  std::vector<double> log;
  const QuotientReport r =
      minimize_mode_general(SphericalMode::harmonic(0, 5), P, grid, 7, &log);
  REQUIRE(log.size() >= 2);
  for (std::size_t i = 0; i + 1 < log.size(); ++i)
    CHECK(log[i + 1] <= log[i] + 1e-12 * std::max(1.0, std::fabs(log[i])));
  CHECK(r.quotient == doctest::Approx(log.back()).epsilon(1e-12));
  CHECK(r.quotient > 0.0);
}

TEST_CASE("general estimate is a positive upper-bound report") {
  const Params P{5, 3.0, 4.0, 0.0};
  const Grid1D grid = Grid1D::uniform(-15.0, 15.0, 256);
  const ConstantEstimate est =
      estimate_constant(P, ConstantEstimate::Kind::S, 2, grid, false);
  CHECK(est.kind == ConstantEstimate::Kind::S);
  CHECK(est.exactness == ConstantEstimate::Exactness::upper_bound);
  CHECK(est.value > 0.0);
  CHECK_FALSE(est.symbol_value.has_value());
  CHECK(est.per_mode.size() == 3);
}

TEST_CASE("estimate symmetric under the weight flip") {
  const Grid1D grid = Grid1D::uniform(-20.0, 20.0, 1024);
  for (double alpha : {0.0, 1.0}) {
    const ConstantEstimate a = estimate_constant(
        Params{5, 2.0, 2.0, alpha}, ConstantEstimate::Kind::mu, -1, grid, false);
    const ConstantEstimate b = estimate_constant(
        Params{5, 2.0, 2.0, 4.0 - alpha}, ConstantEstimate::Kind::mu, -1, grid, false);
    CHECK(std::fabs(a.value - b.value) <= 1e-9 * std::max(1.0, a.value));
  }
}

TEST_CASE("eigen path contracts") {
  const Params P{5, 2.0, 2.0, 0.0};
  const SphericalMode mode = SphericalMode::harmonic(0, 5);
  CHECK_THROWS_AS(
      minimize_mode_p2(mode, P, Grid1D::gauss_legendre_panels(-20.0, 20.0, 16, 8)),
      std::invalid_argument);
  CHECK_THROWS_AS(minimize_mode_p2(mode, P, Grid1D::uniform(-4.0, 4.0, 128)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      minimize_mode_p2(mode, Params{5, 3.0, 3.0, 0.0}, Grid1D::uniform(-20.0, 20.0, 512)),
      std::invalid_argument);
}
