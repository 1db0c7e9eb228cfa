#include "rellich/modes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rellich/grid.hpp"
#include "rellich/params.hpp"

namespace rellich {

SphericalMode SphericalMode::harmonic(int k, int n) {
  SphericalMode m;
  m.kind = Kind::harmonic;
  m.n = n;
  m.k = k;
  m.eigenvalue = sphere_eigenvalue(k, n);
  m.theta0 = M_PI;
  return m;
}

void SphericalMode::validate() const {
  if (kind == Kind::harmonic) {
    const double resid = std::fabs(eigenvalue - sphere_eigenvalue(k, n));
    if (resid > 1e-10)
      throw std::invalid_argument("SphericalMode: eigenvalue inconsistent with k");
  } else {
    const double resid = std::fabs(eigenvalue - nu * (nu + n - 2.0));
    if (resid > 1e-10)
      throw std::invalid_argument("SphericalMode: eigenvalue inconsistent with nu");
    if (traj_phi.empty() || std::fabs(traj_phi.back()) > 1e-8)
      throw std::invalid_argument("SphericalMode: cap profile does not vanish at theta0");
  }
}

SymbolInfimum symbol_infimum(double A, double c) {
  SymbolCurve f{A, c};
  if (c >= -2.0 * A * A) return {f(0.0), 0.0};
  const double tstar = -c - 2.0 * A * A;
  return {f(tstar), tstar};
}

SymbolOracle mu2_symbol_oracle(int n, double alpha, int k_max) {
  const DerivedParams d = derive_params({n, 2.0, 2.0, alpha});
  const double bound = std::fabs(d.gamma) + 4.0 * d.A * d.A;

  auto smallest_k_above = [&](double level) {
    int k = 0;
    while (sphere_eigenvalue(k, n) <= level) ++k;
    return k;
  };
  const int required = 2 + smallest_k_above(bound);
  if (k_max < 0) k_max = required + 2;
  if (k_max < required)
    throw std::invalid_argument("mu2_symbol_oracle: k_max = " + std::to_string(k_max) +
                                " below required bound " + std::to_string(required));

  SymbolOracle out{std::numeric_limits<double>::infinity(), -1, 0.0, false};
  for (int k = 0; k <= k_max; ++k) {
    const auto si = symbol_infimum(d.A, d.gamma + sphere_eigenvalue(k, n));
    if (si.value < out.value) {
      out.value = si.value;
      out.argmin_k = k;
      out.argmin_t = si.argmin_t;
    }
  }
  const Mu22 closed = mu22_closed_form(n, alpha);
  out.matches_closed_form =
      std::fabs(out.value - closed.value) <= 1e-10 * std::max(1.0, closed.value);
  return out;
}

// ---------------------------------------------------------------- cap modes

namespace {

// Regular solution of (1−x²)φ'' − (n−1)xφ' + μφ = 0 near x = 1, normalized
// φ(1) = 1: hypergeometric series in u = (1−x)/2 with parameters
// (−ν, ν+n−2; (n−1)/2).  Returns φ and dφ/dx.
void series_start(double nu, int n, double x, double& phi, double& dphi) {
  const double u = 0.5 * (1.0 - x);
  const double a = -nu, b = nu + n - 2.0, c = 0.5 * (n - 1.0);
  double term = 1.0, f = 1.0, fp = 0.0;  // fp = dF/du
  for (int m = 0; m < 400; ++m) {
    const double coef = (a + m) * (b + m) / ((c + m) * (m + 1.0));
    term *= coef * u;
    f += term;
    fp += term * (m + 1.0) / u;
    if (std::fabs(term) < 1e-18 * std::fabs(f) && m > 2) break;
  }
  phi = f;
  dphi = -0.5 * fp;  // du/dx = −1/2
}

struct CapState {
  double phi, dphi;
};

CapState rk4_step(const CapState& y, double x, double h, double mu, int n) {
  auto rhs = [&](double xx, const CapState& s) {
    return CapState{s.dphi, ((n - 1.0) * xx * s.dphi - mu * s.phi) / (1.0 - xx * xx)};
  };
  const CapState k1 = rhs(x, y);
  const CapState k2 = rhs(x + 0.5 * h, {y.phi + 0.5 * h * k1.phi, y.dphi + 0.5 * h * k1.dphi});
  const CapState k3 = rhs(x + 0.5 * h, {y.phi + 0.5 * h * k2.phi, y.dphi + 0.5 * h * k2.dphi});
  const CapState k4 = rhs(x + h, {y.phi + h * k3.phi, y.dphi + h * k3.dphi});
  return {y.phi + h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi),
          y.dphi + h / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi)};
}

// March from (x, state) to target x (≤ x) with substeps.
CapState rk4_to(CapState y, double x, double xt, double mu, int n, int substeps) {
  const double h = (xt - x) / substeps;
  for (int i = 0; i < substeps; ++i) y = rk4_step(y, x + i * h, h, mu, n);
  return y;
}

}  // namespace

SphericalMode cap_for_eigenvalue(int n, double mu_target) {
  if (!(mu_target > 0.0))
    throw std::invalid_argument("cap_for_eigenvalue: mu_target must be positive");
  if (n < 3) throw std::invalid_argument("cap_for_eigenvalue: n must be >= 3");

  SphericalMode cap;
  cap.kind = SphericalMode::Kind::cap;
  cap.n = n;
  const double nm2 = n - 2.0;
  cap.nu = 0.5 * (-nm2 + std::sqrt(nm2 * nm2 + 4.0 * mu_target));
  cap.eigenvalue = mu_target;

  // Step off the regular point; for large μ the first zero sits close to
  // x = 1 (θ0 ~ ν^{-1}), so shrink the offset accordingly.
  const double x0 = 1.0 - std::min(1e-3, 0.25 / mu_target);
  CapState y;
  series_start(cap.nu, n, x0, y.phi, y.dphi);

  cap.traj_x.push_back(x0);
  cap.traj_phi.push_back(y.phi);
  cap.traj_dphi.push_back(y.dphi);

  double x = x0;
  const double base_h = 1e-4;
  while (x > -1.0 + 1e-9) {
    // Keep the step clear of the singular point x = −1.
    const double h = -std::min(base_h, std::max((1.0 + x) / 20.0, 1e-10));
    CapState ynew = rk4_step(y, x, h, mu_target, n);
    const double xnew = x + h;
    if (y.phi > 0.0 && ynew.phi <= 0.0) {
      // Bracketed first crossing in [xnew, x]; bisect, re-integrating the
      // final partial step from the bracket's left state.
      double a = x, b = xnew;
      const double a0 = x;
      const CapState y0 = y;
      for (int it = 0; it < 200 && (a - b) > 1e-10; ++it) {
        const double mid = 0.5 * (a + b);
        const CapState ym = rk4_to(y0, a0, mid, mu_target, n, 8);
        if (ym.phi > 0.0)
          a = mid;
        else
          b = mid;
      }
      const double xstar = 0.5 * (a + b);
      const CapState ystar = rk4_to(y0, a0, xstar, mu_target, n, 8);
      cap.traj_x.push_back(xstar);
      cap.traj_phi.push_back(ystar.phi);
      cap.traj_dphi.push_back(ystar.dphi);
      cap.theta0 = std::acos(xstar);
      return cap;
    }
    x = xnew;
    y = ynew;
    cap.traj_x.push_back(x);
    cap.traj_phi.push_back(y.phi);
    cap.traj_dphi.push_back(y.dphi);
  }
  // Unreachable for μ > 0: the ground profile must change sign before x = −1.
  throw std::logic_error("cap_for_eigenvalue: no sign change found in (-1, 1)");
}

namespace {

// Trapezoid over the (non-uniformly ended) trajectory plus a Gauss–Legendre
// pass over the series segment [x0, 1].
double cap_integral(const SphericalMode& cap, double weight_exp,
                    double (*transform)(double phi, double dphi, double x, double s),
                    double s) {
  KahanSum acc;
  const auto& X = cap.traj_x;
  for (std::size_t i = 0; i + 1 < X.size(); ++i) {
    auto val = [&](std::size_t j) {
      const double om = 1.0 - X[j] * X[j];
      return std::pow(std::max(om, 0.0), weight_exp) *
             transform(cap.traj_phi[j], cap.traj_dphi[j], X[j], s);
    };
    acc.add(0.5 * (X[i] - X[i + 1]) * (val(i) + val(i + 1)));
  }
  // [x0, 1] head segment from the series.
  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);
  const double a = X.front(), b = 1.0, mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int j = 0; j < 16; ++j) {
    const double xx = mid + half * gx[j];
    double phi, dphi;
    series_start(cap.nu, cap.n, xx, phi, dphi);
    const double om = 1.0 - xx * xx;
    acc.add(half * gw[j] * std::pow(std::max(om, 0.0), weight_exp) *
            transform(phi, dphi, xx, s));
  }
  return acc.value();
}

double sphere_area(int n) {  // |S^{n−1}|
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

// |S^{n−2}| factor relating ∫_{S^{n−1}} g(θ) dσ to ∫ (1−x²)^{(n−3)/2} g dx.
double slice_area(int n) { return n == 3 ? 2.0 * M_PI : sphere_area(n - 1); }

double legendre_pk(int k, double x) {
  double p0 = 1.0, p1 = x;
  if (k == 0) return p0;
  for (int j = 1; j < k; ++j) {
    const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

double cap_rayleigh_quotient(const SphericalMode& cap) {
  if (cap.kind != SphericalMode::Kind::cap)
    throw std::invalid_argument("cap_rayleigh_quotient: harmonic mode passed");
  // |∇_σφ|² sin^{n−2}θ dθ = φ_x² (1−x²)^{(n−1)/2} dx: the sin²θ from the
  // gradient is folded into the weight exponent.
  auto grad2 = [](double, double dphi, double, double) { return dphi * dphi; };
  auto sq = [](double phi, double, double, double) { return phi * phi; };
  const double we = 0.5 * (cap.n - 3.0);
  const double num = cap_integral(cap, we + 1.0, grad2, 0.0);
  const double den = cap_integral(cap, we, sq, 0.0);
  return num / den;
}

double mode_mass_ratio(const SphericalMode& mode, double s, bool* exact) {
  if (exact) *exact = true;
  if (s == 2.0) return 1.0;
  if (mode.n != 3) {
    // Constants cancel in every quotient this library reports; carried
    // symbolically outside n = 3.
    if (exact) *exact = false;
    return 1.0;
  }
  if (mode.kind == SphericalMode::Kind::harmonic) {
    // φ = sqrt((2k+1)/4π) P_k(cos θ); panels keep |P_k|^s kinks local.
    const double ck = std::sqrt((2.0 * mode.k + 1.0) / (4.0 * M_PI));
    Grid1D g = Grid1D::gauss_legendre_panels(-1.0, 1.0, 400, 8);
    KahanSum acc;
    for (std::size_t i = 0; i < g.size(); ++i)
      acc.add(g.w[i] * std::pow(std::fabs(ck * legendre_pk(mode.k, g.s[i])), s));
    return 2.0 * M_PI * acc.value();  // ∫|φ|² dσ = 1 already
  }
  auto pw = [](double phi, double, double, double ss) {
    return std::pow(std::fabs(phi), ss);
  };
  const double we = 0.5 * (mode.n - 3.0);
  const double ms = slice_area(mode.n) * cap_integral(mode, we, pw, s);
  const double m2 = slice_area(mode.n) * cap_integral(mode, we, pw, 2.0);
  return ms / std::pow(m2, 0.5 * s);
}

}  // namespace rellich
