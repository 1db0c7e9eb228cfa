#include "rellich/families.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rellich/grid.hpp"

namespace rellich {

namespace {

constexpr int kPanels = 16;
constexpr int kNodes = 32;

double sphere_area(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

// ∫ over supp ω of integrand(t, ω, ω', ω'') dt, composite Gauss–Legendre.
template <class F>
double omega_integral(const ProfileOmega& om, F&& integrand) {
  const Grid1D g = Grid1D::gauss_legendre_panels(om.t0, om.t1, kPanels, kNodes);
  KahanSum acc;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v, dv, ddv;
    om.closure(g.s[i], v, dv, ddv);
    acc.add(g.w[i] * integrand(g.s[i], v, dv, ddv));
  }
  return acc.value();
}

// n − 2 − 2H: the first-derivative coefficient every family shares (equals
// 2A_{p,α}; kept in the n−2−2H form the derivation produces).
double bracket_coefficient(const DerivedParams& D, int n) {
  return n - 2.0 - 2.0 * D.H2;
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("family quotient: eps must lie in (0, 1], got " +
                                std::to_string(eps));
}

}  // namespace

void ProfileOmega::validate(double p) const {
  if (!(t0 > 0.0) || !(t1 > t0))
    throw std::invalid_argument("ProfileOmega: support must satisfy 0 < t0 < t1");
  if (!closure) throw std::invalid_argument("ProfileOmega: missing closure");
  if (t.size() != v.size() || v.size() != d1.size() || d1.size() != d2.size())
    throw std::invalid_argument("ProfileOmega: ragged sample arrays");
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  const double tol = 1e-10 * std::max(peak, 1.0);
  double vv, dv, ddv;
  for (double end : {t0, t1}) {
    closure(end, vv, dv, ddv);
    if (std::abs(vv) > tol || std::abs(dv) > tol || std::abs(ddv) > tol)
      throw std::invalid_argument(
          "ProfileOmega: must vanish with two derivatives at support ends");
  }
  const double mass =
      omega_integral(*this, [p](double s, double w, double, double) {
        return std::pow(std::abs(w), p) / s;
      });
  if (!(mass > 0.0))
    throw std::invalid_argument("ProfileOmega: zero profile (no p-mass)");
}

ProfileOmega ProfileOmega::bump(double t0, double t1) {
  if (!(t0 > 0.0) || !(t1 > t0))
    throw std::invalid_argument("ProfileOmega::bump: need 0 < t0 < t1");
  const double half = 0.5 * (t1 - t0);
  const double peak = half * half * half * half * half * half;  // ((t1−t0)/2)⁶
  ProfileOmega om;
  om.t0 = t0;
  om.t1 = t1;
  om.closure = [t0, t1, peak](double s, double& w, double& dw, double& ddw) {
    if (s <= t0 || s >= t1) {
      w = dw = ddw = 0.0;
      return;
    }
    const double g = (s - t0) * (t1 - s);
    const double dg = (t0 + t1) - 2.0 * s;
    w = g * g * g / peak;
    dw = 3.0 * g * g * dg / peak;
    ddw = (6.0 * g * dg * dg - 6.0 * g * g) / peak;  // g'' = −2
  };
  const int m = 257;
  om.t.resize(m);
  om.v.resize(m);
  om.d1.resize(m);
  om.d2.resize(m);
  for (int i = 0; i < m; ++i) {
    om.t[i] = t0 + (t1 - t0) * i / (m - 1);
    om.closure(om.t[i], om.v[i], om.d1[i], om.d2[i]);
  }
  return om;
}

ProfileOmega ProfileOmega::canonical() { return bump(0.25, 0.75); }

RateFit fit_rate(const std::vector<double>& eps_list, const std::vector<double>& values) {
  if (eps_list.size() != values.size())
    throw std::invalid_argument("fit_rate: eps/value length mismatch");
  if (eps_list.size() < 4)
    throw std::invalid_argument("fit_rate: need at least 4 points, got " +
                                std::to_string(eps_list.size()));
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("fit_rate: nonpositive entry at index " +
                                  std::to_string(i));
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("fit_rate: eps_list must be strictly decreasing");
  }
  const std::size_t m = eps_list.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += std::log(eps_list[i]);
    my += std::log(values[i]);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(eps_list[i]) - mx;
    const double dy = std::log(values[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.eps_list = eps_list;
  fit.values = values;
  fit.slope = sxy / sxx;
  double ssr = 0.0;  // residual sum after the fit
  for (std::size_t i = 0; i < m; ++i) {
    const double pred = my + fit.slope * (std::log(eps_list[i]) - mx);
    const double r = std::log(values[i]) - pred;
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ssr / syy) : 1.0;
  return fit;
}

std::vector<double> default_eps_ladder() {
  std::vector<double> eps;
  for (int e = 3; e <= 10; ++e) eps.push_back(std::ldexp(1.0, -e));
  return eps;
}

double resonance_family_bound(const ProfileOmega& omega, double eps, const Params& P,
                              int k) {
  validate(P);
  omega.validate(P.p);
  check_eps(eps);
  const auto kres = resonant_mode(P);
  if (!kres || *kres != k)
    throw std::invalid_argument(
        "resonance_family_bound: (n,p,alpha) is not resonant at mode k = " +
        std::to_string(k));
  const DerivedParams D = derive_params(P);
  const double b = bracket_coefficient(D, P.n);
  const double p = P.p;
  const double num = omega_integral(omega, [&](double s, double, double dw, double ddw) {
    return std::pow(s, p - 1.0) * std::pow(std::abs(eps * s * ddw + (b + eps) * dw), p);
  });
  const double den = omega_integral(omega, [&](double s, double w, double, double) {
    return std::pow(std::abs(w), p) / s;
  });
  return std::pow(eps, p) * num / den;
}

double mitidieri_sharpness_quotient(const ProfileOmega& omega, double eps,
                                    const Params& P) {
  validate(P);
  omega.validate(P.p);
  check_eps(eps);
  const double lo = 2.0 * P.p - P.n, hi = P.n * P.p - P.n;
  if (!(P.alpha >= lo && P.alpha <= hi))
    throw std::invalid_argument(
        "mitidieri_sharpness_quotient: alpha must lie in [2p−n, np−n]");
  if (!(omega.t0 > 0.0 && omega.t1 < 1.0))
    throw std::invalid_argument(
        "mitidieri_sharpness_quotient: support must be contained in (0, 1)");
  const DerivedParams D = derive_params(P);
  const double b = bracket_coefficient(D, P.n);
  const double p = P.p, g = D.gamma;
  const double num = omega_integral(omega, [&](double s, double w, double dw, double ddw) {
    const double bracket = eps * eps * s * s * ddw + eps * s * (b + eps) * dw - g * w;
    return std::pow(std::abs(bracket), p) / s;
  });
  const double den = omega_integral(omega, [&](double s, double w, double, double) {
    return std::pow(std::abs(w), p) / s;
  });
  return num / den;
}

double navier_degeneration_quotient(const ProfileOmega& omega, double eps,
                                    const Params& P, const SphericalMode& cap) {
  validate(P);
  omega.validate(P.p);
  check_eps(eps);
  const double edge = P.n * P.p - P.n;
  if (std::abs(P.alpha - edge) <= 1e-12)
    throw std::invalid_argument(
        "navier_degeneration_quotient: alpha = np−n is the resonant boundary; "
        "use resonance_family_bound");
  if (!(P.alpha > edge))
    throw std::invalid_argument("navier_degeneration_quotient: requires alpha > np−n");
  const DerivedParams D = derive_params(P);
  if (std::abs(cap.eigenvalue + D.gamma) > 1e-8)
    throw std::invalid_argument(
        "navier_degeneration_quotient: cap eigenvalue " +
        std::to_string(cap.eigenvalue) + " does not match −gamma = " +
        std::to_string(-D.gamma));
  const double b = bracket_coefficient(D, P.n);
  const double p = P.p, q = P.q;
  const double inum = omega_integral(omega, [&](double s, double, double dw, double ddw) {
    return std::pow(s, p - 1.0) * std::pow(std::abs(eps * s * ddw + (b + eps) * dw), p);
  });
  const double iden = omega_integral(omega, [&](double s, double w, double, double) {
    return std::pow(std::abs(w), q) / s;
  });
  const double mp = mode_mass_ratio(cap, p);
  const double mq = mode_mass_ratio(cap, q);
  const double num = mp * std::pow(eps, p - 1.0) * inum;
  const double den = mq * iden / eps;
  return num / std::pow(den, p / q);
}

double cutoff_density_residual(const ModeProfile& u_radial, int h, const Params& P) {
  validate(P);
  if (h < 1)
    throw std::invalid_argument("cutoff_density_residual: h must be a positive integer");
  if (!u_radial.closure)
    throw std::invalid_argument(
        "cutoff_density_residual: profile needs an analytic radial closure "
        "(u, u', u'' at r); sampled arrays cannot reach the origin");
  if (!(P.alpha > 2.0 * P.p - P.n))
    throw std::invalid_argument("cutoff_density_residual: requires alpha > 2p − n");

  // Cubic smoothstep down from 1 at t = 1 to 0 at t = 2.
  auto eta = [](double t, double& e, double& de, double& dde) {
    if (t <= 1.0) {
      e = 1.0;
      de = dde = 0.0;
    } else if (t >= 2.0) {
      e = de = dde = 0.0;
    } else {
      const double x = t - 1.0;
      e = 1.0 - x * x * (3.0 - 2.0 * x);
      de = -6.0 * x * (1.0 - x);
      dde = -6.0 + 12.0 * x;
    }
  };

  // In s = −log r the defect is  |S^{n−1}| ∫ e^{−(α+n)s} |F(s)|^p ds  with
  //   F = (η−1)Δu + 2∇η_h·∇u + uΔη_h,
  //   Δη_h = r^{−2} (η''/h² + (2−n) η'/h),   ∇η_h·∇u = −η' u'(r) / (h r).
  // The weight is split as e^{−(α+n)s/p} inside |·| so the r^{−1}, r^{−2}
  // factors never overflow: every combined exponent is negative because
  // (α+n)/p > 2.
  const double we = (P.alpha + P.n) / P.p;
  const double hh = static_cast<double>(h);
  auto scaled_defect = [&](double s) {
    double e, de, dde;
    eta(s / hh, e, de, dde);
    const double r = std::exp(-s);  // flushes to 0 for huge s; closures see r = 0
    double u, du, ddu;
    u_radial.closure(r, u, du, ddu);
    const double ea = std::exp(-we * s);
    const double eb = std::exp((1.0 - we) * s);
    const double ec = std::exp((2.0 - we) * s);
    double f = (e - 1.0) * (ddu * ea + (P.n - 1.0) * du * eb);
    f -= 2.0 * (de / hh) * du * eb;
    f += (dde / (hh * hh) + (2.0 - P.n) * de / hh) * u * ec;
    return std::pow(std::abs(f), P.p);
  };

  // η_h ≡ 1 on s ≤ h: the integrand is supported on [h, ∞).  The cutoff
  // varies on [h, 2h]; beyond 2h the defect is exactly −Δu and the weight
  // kills it at rate e^{−(α+n)(s−2h)}.
  const double s_tail = 2.0 * hh + 100.0 / (P.alpha + P.n);
  KahanSum acc;
  for (const auto& seg : {std::pair<double, double>{hh, 2.0 * hh},
                          std::pair<double, double>{2.0 * hh, s_tail}}) {
    const Grid1D g = Grid1D::gauss_legendre_panels(seg.first, seg.second, 32, 24);
    for (std::size_t i = 0; i < g.size(); ++i) acc.add(g.w[i] * scaled_defect(g.s[i]));
  }
  return sphere_area(P.n) * acc.value();
}

ModeProfile mapped_resonance_profile(const ProfileOmega& omega, double eps,
                                     const SphericalMode& mode, const Grid1D& grid) {
  check_eps(eps);
  ModeProfile m;
  m.mode = mode;
  // w(s) = ω(t), t = e^{−εs}:  w' = −εt ω',  w'' = ε²(t ω' + t² ω'').
  m.closure = [om = omega.closure, eps](double s, double& w, double& dw, double& ddw) {
    const double t = std::exp(-eps * s);
    double v, dv, ddv;
    om(t, v, dv, ddv);
    w = v;
    dw = -eps * t * dv;
    ddw = eps * eps * (t * dv + t * t * ddv);
  };
  const std::size_t N = grid.size();
  m.v.resize(N);
  m.d1.resize(N);
  m.d2.resize(N);
  for (std::size_t i = 0; i < N; ++i) m.closure(grid.s[i], m.v[i], m.d1[i], m.d2[i]);
  return m;
}

}  // namespace rellich
