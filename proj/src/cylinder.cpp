#include "rellich/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace rellich {

namespace {

double maxabs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

// Index range [i0, i1] of the closed support of v (first/last nonzero).
bool support_range(const std::vector<double>& v, std::size_t& i0, std::size_t& i1) {
  const double thr = 1e-300;
  i0 = v.size();
  i1 = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::fabs(v[i]) > thr) {
      i0 = i;
      break;
    }
  if (i0 == v.size()) return false;
  for (std::size_t i = v.size(); i-- > 0;)
    if (std::fabs(v[i]) > thr) {
      i1 = i;
      break;
    }
  return true;
}

double signed_pow(double y, double p) {  // |y|^p sign-aware not needed for norms
  return std::pow(std::fabs(y), p);
}

}  // namespace

NormPair make_norm_pair(double physical, double cylinder) {
  NormPair np;
  np.physical = physical;
  np.cylinder = cylinder;
  np.rel_gap = std::fabs(physical - cylinder) / std::max(physical, 1e-300);
  return np;
}

void CylinderFunction::validate() const {
  grid.validate();
  const std::size_t N = grid.size();
  for (const auto& m : modes) {
    if (m.v.size() != N || m.d1.size() != N || m.d2.size() != N)
      throw std::invalid_argument("CylinderFunction: array/grid length mismatch");
    const double scale = std::max(1e-300, maxabs(m.v));
    if (std::fabs(m.v.front()) > 1e-12 * scale || std::fabs(m.v.back()) > 1e-12 * scale)
      throw std::invalid_argument("CylinderFunction: profile must vanish at grid endpoints");
    if (grid.h > 0.0 && N >= 5) {
      // Centered-difference consistency of the derivative arrays, O(h²).
      // Third/fourth derivative scales estimated from differences of d2.
      const double h = grid.h;
      double w3 = 0.0, w4 = 0.0;
      for (std::size_t i = 1; i + 1 < N; ++i) {
        w3 = std::max(w3, std::fabs(m.d2[i + 1] - m.d2[i - 1]) / (2.0 * h));
        w4 = std::max(w4, std::fabs(m.d2[i + 1] - 2.0 * m.d2[i] + m.d2[i - 1]) / (h * h));
      }
      const double tol1 = h * h / 6.0 * w3 * 8.0 + 1e-10 * scale;
      const double tol2 = h * h / 12.0 * w4 * 8.0 + 1e-8 * scale;
      for (std::size_t i = 1; i + 1 < N; i += std::max<std::size_t>(1, N / 97)) {
        const double fd1 = (m.v[i + 1] - m.v[i - 1]) / (2.0 * h);
        const double fd2 = (m.v[i + 1] - 2.0 * m.v[i] + m.v[i - 1]) / (h * h);
        if (std::fabs(fd1 - m.d1[i]) > tol1)
          throw std::invalid_argument(
              "CylinderFunction: first-derivative array inconsistent with values");
        if (std::fabs(fd2 - m.d2[i]) > tol2)
          throw std::invalid_argument(
              "CylinderFunction: second-derivative array inconsistent with values");
      }
    }
  }
}

// ---------------------------------------------------------------- spline

ProfileClosure spline_closure(const Grid1D& grid, const std::vector<double>& v) {
  if (grid.h <= 0.0)
    throw std::invalid_argument("spline_closure: uniform grid required");
  const std::size_t N = grid.size();
  const double h = grid.h, s0 = grid.lo();
  // Natural cubic spline second derivatives via Thomas solve.
  auto M = std::make_shared<std::vector<double>>(N, 0.0);
  {
    std::vector<double> c(N, 0.0), d(N, 0.0);
    // interior rows: M[i-1] + 4 M[i] + M[i+1] = 6 (v[i-1] - 2v[i] + v[i+1]) / h²
    double beta = 4.0;
    for (std::size_t i = 1; i + 1 < N; ++i) {
      const double rhs = 6.0 * (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h);
      if (i == 1) {
        c[i] = 1.0 / beta;
        d[i] = rhs / beta;
      } else {
        const double denom = 4.0 - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs - d[i - 1]) / denom;
      }
    }
    for (std::size_t i = N - 1; i-- > 1;) (*M)[i] = d[i] - c[i] * (*M)[i + 1];
  }
  auto vals = std::make_shared<std::vector<double>>(v);
  const double s_end = grid.hi();
  return [=](double s, double& w, double& dw, double& ddw) {
    if (s <= s0 || s >= s_end) {
      w = dw = ddw = 0.0;
      return;
    }
    const auto& V = *vals;
    const auto& m = *M;
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>((s - s0) / h), N - 2);
    const double a = s0 + j * h, t = s - a, u = h - t;
    w = (m[j] * u * u * u + m[j + 1] * t * t * t) / (6.0 * h) +
        (V[j] / h - m[j] * h / 6.0) * u + (V[j + 1] / h - m[j + 1] * h / 6.0) * t;
    dw = (-m[j] * u * u + m[j + 1] * t * t) / (2.0 * h) -
         (V[j] / h - m[j] * h / 6.0) + (V[j + 1] / h - m[j + 1] * h / 6.0);
    ddw = (m[j] * u + m[j + 1] * t) / h;
  };
}

namespace {

ProfileClosure closure_of(const CylinderFunction& g, const ModeProfile& m) {
  if (m.closure) return m.closure;
  return spline_closure(g.grid, m.v);
}

// Gauss–Legendre panels in r on the mapped support, panel edges log-graded
// (uniform in s = −log r).  4096 nodes total; fewer nodes per panel for
// p ≠ 2 so |·|^p kinks stay local to one short panel.
struct RadialQuad {
  std::vector<double> r, w;
};

RadialQuad radial_panels(double s_lo, double s_hi, double p) {
  const int panels = (p == 2.0) ? 64 : 512;
  const int per = 4096 / panels;
  std::vector<double> gx, gw;
  gauss_legendre(per, gx, gw);
  RadialQuad q;
  q.r.reserve(4096);
  q.w.reserve(4096);
  const double ds = (s_hi - s_lo) / panels;
  for (int k = 0; k < panels; ++k) {
    // r-panel [e^{−s_hi + k ds}, e^{−s_hi + (k+1) ds}], increasing in r
    const double ra = std::exp(-(s_hi - k * ds));
    const double rb = std::exp(-(s_hi - (k + 1) * ds));
    const double mid = 0.5 * (ra + rb), half = 0.5 * (rb - ra);
    for (int j = 0; j < per; ++j) {
      q.r.push_back(mid + half * gx[j]);
      q.w.push_back(half * gw[j]);
    }
  }
  return q;
}

struct ModeSupport {
  double s_lo, s_hi;
  std::size_t nodes;
};

bool mode_support(const CylinderFunction& g, const ModeProfile& m, ModeSupport& sup) {
  std::size_t i0, i1;
  if (!support_range(m.v, i0, i1)) return false;
  // one-node margin keeps the closure's support edge inside the panel range
  i0 = i0 > 0 ? i0 - 1 : 0;
  i1 = i1 + 1 < g.grid.size() ? i1 + 1 : g.grid.size() - 1;
  sup.s_lo = g.grid.s[i0];
  sup.s_hi = g.grid.s[i1];
  sup.nodes = i1 - i0 + 1;
  return true;
}

}  // namespace

std::vector<double> second_order_residual(const ModeProfile& m, const Params& P) {
  const DerivedParams d = derive_params(P);
  const double c = d.gamma + m.mode.eigenvalue;
  std::vector<double> L(m.v.size());
  for (std::size_t i = 0; i < L.size(); ++i)
    L[i] = m.d2[i] - 2.0 * d.A * m.d1[i] - c * m.v[i];
  return L;
}

FirstOrderNorms first_order_norms(const CylinderFunction& g, double a, const Params& P) {
  validate(P);
  g.validate();
  const double H = hardy_exponent(P, a);
  if (std::fabs(H) < 1e-10)
    throw std::invalid_argument("first_order_norms: degenerate weight, |H_{1,a}| < 1e-10");
  const double p = P.p;
  for (const auto& m : g.modes)
    if (p != 2.0 && m.mode.eigenvalue != 0.0)
      throw std::invalid_argument(
          "first_order_norms: p != 2 requires radial (k=0) modes only");

  const double expo_grad = a + P.n - 1.0 - p * (H + 1.0);
  const double expo_mass = (a - p) + P.n - 1.0 - p * H;

  KahanSum cyl_grad, cyl_mass, phys_grad, phys_mass;
  bool exact = true;
  for (const auto& m : g.modes) {
    bool ex = true;
    const double mp = mode_mass_ratio(m.mode, p, &ex);
    exact = exact && ex;
    const double lam = m.mode.eigenvalue;

    for (std::size_t i = 0; i < g.grid.size(); ++i) {
      const double t = m.d1[i] + H * m.v[i];
      const double grad2 = t * t + lam * m.v[i] * m.v[i];
      if (p == 2.0) {
        cyl_grad.add(g.grid.w[i] * grad2);
        cyl_mass.add(g.grid.w[i] * m.v[i] * m.v[i]);
      } else {
        cyl_grad.add(g.grid.w[i] * mp * std::pow(grad2, 0.5 * p));
        cyl_mass.add(g.grid.w[i] * mp * signed_pow(m.v[i], p));
      }
    }

    ModeSupport sup;
    if (!mode_support(g, m, sup)) continue;
    const auto cl = closure_of(g, m);
    const RadialQuad q = radial_panels(sup.s_lo, sup.s_hi, p);
    for (std::size_t j = 0; j < q.r.size(); ++j) {
      const double r = q.r[j], s = -std::log(r);
      double w, dw, ddw;
      cl(s, w, dw, ddw);
      const double t = dw + H * w;
      const double grad2 = t * t + lam * w * w;
      if (p == 2.0) {
        phys_grad.add(q.w[j] * std::pow(r, expo_grad) * grad2);
        phys_mass.add(q.w[j] * std::pow(r, expo_mass) * w * w);
      } else {
        phys_grad.add(q.w[j] * mp * std::pow(r, expo_grad) * std::pow(grad2, 0.5 * p));
        phys_mass.add(q.w[j] * mp * std::pow(r, expo_mass) * signed_pow(w, p));
      }
    }
  }

  FirstOrderNorms out;
  out.grad = make_norm_pair(phys_grad.value(), cyl_grad.value());
  out.mass = make_norm_pair(phys_mass.value(), cyl_mass.value());
  out.spherical_constant_exact = exact;
  return out;
}

SecondOrderNorms second_order_norms(const CylinderFunction& g, const Params& P) {
  validate(P);
  g.validate();
  const DerivedParams d = derive_params(P);
  const double p = P.p;
  if (p != 2.0 && g.modes.size() > 1)
    throw std::invalid_argument("second_order_norms: p != 2 requires a single mode");
  const double H = d.H2;
  const double expo_op = P.alpha + P.n - 1.0 - p * (H + 2.0);
  const double expo_mass = (P.alpha - 2.0 * p) + P.n - 1.0 - p * H;

  KahanSum cyl_op, cyl_mass, phys_op, phys_mass;
  bool exact = true;
  for (const auto& m : g.modes) {
    ModeSupport sup;
    const bool nonzero = mode_support(g, m, sup);
    if (nonzero && sup.nodes < 64)
      throw std::invalid_argument(
          "second_order_norms: only " + std::to_string(sup.nodes) +
          " grid nodes across profile support; need at least 64 (refine the grid)");
    bool ex = true;
    const double mp = mode_mass_ratio(m.mode, p, &ex);
    exact = exact && ex;
    const double c = d.gamma + m.mode.eigenvalue;

    const std::vector<double> L = second_order_residual(m, P);
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
      if (p == 2.0) {
        cyl_op.add(g.grid.w[i] * L[i] * L[i]);
        cyl_mass.add(g.grid.w[i] * m.v[i] * m.v[i]);
      } else {
        cyl_op.add(g.grid.w[i] * mp * signed_pow(L[i], p));
        cyl_mass.add(g.grid.w[i] * mp * signed_pow(m.v[i], p));
      }
    }

    if (!nonzero) continue;
    const auto cl = closure_of(g, m);
    const RadialQuad q = radial_panels(sup.s_lo, sup.s_hi, p);
    for (std::size_t j = 0; j < q.r.size(); ++j) {
      const double r = q.r[j], s = -std::log(r);
      double w, dw, ddw;
      cl(s, w, dw, ddw);
      const double Lw = ddw - 2.0 * d.A * dw - c * w;
      if (p == 2.0) {
        phys_op.add(q.w[j] * std::pow(r, expo_op) * Lw * Lw);
        phys_mass.add(q.w[j] * std::pow(r, expo_mass) * w * w);
      } else {
        phys_op.add(q.w[j] * mp * std::pow(r, expo_op) * signed_pow(Lw, p));
        phys_mass.add(q.w[j] * mp * std::pow(r, expo_mass) * signed_pow(w, p));
      }
    }
  }

  SecondOrderNorms out;
  out.op = make_norm_pair(phys_op.value(), cyl_op.value());
  out.mass = make_norm_pair(phys_mass.value(), cyl_mass.value());
  out.spherical_constant_exact = exact;
  return out;
}

double hat_first_order_weight(const Params& P, double a) {
  return 2.0 * (P.p - P.n) - a;
}

std::pair<CylinderFunction, Params> reflect_and_hat(const CylinderFunction& g,
                                                    const Params& P) {
  g.validate();
  const std::size_t N = g.grid.size();
  const double span = std::max(1.0, std::fabs(g.grid.hi()));
  for (std::size_t i = 0; i < N; ++i)
    if (std::fabs(g.grid.s[i] + g.grid.s[N - 1 - i]) > 1e-12 * span)
      throw std::invalid_argument("reflect_and_hat: grid must be symmetric about s = 0");

  CylinderFunction out;
  out.grid = g.grid;
  out.modes.reserve(g.modes.size());
  for (const auto& m : g.modes) {
    ModeProfile rm;
    rm.mode = m.mode;
    rm.v.resize(N);
    rm.d1.resize(N);
    rm.d2.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      rm.v[i] = m.v[N - 1 - i];
      rm.d1[i] = -m.d1[N - 1 - i];
      rm.d2[i] = m.d2[N - 1 - i];
    }
    if (m.closure) {
      auto base = m.closure;
      rm.closure = [base](double s, double& w, double& dw, double& ddw) {
        base(-s, w, dw, ddw);
        dw = -dw;
      };
    }
    out.modes.push_back(std::move(rm));
  }

  Params hatted = P;
  hatted.alpha = 2.0 * derive_params(P).alpha_star - P.alpha;
  return {std::move(out), hatted};
}

// ---------------------------------------------------------------- JSON

std::string to_json(const CylinderFunction& g) {
  nlohmann::json j;
  j["grid"] = g.grid.s;
  j["modes"] = nlohmann::json::array();
  for (const auto& m : g.modes) {
    nlohmann::json mj;
    mj["n"] = m.mode.n;
    if (m.mode.kind == SphericalMode::Kind::harmonic)
      mj["k"] = m.mode.k;
    else {
      mj["nu"] = m.mode.nu;
      mj["theta0"] = m.mode.theta0;
    }
    mj["values"] = m.v;
    j["modes"].push_back(std::move(mj));
  }
  return j.dump();
}

CylinderFunction cylinder_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CylinderFunction g;
  const auto nodes = j.at("grid").get<std::vector<double>>();
  if (nodes.size() < 16)
    throw std::invalid_argument("cylinder_from_json: grid too short");
  g.grid = Grid1D::uniform(nodes.front(), nodes.back(), static_cast<int>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (std::fabs(nodes[i] - g.grid.s[i]) > 1e-9)
      throw std::invalid_argument("cylinder_from_json: non-uniform grid in record");

  for (const auto& mj : j.at("modes")) {
    ModeProfile m;
    const int n = mj.at("n").get<int>();
    if (mj.contains("k")) {
      m.mode = SphericalMode::harmonic(mj.at("k").get<int>(), n);
    } else {
      // Cap record: rebuild the mode from its eigenvalue definition.
      m.mode.kind = SphericalMode::Kind::cap;
      m.mode.n = n;
      m.mode.nu = mj.at("nu").get<double>();
      m.mode.eigenvalue = m.mode.nu * (m.mode.nu + n - 2.0);
      m.mode.theta0 = mj.at("theta0").get<double>();
    }
    m.v = mj.at("values").get<std::vector<double>>();
    if (m.v.size() != g.grid.size())
      throw std::invalid_argument("cylinder_from_json: value array length mismatch");
    // Derivative arrays: centered differences, one-sided at the ends.
    const std::size_t N = m.v.size();
    const double h = g.grid.h;
    m.d1.resize(N);
    m.d2.resize(N);
    for (std::size_t i = 1; i + 1 < N; ++i) {
      m.d1[i] = (m.v[i + 1] - m.v[i - 1]) / (2.0 * h);
      m.d2[i] = (m.v[i + 1] - 2.0 * m.v[i] + m.v[i - 1]) / (h * h);
    }
    m.d1[0] = (-3.0 * m.v[0] + 4.0 * m.v[1] - m.v[2]) / (2.0 * h);
    m.d1[N - 1] = (3.0 * m.v[N - 1] - 4.0 * m.v[N - 2] + m.v[N - 3]) / (2.0 * h);
    m.d2[0] = (m.v[0] - 2.0 * m.v[1] + m.v[2]) / (h * h);
    m.d2[N - 1] = (m.v[N - 1] - 2.0 * m.v[N - 2] + m.v[N - 3]) / (h * h);
    g.modes.push_back(std::move(m));
  }
  return g;
}

}  // namespace rellich
