#include "rellich/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rellich {

void Grid1D::validate() const {
  if (s.size() < 16)
    throw std::invalid_argument("Grid1D: need at least 16 nodes, got " +
                                std::to_string(s.size()));
  if (w.size() != s.size())
    throw std::invalid_argument("Grid1D: node/weight size mismatch");
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (!(s[i] < s[i + 1]))
      throw std::invalid_argument("Grid1D: nodes must be strictly increasing");
  for (double wi : w)
    if (!(wi > 0.0)) throw std::invalid_argument("Grid1D: weights must be positive");
}

Grid1D Grid1D::uniform(double lo, double hi, int count) {
  if (count < 16) throw std::invalid_argument("Grid1D::uniform: count must be >= 16");
  if (!(lo < hi)) throw std::invalid_argument("Grid1D::uniform: need lo < hi");
  Grid1D g;
  g.h = (hi - lo) / (count - 1);
  g.s.resize(count);
  g.w.assign(count, g.h);
  for (int i = 0; i < count; ++i) g.s[i] = lo + i * g.h;
  g.s.back() = hi;  // exact endpoint
  g.w.front() = g.w.back() = 0.5 * g.h;
  return g;
}

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: m must be >= 1");
  x.resize(m);
  w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    // Chebyshev guess, then Newton on P_m.
    double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
}

Grid1D Grid1D::gauss_legendre_panels(double lo, double hi, int panels, int per_panel) {
  if (panels < 1 || per_panel < 1)
    throw std::invalid_argument("gauss_legendre_panels: need panels, per_panel >= 1");
  if (!(lo < hi)) throw std::invalid_argument("gauss_legendre_panels: need lo < hi");
  std::vector<double> gx, gw;
  gauss_legendre(per_panel, gx, gw);
  Grid1D g;
  g.h = 0.0;
  g.s.reserve(static_cast<std::size_t>(panels) * per_panel);
  g.w.reserve(static_cast<std::size_t>(panels) * per_panel);
  const double dp = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * dp, mid = a + 0.5 * dp, half = 0.5 * dp;
    for (int j = 0; j < per_panel; ++j) {
      g.s.push_back(mid + half * gx[j]);
      g.w.push_back(half * gw[j]);
    }
  }
  return g;
}

double integrate(const Grid1D& g, const std::vector<double>& f) {
  if (f.size() != g.s.size())
    throw std::invalid_argument("integrate: value array does not match grid");
  KahanSum acc;
  for (std::size_t i = 0; i < f.size(); ++i) acc.add(g.w[i] * f[i]);
  return acc.value();
}

std::vector<double> cumulative_integral(const std::vector<double>& x,
                                        const std::vector<double>& f) {
  const std::size_t n = x.size();
  if (n < 3 || f.size() != n)
    throw std::invalid_argument("cumulative_integral: need >= 3 matching nodes");
  const double h = x[1] - x[0];
  if (std::fabs((x[n - 1] - x[0]) - (n - 1) * h) > 1e-9 * (x[n - 1] - x[0]))
    throw std::invalid_argument("cumulative_integral: grid must be uniform");
  // Derivative estimates: centered interior, one-sided second order at ends.
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);

  std::vector<double> F(n);
  F[0] = 0.0;
  KahanSum acc;
  const double h2_12 = h * h / 12.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc.add(0.5 * h * (f[i] + f[i + 1]) - h2_12 * (d[i + 1] - d[i]));
    F[i + 1] = acc.value();
  }
  return F;
}

}  // namespace rellich
