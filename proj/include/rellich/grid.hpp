#pragma once
#include <vector>

namespace rellich {

enum class GridKind { cylinder_axis, radial };

// 1-D quadrature grid.  Nodes strictly increasing, weights positive.
// Uniform trapezoid grids keep their spacing in h; composite rules set h = 0.
struct Grid1D {
  std::vector<double> s;
  std::vector<double> w;
  double h = 0.0;
  GridKind kind = GridKind::cylinder_axis;

  std::size_t size() const { return s.size(); }
  double lo() const { return s.front(); }
  double hi() const { return s.back(); }

  // Throws std::invalid_argument unless: size ≥ 16, strictly increasing
  // nodes, all weights > 0.
  void validate() const;

  // Trapezoid rule on [lo, hi] with `count` nodes (count ≥ 16).
  static Grid1D uniform(double lo, double hi, int count);

  // `panels` equal subintervals of [lo, hi], `per_panel`-point Gauss–Legendre
  // on each.  Spacing field h is 0 (non-uniform).
  static Grid1D gauss_legendre_panels(double lo, double hi, int panels, int per_panel);
};

// Gauss–Legendre nodes/weights on [−1, 1] (Newton on the recurrence).
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w);

// Compensated (Kahan) dot of quadrature weights with values.
double integrate(const Grid1D& g, const std::vector<double>& f);

// Kahan accumulator for hand-rolled loops.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

// Cumulative integral F_i = ∫_{x_0}^{x_i} f dx on a uniform grid, trapezoid
// with finite-difference endpoint-derivative correction (O(h⁴) globally).
std::vector<double> cumulative_integral(const std::vector<double>& x,
                                        const std::vector<double>& f);

}  // namespace rellich
