#pragma once
#include <vector>

#include "rellich/grid.hpp"
#include "rellich/params.hpp"

// Radial Poisson solver on the annulus {1/R < |x| < R} with zero boundary
// values, and the comparison/monotonicity checks built on it: replacing a
// sign-changing u by the solution v of −Δv = |Δu| preserves the weighted
// operator norm exactly and can only increase the mass norm, so the
// Rayleigh-type quotient never increases.

namespace rellich {

struct AnnulusProblem {
  int n = 3;
  double R = 2.0;          // outer radius; inner radius is 1/R
  Grid1D grid;             // radial, uniform, spanning [1/R, R]
  std::vector<double> f;   // nonnegative source sampled on the grid

  // R > 1, uniform radial grid on [1/R, R], f ≥ 0 and matching length.
  // Throws std::invalid_argument.
  void validate() const;
};

struct RadialSolution {
  std::vector<double> v;
  double residual = 0.0;         // max |v'' + (n−1)v'/r + f| by 5-point differences
  double boundary_defect = 0.0;  // max(|v(1/R)|, |v(R)|)
};

// (r^{n−1} v')' = −r^{n−1} f by double quadrature: the flux integral
// g(r) = ∫ f s^{n−1} ds gives v'(r) = r^{1−n}(C − g), and one more cumulative
// integral plus the two boundary conditions pins (C, D).  Both cumulative
// integrals use the endpoint-corrected trapezoid (O(h⁴)).
RadialSolution solve_radial_annulus(const AnnulusProblem& prob);

struct ComparisonReport {
  double min_gap = 0.0;       // min over nodes of v − |u|
  double numerator = 0.0;     // shared ∫ |x|^α |Δ·|^p dx (identical by construction)
  double mass_u = 0.0;        // ∫ |x|^{−β} |u|^q dx
  double mass_v = 0.0;        // ∫ |x|^{−β} |v|^q dx
  double quotient_u = 0.0;    // numerator / mass_u^{p/q}
  double quotient_v = 0.0;
  bool dominates = false;     // v ≥ |u| − 1e−8 at every node
  bool quotient_monotone = false;  // quotient_v ≤ quotient_u + 1e−8
};

// Solves −Δv = |Δu| (Δu by 5-point differences of the sampled profile) with
// the same zero boundary values and reports the domination gap and the
// equal-numerator quotient pair.  u must vanish at both ends of the annulus
// grid within 1e−10; the grid must span [1/R, R].
ComparisonReport comparison_check(const Grid1D& grid, const std::vector<double>& u,
                                  const Params& P);

struct StabilityBound {
  double lhs = 0.0;  // ∫ |x|^{α−2p} |v|^p dx
  double rhs = 0.0;  // γ^{−p} ∫ |x|^α |f|^p dx
  bool holds = false;  // lhs ≤ rhs + 1e−9
};

// Weighted a-priori bound for the annulus solution; requires the
// nondegenerate window 2p−n < α < np−n (γ > 0).
StabilityBound weighted_stability_bound(const AnnulusProblem& prob, const Params& P);

}  // namespace rellich
