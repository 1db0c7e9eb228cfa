#pragma once
#include <functional>
#include <string>
#include <vector>

#include "rellich/grid.hpp"
#include "rellich/modes.hpp"
#include "rellich/params.hpp"

// First- and second-order Emden–Fowler transforms and the physical/cylinder
// norm identities.  A function on the punctured space is modeled as a finite
// sum of separable modes u(x) = Σ |x|^{−H} w_k(−log|x|) φ_k(x/|x|); each
// axis profile w_k lives on a shared 1-D grid.

namespace rellich {

// Evaluates w, w', w'' at an off-grid point (analytic generator closures, or
// a spline rebuilt from arrays for deserialized profiles).
using ProfileClosure = std::function<void(double s, double& w, double& dw, double& ddw)>;

struct ModeProfile {
  SphericalMode mode;
  std::vector<double> v;   // w on the grid
  std::vector<double> d1;  // w'
  std::vector<double> d2;  // w''
  ProfileClosure closure;  // empty → spline fallback on demand
};

struct CylinderFunction {
  Grid1D grid;
  std::vector<ModeProfile> modes;

  // Grid invariants; profiles vanish at both grid endpoints; derivative
  // arrays consistent with centered finite differences of the values to
  // O(h²).  Throws std::invalid_argument on violation.
  void validate() const;
};

struct NormPair {
  double physical = 0.0;
  double cylinder = 0.0;
  double rel_gap = 0.0;  // |physical − cylinder| / max(physical, tiny)
};

NormPair make_norm_pair(double physical, double cylinder);

struct FirstOrderNorms {
  NormPair grad;  // ∫|x|^a|∇u|^p  vs  ∫∫[(w'+H₁w)²φ² + w²|∇_σφ|²]^{p/2}
  NormPair mass;  // ∫|x|^{a−p}|u|^p  vs  ∫|g|^p
  bool spherical_constant_exact = true;  // false: carried symbolically (n ≠ 3, p ≠ 2)
};

struct SecondOrderNorms {
  NormPair op;    // ∫|x|^α|Δu|^p  vs  ∫|w'' − 2Aw' − (γ+λ)w|^p per mode
  NormPair mass;  // ∫|x|^{α−2p}|u|^p  vs  ∫|g|^p
  bool spherical_constant_exact = true;
};

// Weighted gradient norm identity at first-order weight a.  Rejects
// |H_{1,a}| < 1e−10 (degenerate transform) and, for p ≠ 2, any non-radial
// mode (the first-order integrand only separates for p = 2 or k = 0).
// Cylinder side: trapezoid on the axis grid.  Physical side: independent
// Gauss–Legendre panel quadrature in r on the mapped support.
FirstOrderNorms first_order_norms(const CylinderFunction& g, double a, const Params& P);

// Second-order analogue at weight α = P.alpha.  p ≠ 2 requires a single
// mode.  Refuses grids with fewer than 64 nodes across the profile support.
SecondOrderNorms second_order_norms(const CylinderFunction& g, const Params& P);

// Reflection s ↦ −s together with the weight flip α ↦ 2α*_p − α (second
// order).  Requires a grid symmetric about s = 0.  Derivative arrays are
// re-derived from the reflected values (sign-flipped odd orders).
std::pair<CylinderFunction, Params> reflect_and_hat(const CylinderFunction& g,
                                                    const Params& P);

// First-order weight flip paired with reflection: H_{1,â} = −H_{1,a}.
double hat_first_order_weight(const Params& P, double a);

// ---------------------------------------------------------------- plumbing

// Per-mode operator residual Lw = w'' − 2A w' − (γ + λ) w on the grid.
std::vector<double> second_order_residual(const ModeProfile& m, const Params& P);

// Serialization for replaying property-test cases:
// {"grid": [s...], "modes": [{"k": int | "nu": real, "n": int, "values": [...]}]}.
std::string to_json(const CylinderFunction& g);
CylinderFunction cylinder_from_json(const std::string& text);

// Closure from arrays via natural cubic spline (deserialization fallback).
ProfileClosure spline_closure(const Grid1D& grid, const std::vector<double>& v);

}  // namespace rellich
