#pragma once
#include <vector>

// Spherical-direction bookkeeping: integer harmonics on S^{n−1}, fractional
// spherical-cap modes whose first Dirichlet eigenvalue matches a prescribed
// value, and the exact p=2 Fourier-symbol oracle for per-mode infima of the
// cylinder quotient.

namespace rellich {

struct SphericalMode {
  enum class Kind { harmonic, cap };
  Kind kind = Kind::harmonic;
  int n = 3;             // ambient dimension (mode lives on S^{n−1})
  int k = 0;             // harmonic degree (kind == harmonic)
  double nu = 0.0;       // cap degree (kind == cap)
  double eigenvalue = 0.0;  // λ_k = k(n−2+k) or ν(ν+n−2)
  double theta0 = 0.0;   // cap half-angle; π for the full sphere

  // Axisymmetric cap profile trajectory from the shooting integration,
  // sampled on decreasing x = cos θ from x0 ≈ 1 down to cos θ0.
  std::vector<double> traj_x, traj_phi, traj_dphi;

  static SphericalMode harmonic(int k, int n);

  // eigenvalue consistent with k or ν (residual ≤ 1e−10), cap profile
  // vanishing at cos θ0.  Throws std::invalid_argument otherwise.
  void validate() const;
};

// Fourier symbol of  w ↦ w'' − 2A w' − c w  on the line, evaluated on
// frequency t = ξ² ≥ 0:  f(t) = (t + c)² + 4A² t.
struct SymbolCurve {
  double A = 0.0;
  double c = 0.0;
  double operator()(double t) const {
    return (t + c) * (t + c) + 4.0 * A * A * t;
  }
};

struct SymbolInfimum {
  double value;
  double argmin_t;
};

// inf over t ≥ 0 of (t+c)² + 4A²t.  Exact two-branch formula: minimum at
// t = 0 when c ≥ −2A², otherwise at the stationary point t* = −c − 2A²
// (f evaluated at t* directly).
SymbolInfimum symbol_infimum(double A, double c);

struct SymbolOracle {
  double value;
  int argmin_k;
  double argmin_t;
  bool matches_closed_form;  // agrees with mu22_closed_form within 1e−10
};

// min over k ≤ k_max of symbol_infimum(A_{2,α}, γ_{2,α} + λ_k).
// k_max < 0 selects the default bound (smallest k with λ_k > |γ| + 4A² + 10).
// Throws std::invalid_argument when an explicit k_max is below the required
// bound 2 + min{k : λ_k > |γ| + 4A²}.
SymbolOracle mu2_symbol_oracle(int n, double alpha, int k_max = -1);

// Spherical cap whose first Dirichlet eigenvalue (axisymmetric ground mode)
// equals mu_target: solves ν(ν+n−2) = mu_target for ν > 0, shoots the
// Gegenbauer equation (1−x²)φ'' − (n−1)xφ' + μφ = 0 from the regular point
// x = 1 and returns θ0 = arccos(first zero).  Fixed-step RK4 (1e−4) with
// bisection refinement of the crossing to 1e−10 in x.
SphericalMode cap_for_eigenvalue(int n, double mu_target);

// Rayleigh quotient ∫_cap |∇_σ φ|² dσ / ∫_cap |φ|² dσ of the shot profile,
// recomputed by quadrature on the stored trajectory (consistency check).
double cap_rayleigh_quotient(const SphericalMode& cap);

// Scale-invariant L^s mass of the mode profile over its domain:
// ∫|φ|^s dσ / (∫|φ|² dσ)^{s/2}.  Exactly 1 for s = 2.  Computed explicitly
// for n = 3 (harmonics via Legendre quadrature, caps via the stored shooting
// trajectory); for other dimensions the constant cancels in every reported
// quotient and is carried symbolically as 1, with *exact = false.
double mode_mass_ratio(const SphericalMode& mode, double s, bool* exact = nullptr);

}  // namespace rellich
