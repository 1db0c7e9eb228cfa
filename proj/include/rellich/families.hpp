#pragma once
#include <vector>

#include "rellich/cylinder.hpp"
#include "rellich/modes.hpp"
#include "rellich/params.hpp"

// Explicit test-function families whose 1-D quotients realize (or bound) the
// sharp constants in the degenerate parameter ranges, plus the cutoff
// sequence used for the density argument.  Every family reduces to a pair of
// radial integrals over the support of a fixed C² bump ω; the ε-rates are
// the observable.

namespace rellich {

// Compactly supported C² profile ω on (0, ∞), with first and second
// derivative arrays sampled on a radial grid and an analytic closure for
// off-grid quadrature.
struct ProfileOmega {
  double t0 = 0.0, t1 = 0.0;  // support interval, 0 < t0 < t1
  ProfileClosure closure;     // ω, ω', ω'' at any t (identically 0 outside)
  std::vector<double> t, v, d1, d2;

  // Vanishes with two derivatives at both support ends and carries positive
  // mass ∫ t^{−1}|ω|^p dt.  Throws std::invalid_argument on violation.
  void validate(double p) const;

  // (t − t0)³(t1 − t)³ bump, peak-normalized to 1.
  static ProfileOmega bump(double t0, double t1);
  // bump on [1/4, 3/4] — the default profile everywhere a fixed ω suffices.
  static ProfileOmega canonical();
};

struct RateFit {
  std::vector<double> eps_list;
  std::vector<double> values;
  double slope = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of log(value) against log(eps).  Requires ≥ 4 points,
// all values positive; throws std::invalid_argument otherwise.
RateFit fit_rate(const std::vector<double>& eps_list, const std::vector<double>& values);

// {2⁻³, …, 2⁻¹⁰}: smaller ε starts to hit quadrature resolution on the
// t^{p−1}-weighted integrands.
std::vector<double> default_eps_ladder();

// Resonant-mode vanishing family u_ε = |x|^{−H} ω(|x|^ε) φ_k:  the quotient
// is bounded by
//
//   ε^p ∫ t^{p−1} |ε t ω'' + (b+ε) ω'|^p dt  /  ∫ t^{−1} |ω|^p dt,
//
// b = n − 2 − 2H.  Requires (n,p,α) resonant with exactly this k and
// ε ∈ (0,1].  Values decay like ε^p: the constant degenerates to 0.
double resonance_family_bound(const ProfileOmega& omega, double eps,
                              const Params& P, int k);

// The radial family behind the sharpness of the constant γ_{p,α}^p on the
// range 2p−n ≤ α ≤ np−n (γ ≥ 0):
//
//   ∫₀¹ t^{−1} |ε²t²ω'' + εt(b+ε)ω' − γω|^p dt  /  ∫₀¹ t^{−1} |ω|^p dt,
//
// which converges to γ^p as ε → 0.  Requires supp ω ⊂ (0,1).
double mitidieri_sharpness_quotient(const ProfileOmega& omega, double eps,
                                    const Params& P);

// Degeneration of the Navier-type Sobolev quotient for α > np−n, built on a
// spherical cap whose first eigenvalue equals −γ (> 0 here):
//
//   R(ε) = m_p ε^{p−1} ∫ t^{p−1}|εtω'' + (b+ε)ω'|^p dt
//          / ( m_q ε^{−1} ∫ t^{−1}|ω|^q dt )^{p/q},
//
// m_s the scale-invariant cap masses.  R(ε) → 0 at rate ε^{p−1+p/q}.
// α = np−n is rejected (that boundary is resonance_family_bound's regime);
// cap.eigenvalue must equal −γ within 1e−8.
double navier_degeneration_quotient(const ProfileOmega& omega, double eps,
                                    const Params& P, const SphericalMode& cap);

// Cutoff defect of the truncation η_h(x) = η(−log|x| / h), η a cubic
// smoothstep (1 on t ≤ 1, 0 on t ≥ 2):
//
//   ∫_{B₁} |x|^α |Δ(η_h u) − Δu|^p dx,
//
// expanded with the exact product rule Δ(η_h u) = η_h Δu + 2∇η_h·∇u + uΔη_h.
// u_radial must carry an analytic closure u(r), u'(r), u''(r) (its grid
// arrays are not consulted).  Requires α > 2p−n and integer h ≥ 1.
double cutoff_density_residual(const ModeProfile& u_radial, int h, const Params& P);

// w(s) = ω(e^{−εs}) with exact derivative arrays on the given axis grid:
// the cylinder-side representative of the resonance family, for comparing
// the reduced bound against the full norm quotient.
ModeProfile mapped_resonance_profile(const ProfileOmega& omega, double eps,
                                     const SphericalMode& mode, const Grid1D& grid);

}  // namespace rellich
