#pragma once
#include <optional>
#include <vector>

#include "rellich/grid.hpp"
#include "rellich/modes.hpp"
#include "rellich/params.hpp"

// Discretized minimization of the per-mode Rayleigh quotients on the
// cylinder axis: a generalized symmetric eigenvalue solve for p = 2 (exact
// in the span→∞ limit) and projected-gradient upper bounds for general
// (p, q).  Assembles the constant estimates μ_{p,α} and S_{p,q}(α).

namespace rellich {

struct QuotientReport {
  double numerator = 0.0;
  double denominator = 0.0;
  double quotient = 0.0;  // numerator / denominator^{p/q}
  SphericalMode mode;
  double grid_span = 0.0;  // S (grid on [−S, S])
  int grid_points = 0;     // N
  enum class Method { eigen, gradient, symbol } method = Method::eigen;
  int iterations = 0;
  double residual = 0.0;  // ‖Kx − θMx‖₂ / ‖Kx‖₂ for the eigen path
};

struct ConstantEstimate {
  double value = 0.0;  // min over per_mode quotients
  enum class Kind { mu, S } kind = Kind::mu;
  enum class Exactness { exact_symbol, eigen_converged, upper_bound } exactness =
      Exactness::upper_bound;
  std::vector<QuotientReport> per_mode;
  // p = 2, q = 2 cross-checks, recorded alongside the discrete value.
  std::optional<double> symbol_value;
  std::optional<double> closed_form_value;
  // Truncation-to-line indicator: the same estimate at half span, and the
  // difference to the full-span value.
  std::optional<double> value_half_span;
  std::optional<double> span_difference;
};

// Discrete operator pencil for one mode: L_h w = w'' − 2A w' − (γ+λ) w
// applied at every node of a uniform grid with the profile zero-padded
// outside the interior dofs (the discrete analogue of compact support: the
// profile and its first difference vanish at the window ends), M = quadrature
// mass, K = L_hᵀ M L_h (transpose taken explicitly on the banded stencil).
// Smallest generalized eigenvalue (K w = θ M w) by shift-0 inverse iteration
// on a banded Cholesky factorization; quotient = θ.  Stops on Rayleigh-value
// stagnation or relative residual ≤ 1e−6, whichever fires first: when the two
// lowest eigenvalues nearly coincide the vector mixes the pair indefinitely
// while θ is already pinned between them.
//
// Throws std::runtime_error if 10⁴ steps leave the relative residual above
// 1e−4.
QuotientReport minimize_mode_p2(const SphericalMode& mode, const Params& P,
                                const Grid1D& grid);

// Discrete objective F(w) = Σ M|L_h w|^p / (Σ M|w|^q)^{p/q} with the same
// zero-padded operator rows as the p = 2 path, with exact analytic gradient.
// eval() rejects the zero profile (vanishing denominator) and aborts loudly
// on non-finite values.
class GeneralObjective {
 public:
  GeneralObjective(const SphericalMode& mode, const Params& P, const Grid1D& grid);

  double eval(const std::vector<double>& w) const;
  std::vector<double> grad(const std::vector<double>& w) const;
  std::size_t dim() const { return m_; }

  // L_h at every grid node with zero padding; length dim() + 2, entry t is
  // the stencil at node t.
  std::vector<double> apply_op(const std::vector<double>& w) const;
  const std::vector<double>& mass() const { return M_; }

 private:
  std::size_t m_;
  double h_, A_, c_, p_, q_;
  std::vector<double> M_;  // interior masses (denominator)
  std::vector<double> W_;  // full-node masses (numerator rows)
};

// Polak–Ribière+ conjugate-gradient descent on GeneralObjective with Armijo
// backtracking (factor 0.5, c₁ = 1e−4, steepest-descent fallback whenever the
// conjugate direction stops descending) and 5 seeded restarts from Gaussian
// bump initials, each normalized to unit q-mass.  Accepted steps never
// increase the objective; the per-iteration objective log of the best restart
// is returned for monotonicity checks.
QuotientReport minimize_mode_general(const SphericalMode& mode, const Params& P,
                                     const Grid1D& grid, unsigned long long seed,
                                     std::vector<double>* objective_log = nullptr);

// min over harmonic modes k = 0..k_max.  kind selects the reported label
// (μ for the q = p Rellich constant, S for the Sobolev-type quotient); the
// functional is driven by (p, q) alone.  For p = 2, q = 2 the symbol oracle
// and the closed form are recorded alongside, and modes whose symbol value
// already exceeds the running discrete minimum are recorded as symbol-method
// rows instead of being solved (their discrete quotient cannot be smaller).
// k_max < 0 selects the default mode bound.  with_half_span_check controls
// the truncation indicator (an extra estimate at S/2, N/2).
ConstantEstimate estimate_constant(const Params& P, ConstantEstimate::Kind kind,
                                   int k_max, const Grid1D& grid,
                                   bool with_half_span_check = true);

}  // namespace rellich
