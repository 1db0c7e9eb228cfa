#pragma once
#include <optional>

// Closed-form constants and admissibility/resonance predicates for the
// weighted second-order inequalities
//
//   ∫ |x|^α |Δu|^p dx  ≥  C ∫ |x|^{−β} |u|^q dx        (second order)
//   ∫ |x|^a |∇u|^p dx  ≥  |H_{1,a}|^p ∫ |x|^{a−p} |u|^p dx   (first order)
//
// on R^n \ {0}, and for their exact reduction onto the cylinder
// R × S^{n−1} via u(x) = |x|^{−H} w(−log|x|) φ(x/|x|).

namespace rellich {

struct Params {
  int n = 5;        // dimension, ≥ 3
  double p = 2.0;   // > 1
  double q = 2.0;   // ≥ p
  double alpha = 0.0;
};

struct DerivedParams {
  double beta;        // n − q(n−2p+α)/p
  double gamma;       // ((n−2p+α)/p)·((np−n−α)/p)
  double H1;          // (n+a)/p − 1 at a = α−p
  double H2;          // (n+α)/p − 2
  double A;           // (n+2)/2 − (n+α)/p
  double alpha_star;  // p + n(p−2)/2; γ is even and A odd about it
  std::optional<double> p_crit;     // np/(n−2p), only when n > 2p
  std::optional<double> gamma_bar;  // ((n−2)/2)² + ((α+2)/2)², p = 2 only
};

// Throws std::invalid_argument on n < 3, p ≤ 1, q < p.
void validate(const Params& P);

DerivedParams derive_params(const Params& P);

// H_{1,a} = (n+a)/p − 1 for an arbitrary first-order weight exponent a.
double hardy_exponent(const Params& P, double a);

// Laplace–Beltrami eigenvalue on S^{n−1}: λ_k = k(n−2+k).
double sphere_eigenvalue(int k, int n);

// Resonance: −γ_{p,α} equals λ_k for some integer k ≥ 0.  Root-tested on the
// quadratic k² + (n−2)k + γ = 0, residual tolerance 1e−12 (closed-form
// arithmetic only).  Returns the resonant k, or nullopt.
std::optional<int> resonant_mode(const Params& P);
bool is_resonant(const Params& P);

struct Mu22 {
  double value;   // min_k |γ_{2,α} + λ_k|²
  int argmin_k;
};

// p = q = 2 weighted Rellich constant, closed form.
Mu22 mu22_closed_form(int n, double alpha);

}  // namespace rellich
