#include "rellich/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rellich {

void validate(const Params& P) {
  if (P.n < 3)
    throw std::invalid_argument("Params: need n >= 3, got n = " + std::to_string(P.n));
  if (!(P.p > 1.0))
    throw std::invalid_argument("Params: need p > 1, got p = " + std::to_string(P.p));
  if (!(P.q >= P.p))
    throw std::invalid_argument("Params: need q >= p, got q = " + std::to_string(P.q) +
                                " < p = " + std::to_string(P.p));
}

DerivedParams derive_params(const Params& P) {
  validate(P);
  const double n = P.n, p = P.p, q = P.q, al = P.alpha;
  DerivedParams d{};
  d.beta = n - q * (n - 2.0 * p + al) / p;
  d.H2 = (n + al) / p - 2.0;
  d.gamma = d.H2 * (n - (n + al) / p);
  d.H1 = (n + (al - p)) / p - 1.0;
  d.A = (n + 2.0) / 2.0 - (n + al) / p;
  d.alpha_star = p + n * (p - 2.0) / 2.0;
  if (n > 2.0 * p) d.p_crit = n * p / (n - 2.0 * p);
  if (p == 2.0) {
    const double h = (n - 2.0) / 2.0, g = (al + 2.0) / 2.0;
    d.gamma_bar = h * h + g * g;
  }
  return d;
}

double hardy_exponent(const Params& P, double a) {
  validate(P);
  return (P.n + a) / P.p - 1.0;
}

double sphere_eigenvalue(int k, int n) {
  if (k < 0) throw std::invalid_argument("sphere_eigenvalue: k must be >= 0");
  if (n < 3) throw std::invalid_argument("sphere_eigenvalue: n must be >= 3");
  return static_cast<double>(k) * (n - 2.0 + k);
}

std::optional<int> resonant_mode(const Params& P) {
  const double gamma = derive_params(P).gamma;
  // Roots of k² + (n−2)k + γ = 0; explicit test instead of a scan so large-k
  // resonances cannot be missed.
  const double nm2 = P.n - 2.0;
  const double disc = nm2 * nm2 - 4.0 * gamma;
  if (disc < 0.0) return std::nullopt;
  const double kroot = 0.5 * (-nm2 + std::sqrt(disc));
  if (kroot < -0.5) return std::nullopt;
  const int k = static_cast<int>(std::lround(kroot));
  if (k < 0) return std::nullopt;
  const double resid = std::fabs(gamma + sphere_eigenvalue(k, P.n));
  const double tol = 1e-12 * std::max(1.0, std::fabs(gamma));
  return resid <= tol ? std::optional<int>(k) : std::nullopt;
}

bool is_resonant(const Params& P) { return resonant_mode(P).has_value(); }

Mu22 mu22_closed_form(int n, double alpha) {
  Params P{n, 2.0, 2.0, alpha};
  const double gamma = derive_params(P).gamma;
  // λ_k increases monotonically, so |γ + λ_k| is eventually increasing;
  // stop once λ_k > |γ| + 1 past the last improvement.
  Mu22 best{0.0, -1};
  double best_v = std::numeric_limits<double>::infinity();
  for (int k = 0;; ++k) {
    const double lam = sphere_eigenvalue(k, n);
    const double v = std::fabs(gamma + lam);
    if (v < best_v) {
      best_v = v;
      best = {v * v, k};
    }
    if (lam > std::fabs(gamma) + 1.0 && k > best.argmin_k) break;
  }
  return best;
}

}  // namespace rellich
