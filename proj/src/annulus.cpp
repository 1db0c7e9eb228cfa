#include "rellich/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rellich {

namespace {

double sphere_area(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

// Fourth-order first/second derivatives on a uniform grid; 5-point one-sided
// stencils at the two nodes next to each end (those drop to O(h³), which
// only ever feeds the source term, not the reported residual).
void differentiate(const std::vector<double>& v, double h, std::vector<double>& d1,
                   std::vector<double>& d2) {
  const std::size_t N = v.size();
  d1.assign(N, 0.0);
  d2.assign(N, 0.0);
  const double ih = 1.0 / (12.0 * h), ih2 = 1.0 / (12.0 * h * h);
  for (std::size_t i = 2; i + 2 < N; ++i) {
    d1[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) * ih;
    d2[i] = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1] - v[i - 2]) * ih2;
  }
  d1[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * ih;
  d1[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * ih;
  d2[0] = (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2] - 56.0 * v[3] + 11.0 * v[4]) * ih2;
  d2[1] = (11.0 * v[0] - 20.0 * v[1] + 6.0 * v[2] + 4.0 * v[3] - v[4]) * ih2;
  const std::size_t m = N - 1;
  d1[m] = (25.0 * v[m] - 48.0 * v[m - 1] + 36.0 * v[m - 2] - 16.0 * v[m - 3] +
           3.0 * v[m - 4]) * ih;
  d1[m - 1] = (3.0 * v[m] + 10.0 * v[m - 1] - 18.0 * v[m - 2] + 6.0 * v[m - 3] -
               v[m - 4]) * ih;
  d2[m] = (35.0 * v[m] - 104.0 * v[m - 1] + 114.0 * v[m - 2] - 56.0 * v[m - 3] +
           11.0 * v[m - 4]) * ih2;
  d2[m - 1] = (11.0 * v[m] - 20.0 * v[m - 1] + 6.0 * v[m - 2] + 4.0 * v[m - 3] -
               v[m - 4]) * ih2;
}

// ∫ r^{expo} |g|^pw dx over the annulus (trapezoid on the radial grid,
// surface measure included).
double weighted_norm(const Grid1D& grid, const std::vector<double>& g, double expo,
                     double pw, int n) {
  KahanSum acc;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc.add(grid.w[i] * std::pow(grid.s[i], expo + n - 1.0) *
            std::pow(std::abs(g[i]), pw));
  return sphere_area(n) * acc.value();
}

}  // namespace

void AnnulusProblem::validate() const {
  if (n < 3) throw std::invalid_argument("AnnulusProblem: n must be ≥ 3");
  if (!(R > 1.0))
    throw std::invalid_argument("AnnulusProblem: outer radius must exceed 1, got " +
                                std::to_string(R));
  grid.validate();
  if (!(grid.h > 0.0))
    throw std::invalid_argument("AnnulusProblem: solver needs a uniform radial grid");
  if (std::abs(grid.lo() - 1.0 / R) > 1e-10 || std::abs(grid.hi() - R) > 1e-10)
    throw std::invalid_argument("AnnulusProblem: grid must span [1/R, R]");
  if (f.size() != grid.size())
    throw std::invalid_argument("AnnulusProblem: source length does not match grid");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] < 0.0)
      throw std::invalid_argument("AnnulusProblem: negative source entry at node " +
                                  std::to_string(i));
}

RadialSolution solve_radial_annulus(const AnnulusProblem& prob) {
  prob.validate();
  const auto& r = prob.grid.s;
  const std::size_t N = r.size();
  const double n = prob.n;

  std::vector<double> fr(N);
  for (std::size_t i = 0; i < N; ++i) fr[i] = prob.f[i] * std::pow(r[i], n - 1.0);
  const std::vector<double> g = cumulative_integral(r, fr);

  std::vector<double> inv(N), invg(N);
  for (std::size_t i = 0; i < N; ++i) {
    inv[i] = std::pow(r[i], 1.0 - n);
    invg[i] = inv[i] * g[i];
  }
  const std::vector<double> i1 = cumulative_integral(r, inv);
  const std::vector<double> i2 = cumulative_integral(r, invg);

  // v = C·I1 − I2 vanishes at the inner radius by construction; C enforces
  // the outer boundary.
  const double C = i2.back() / i1.back();
  RadialSolution sol;
  sol.v.resize(N);
  for (std::size_t i = 0; i < N; ++i) sol.v[i] = C * i1[i] - i2[i];
  sol.boundary_defect = std::max(std::abs(sol.v.front()), std::abs(sol.v.back()));

  std::vector<double> d1, d2;
  differentiate(sol.v, prob.grid.h, d1, d2);
  double res = 0.0;
  for (std::size_t i = 2; i + 2 < N; ++i)
    res = std::max(res, std::abs(d2[i] + (n - 1.0) * d1[i] / r[i] + prob.f[i]));
  sol.residual = res;
  return sol;
}

ComparisonReport comparison_check(const Grid1D& grid, const std::vector<double>& u,
                                  const Params& P) {
  validate(P);
  grid.validate();
  if (!(grid.h > 0.0))
    throw std::invalid_argument("comparison_check: uniform radial grid required");
  if (u.size() != grid.size())
    throw std::invalid_argument("comparison_check: profile length does not match grid");
  const double R = grid.hi();
  if (!(R > 1.0) || std::abs(grid.lo() * R - 1.0) > 1e-10)
    throw std::invalid_argument("comparison_check: grid must span an annulus [1/R, R]");
  if (std::abs(u.front()) > 1e-10 || std::abs(u.back()) > 1e-10)
    throw std::invalid_argument(
        "comparison_check: u must vanish at both annulus boundaries");

  std::vector<double> d1, d2;
  differentiate(u, grid.h, d1, d2);
  AnnulusProblem prob;
  prob.n = P.n;
  prob.R = R;
  prob.grid = grid;
  prob.f.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    prob.f[i] = std::abs(d2[i] + (P.n - 1.0) * d1[i] / grid.s[i]);
  const RadialSolution sol = solve_radial_annulus(prob);

  const DerivedParams D = derive_params(P);
  ComparisonReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i)
    rep.min_gap = std::min(rep.min_gap, sol.v[i] - std::abs(u[i]));
  rep.dominates = rep.min_gap >= -1e-8;

  // |Δv| = f = |Δu| as arrays, so one numerator serves both quotients.
  rep.numerator = weighted_norm(grid, prob.f, P.alpha, P.p, P.n);
  rep.mass_u = weighted_norm(grid, u, -D.beta, P.q, P.n);
  rep.mass_v = weighted_norm(grid, sol.v, -D.beta, P.q, P.n);
  if (!(rep.mass_u > 0.0))
    throw std::invalid_argument("comparison_check: zero profile");
  rep.quotient_u = rep.numerator / std::pow(rep.mass_u, P.p / P.q);
  rep.quotient_v = rep.numerator / std::pow(rep.mass_v, P.p / P.q);
  rep.quotient_monotone = rep.quotient_v <= rep.quotient_u + 1e-8;
  return rep;
}

StabilityBound weighted_stability_bound(const AnnulusProblem& prob, const Params& P) {
  validate(P);
  prob.validate();
  const double lo = 2.0 * P.p - P.n, hi = P.n * P.p - P.n;
  if (!(P.alpha > lo && P.alpha < hi))
    throw std::invalid_argument(
        "weighted_stability_bound: requires 2p−n < alpha < np−n");
  const DerivedParams D = derive_params(P);
  const RadialSolution sol = solve_radial_annulus(prob);
  StabilityBound out;
  out.lhs = weighted_norm(prob.grid, sol.v, P.alpha - 2.0 * P.p, P.p, P.n);
  out.rhs = std::pow(D.gamma, -P.p) * weighted_norm(prob.grid, prob.f, P.alpha, P.p, P.n);
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

}  // namespace rellich
