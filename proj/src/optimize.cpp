#include "rellich/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rellich/rng.hpp"

namespace rellich {

namespace {

// Pentadiagonal symmetric matrix in banded storage: b0 = diagonal,
// b1[i] = entry (i+1, i), b2[i] = entry (i+2, i).
struct Penta {
  std::vector<double> b0, b1, b2;
  std::size_t dim() const { return b0.size(); }

  std::vector<double> mul(const std::vector<double>& x) const {
    const std::size_t m = dim();
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      double v = b0[i] * x[i];
      if (i >= 1) v += b1[i - 1] * x[i - 1];
      if (i >= 2) v += b2[i - 2] * x[i - 2];
      if (i + 1 < m) v += b1[i] * x[i + 1];
      if (i + 2 < m) v += b2[i] * x[i + 2];
      y[i] = v;
    }
    return y;
  }
};

// Banded Cholesky K = G Gᵀ, bandwidth 2.
struct PentaChol {
  std::vector<double> g0, g1, g2;

  explicit PentaChol(const Penta& K) {
    const std::size_t m = K.dim();
    g0.assign(m, 0.0);
    g1.assign(m, 0.0);
    g2.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double d = K.b0[i];
      if (i >= 1) d -= g1[i - 1] * g1[i - 1];
      if (i >= 2) d -= g2[i - 2] * g2[i - 2];
      if (d <= 0.0)
        throw std::runtime_error("banded Cholesky: non-positive pivot at row " +
                                 std::to_string(i));
      g0[i] = std::sqrt(d);
      if (i + 1 < m) {
        double v = K.b1[i];
        if (i >= 1) v -= g2[i - 1] * g1[i - 1];
        g1[i] = v / g0[i];
      }
      if (i + 2 < m) g2[i] = K.b2[i] / g0[i];
    }
  }

  void solve(std::vector<double>& x) const {
    const std::size_t m = g0.size();
    for (std::size_t i = 0; i < m; ++i) {
      double v = x[i];
      if (i >= 1) v -= g1[i - 1] * x[i - 1];
      if (i >= 2) v -= g2[i - 2] * x[i - 2];
      x[i] = v / g0[i];
    }
    for (std::size_t i = m; i-- > 0;) {
      double v = x[i];
      if (i + 1 < m) v -= g1[i] * x[i + 1];
      if (i + 2 < m) v -= g2[i] * x[i + 2];
      x[i] = v / g0[i];
    }
  }
};

struct Stencil {
  double sub, dia, sup;  // L w|_t = sub·w_{t−1} + dia·w_t + sup·w_{t+1}
};

Stencil make_stencil(double h, double A, double c) {
  return {1.0 / (h * h) + A / h, -2.0 / (h * h) - c, 1.0 / (h * h) - A / h};
}

// K = LᵀML with L applied at EVERY grid node and the profile zero-padded
// outside the interior dofs.  The two boundary rows (nodes 0 and N−1, which
// see only the first/last dof through the off-diagonal stencil taps) are what
// make compact support effective: with plain one-layer Dirichlet rows the
// drifted operator admits an exponentially decaying quasi-null vector
// whenever both characteristic roots of w'' − 2Aw' − cw = 0 have the same
// sign, and K degenerates numerically.
Penta assemble_normal_matrix(const Stencil& st, const Grid1D& grid) {
  const std::size_t N = grid.size(), m = N - 2;
  Penta K;
  K.b0.assign(m, 0.0);
  K.b1.assign(m, 0.0);
  K.b2.assign(m, 0.0);
  for (std::size_t t = 0; t < N; ++t) {
    // Row at node t references nodes t−1, t, t+1; dof j sits at node j+1.
    struct Entry {
      std::size_t col;
      double v;
    } e[3];
    int ne = 0;
    if (t >= 2 && t <= m + 1) e[ne++] = {t - 2, st.sub};
    if (t >= 1 && t <= m) e[ne++] = {t - 1, st.dia};
    if (t <= m - 1) e[ne++] = {t, st.sup};
    for (int a = 0; a < ne; ++a)
      for (int b = a; b < ne; ++b) {
        const std::size_t lo = e[a].col, hi = e[b].col;
        const double v = grid.w[t] * e[a].v * e[b].v;
        switch (hi - lo) {
          case 0: K.b0[lo] += v; break;
          case 1: K.b1[lo] += v; break;
          default: K.b2[lo] += v; break;
        }
      }
  }
  return K;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_uniform_interior(const Grid1D& grid) {
  grid.validate();
  if (grid.h <= 0.0)
    throw std::invalid_argument("mode minimization requires a uniform axis grid");
}

}  // namespace

QuotientReport minimize_mode_p2(const SphericalMode& mode, const Params& P,
                                const Grid1D& grid) {
  if (P.p != 2.0 || P.q != 2.0)
    throw std::invalid_argument("minimize_mode_p2: requires p = 2, q = 2");
  require_uniform_interior(grid);
  const double S = 0.5 * (grid.hi() - grid.lo());
  if (S < 10.0)
    throw std::invalid_argument("minimize_mode_p2: grid span must be at least 10");

  const DerivedParams d = derive_params(P);
  const double c = d.gamma + mode.eigenvalue;
  const std::size_t N = grid.size(), m = N - 2;
  const Stencil st = make_stencil(grid.h, d.A, c);
  std::vector<double> M(m);
  for (std::size_t i = 0; i < m; ++i) M[i] = grid.w[i + 1];

  const Penta K = assemble_normal_matrix(st, grid);
  const PentaChol chol(K);

  // Deterministic symmetric start: reflected parameter pairs then produce
  // mirrored iterates, keeping the reflection identity at rounding level.
  const double mid = 0.5 * (grid.hi() + grid.lo());
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = (grid.s[i + 1] - mid) / (S / 3.0);
    x[i] = std::exp(-t * t);
  }

  auto m_norm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += M[i] * v[i] * v[i];
    return std::sqrt(s);
  };
  {
    const double nr = m_norm(x);
    for (auto& xi : x) xi /= nr;
  }

  const int max_iter = 10000;
  double theta = 0.0, theta_prev = 0.0;
  int iter = 0;
  std::vector<double> y(m);
  for (iter = 1; iter <= max_iter; ++iter) {
    for (std::size_t i = 0; i < m; ++i) y[i] = M[i] * x[i];
    chol.solve(y);
    // K y = M x exactly, so the Rayleigh quotient of the normalized iterate
    // is yᵀMx / ‖y‖_M² — no extra matrix apply needed.  The same identity
    // gives the iterate's residual for free: K x_new − θ M x_new ∝ Mx − θMy.
    double ymx = 0.0, ymy = 0.0, rr = 0.0, mm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ymx += y[i] * M[i] * x[i];
      ymy += y[i] * M[i] * y[i];
    }
    theta_prev = theta;
    theta = ymx / ymy;
    for (std::size_t i = 0; i < m; ++i) {
      const double mx = M[i] * x[i];
      const double r = mx - theta * M[i] * y[i];
      rr += r * r;
      mm += mx * mx;
    }
    const double rel_res = std::sqrt(rr / mm);
    const double nr = std::sqrt(ymy);
    for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / nr;
    // The Rayleigh value settles long before the vector does when the two
    // lowest eigenvalues nearly coincide, so either signal ends the loop.
    if (iter >= 5 &&
        (std::fabs(theta - theta_prev) <= 1e-11 * std::fabs(theta) || rel_res <= 1e-6))
      break;
  }

  const std::vector<double> Kx = K.mul(x);
  double res2 = 0.0, kx2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = Kx[i] - theta * M[i] * x[i];
    res2 += r * r;
    kx2 += Kx[i] * Kx[i];
  }
  const double residual = std::sqrt(res2 / kx2);
  if (iter > max_iter && residual > 1e-4)
    throw std::runtime_error(
        "minimize_mode_p2: inverse iteration left relative residual " +
        std::to_string(residual) + " after 10000 steps");

  QuotientReport rep;
  rep.numerator = theta;
  rep.denominator = 1.0;
  rep.quotient = theta;
  rep.mode = mode;
  rep.grid_span = S;
  rep.grid_points = static_cast<int>(N);
  rep.method = QuotientReport::Method::eigen;
  rep.iterations = iter;
  rep.residual = residual;
  return rep;
}

// ---------------------------------------------------------------- general p

GeneralObjective::GeneralObjective(const SphericalMode& mode, const Params& P,
                                   const Grid1D& grid) {
  validate(P);
  require_uniform_interior(grid);
  const DerivedParams d = derive_params(P);
  m_ = grid.size() - 2;
  h_ = grid.h;
  A_ = d.A;
  c_ = d.gamma + mode.eigenvalue;
  p_ = P.p;
  q_ = P.q;
  M_.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) M_[i] = grid.w[i + 1];
  W_ = grid.w;
}

std::vector<double> GeneralObjective::apply_op(const std::vector<double>& w) const {
  if (w.size() != m_) throw std::invalid_argument("GeneralObjective: dof size mismatch");
  const Stencil st = make_stencil(h_, A_, c_);
  // Stencil at every node, zero padding outside the dofs: node t references
  // dofs t−2, t−1, t (dof j sits at node j+1).
  std::vector<double> L(m_ + 2);
  for (std::size_t t = 0; t < m_ + 2; ++t) {
    double v = 0.0;
    if (t >= 2 && t <= m_ + 1) v += st.sub * w[t - 2];
    if (t >= 1 && t <= m_) v += st.dia * w[t - 1];
    if (t <= m_ - 1) v += st.sup * w[t];
    L[t] = v;
  }
  return L;
}

double GeneralObjective::eval(const std::vector<double>& w) const {
  const std::vector<double> L = apply_op(w);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < m_ + 2; ++t) num += W_[t] * std::pow(std::fabs(L[t]), p_);
  for (std::size_t i = 0; i < m_; ++i) den += M_[i] * std::pow(std::fabs(w[i]), q_);
  if (den <= 0.0)
    throw std::invalid_argument("GeneralObjective: zero profile (denominator vanishes)");
  const double F = num * std::pow(den, -p_ / q_);
  if (!std::isfinite(F))
    throw std::runtime_error("GeneralObjective: non-finite objective (num = " +
                             std::to_string(num) + ", den = " + std::to_string(den) +
                             ", p = " + std::to_string(p_) + ")");
  return F;
}

std::vector<double> GeneralObjective::grad(const std::vector<double>& w) const {
  const std::vector<double> L = apply_op(w);
  double num = 0.0, den = 0.0;
  std::vector<double> psi(m_ + 2);
  for (std::size_t t = 0; t < m_ + 2; ++t) {
    const double a = std::fabs(L[t]);
    num += W_[t] * std::pow(a, p_);
    psi[t] = (L[t] == 0.0) ? 0.0
                           : W_[t] * p_ * std::pow(a, p_ - 1.0) * (L[t] > 0 ? 1.0 : -1.0);
  }
  for (std::size_t i = 0; i < m_; ++i) den += M_[i] * std::pow(std::fabs(w[i]), q_);
  if (den <= 0.0)
    throw std::invalid_argument("GeneralObjective: zero profile (denominator vanishes)");
  const Stencil st = make_stencil(h_, A_, c_);
  const double dp = std::pow(den, -p_ / q_);
  const double coef = (p_ / q_) * num * std::pow(den, -p_ / q_ - 1.0);
  std::vector<double> g(m_);
  for (std::size_t j = 0; j < m_; ++j) {
    // Column j of L: rows t = j (sup), j+1 (dia), j+2 (sub).
    const double lt = st.sup * psi[j] + st.dia * psi[j + 1] + st.sub * psi[j + 2];
    const double aw = std::fabs(w[j]);
    const double gden =
        (w[j] == 0.0) ? 0.0
                      : M_[j] * q_ * std::pow(aw, q_ - 1.0) * (w[j] > 0 ? 1.0 : -1.0);
    g[j] = lt * dp - coef * gden;
  }
  return g;
}

QuotientReport minimize_mode_general(const SphericalMode& mode, const Params& P,
                                     const Grid1D& grid, unsigned long long seed,
                                     std::vector<double>* objective_log) {
  const GeneralObjective obj(mode, P, grid);
  const std::size_t m = obj.dim();
  const double lo = grid.lo(), hi = grid.hi();
  const double S = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  Rng rng(seed);

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_w;
  std::vector<double> best_log;
  int total_accepted = 0;

  for (int restart = 0; restart < 5; ++restart) {
    const double center = restart == 0 ? mid : rng.uniform(mid - 0.5 * S, mid + 0.5 * S);
    const double width = restart == 0 ? S / 8.0 : rng.uniform(S / 20.0, S / 5.0);
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = (grid.s[i + 1] - center) / width;
      w[i] = std::exp(-t * t);
    }
    {
      // Start every restart at unit q-mass; the objective is scale-invariant
      // (degree-0 homogeneous), so iterates drift from this scale only at
      // second order and no further projection is needed.
      double den = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        den += obj.mass()[i] * std::pow(std::fabs(w[i]), P.q);
      const double scale = std::pow(den, -1.0 / P.q);
      for (auto& wi : w) wi *= scale;
    }

    double F = obj.eval(w);
    std::vector<double> log{F};
    std::vector<double> g = obj.grad(w);
    double gg = dot(g, g);
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = -g[i];
    bool steepest = true;
    double prev_step = 1.0;
    int stall = 0;

    for (int it = 0; it < 4000; ++it) {
      if (std::sqrt(gg) <= 1e-12 * std::max(1.0, F)) break;
      double slope = dot(g, d);
      if (slope >= 0.0) {
        // Conjugacy lost its descent property: fall back to steepest descent.
        for (std::size_t i = 0; i < m; ++i) d[i] = -g[i];
        slope = -gg;
        steepest = true;
      }
      double step = std::min(1.0, 4.0 * prev_step);
      bool accepted = false;
      while (step >= 1e-14) {
        std::vector<double> trial(m);
        for (std::size_t i = 0; i < m; ++i) trial[i] = w[i] + step * d[i];
        double Ft;
        try {
          Ft = obj.eval(trial);
        } catch (const std::invalid_argument&) {
          step *= 0.5;  // stepped onto the zero profile
          continue;
        }
        if (Ft <= F + 1e-4 * step * slope) {
          w = std::move(trial);
          if (F - Ft <= 1e-14 * std::max(1.0, F))
            ++stall;
          else
            stall = 0;
          F = Ft;
          log.push_back(F);
          ++total_accepted;
          prev_step = step;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        if (steepest) break;  // no progress even along −g: converged
        for (std::size_t i = 0; i < m; ++i) d[i] = -g[i];
        steepest = true;
        continue;
      }
      if (stall >= 25) break;
      const std::vector<double> gn = obj.grad(w);
      double ggn = 0.0, gng = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        ggn += gn[i] * gn[i];
        gng += gn[i] * g[i];
      }
      const double beta = std::max(0.0, (ggn - gng) / gg);  // Polak–Ribière+
      for (std::size_t i = 0; i < m; ++i) d[i] = beta * d[i] - gn[i];
      steepest = (beta == 0.0);
      g = gn;
      gg = ggn;
    }

    if (F < best) {
      best = F;
      best_w = w;
      best_log = std::move(log);
    }
  }

  if (objective_log) *objective_log = best_log;

  const std::vector<double> L = obj.apply_op(best_w);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < m + 2; ++t)
    num += grid.w[t] * std::pow(std::fabs(L[t]), P.p);
  for (std::size_t i = 0; i < m; ++i)
    den += obj.mass()[i] * std::pow(std::fabs(best_w[i]), P.q);

  QuotientReport rep;
  rep.numerator = num;
  rep.denominator = den;
  rep.quotient = num * std::pow(den, -P.p / P.q);
  rep.mode = mode;
  rep.grid_span = S;
  rep.grid_points = static_cast<int>(grid.size());
  rep.method = QuotientReport::Method::gradient;
  rep.iterations = total_accepted;
  return rep;
}

// ---------------------------------------------------------------- estimates

ConstantEstimate estimate_constant(const Params& P, ConstantEstimate::Kind kind,
                                   int k_max, const Grid1D& grid,
                                   bool with_half_span_check) {
  validate(P);
  const DerivedParams d = derive_params(P);
  if (k_max < 0) {
    const double bound = std::fabs(d.gamma) + 4.0 * d.A * d.A + 10.0;
    k_max = 0;
    while (sphere_eigenvalue(k_max, P.n) <= bound) ++k_max;
  }

  const bool p2q2 = (P.p == 2.0 && P.q == 2.0);

  // Mode order: ascending symbol value so the lower-bound prune can skip
  // modes that cannot attain the minimum.
  std::vector<int> order(k_max + 1);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sym(k_max + 1, 0.0);
  if (p2q2) {
    for (int k = 0; k <= k_max; ++k)
      sym[k] = symbol_infimum(d.A, d.gamma + sphere_eigenvalue(k, P.n)).value;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return sym[a] < sym[b]; });
  }

  ConstantEstimate est;
  est.kind = kind;
  est.per_mode.resize(k_max + 1);
  double best = std::numeric_limits<double>::infinity();
  for (int idx = 0; idx <= k_max; ++idx) {
    const int k = order[idx];
    const SphericalMode mode = SphericalMode::harmonic(k, P.n);
    if (p2q2) {
      if (sym[k] > best + 1e-6) {
        // Discrete quotient is bounded below by the symbol value (up to
        // quadrature noise), so this mode cannot improve the minimum.
        QuotientReport rep;
        rep.numerator = sym[k];
        rep.denominator = 1.0;
        rep.quotient = sym[k];
        rep.mode = mode;
        rep.grid_span = 0.5 * (grid.hi() - grid.lo());
        rep.grid_points = static_cast<int>(grid.size());
        rep.method = QuotientReport::Method::symbol;
        est.per_mode[k] = rep;
      } else {
        est.per_mode[k] = minimize_mode_p2(mode, P, grid);
      }
    } else {
      est.per_mode[k] =
          minimize_mode_general(mode, P, grid, 0x9000ULL + static_cast<unsigned>(k));
    }
    best = std::min(best, est.per_mode[k].quotient);
  }
  est.value = best;
  // The reported value is always the discrete minimum: a converged eigen
  // value for p = 2, q = 2, otherwise a descent upper bound.  exact_symbol
  // is reserved for symbol-method per-mode rows, never the assembled value.
  est.exactness = p2q2 ? ConstantEstimate::Exactness::eigen_converged
                       : ConstantEstimate::Exactness::upper_bound;
  if (p2q2) {
    est.symbol_value = mu2_symbol_oracle(P.n, P.alpha).value;
    est.closed_form_value = mu22_closed_form(P.n, P.alpha).value;
  }

  if (with_half_span_check && grid.size() >= 34) {
    Grid1D half = Grid1D::uniform(0.5 * grid.lo(), 0.5 * grid.hi(),
                                  static_cast<int>(grid.size()) / 2);
    const ConstantEstimate he = estimate_constant(P, kind, k_max, half, false);
    est.value_half_span = he.value;
    est.span_difference = std::fabs(est.value - he.value);
  }
  return est;
}

}  // namespace rellich
