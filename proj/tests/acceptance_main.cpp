// Acceptance gate.  Every release criterion below runs at its pinned
// tolerance and prints exactly one verdict line; indented notes carry the
// measured numbers for anything that needs explaining.  The binary exits
// nonzero if any criterion fails — failures are printed with the evidence,
// never silently relaxed.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "rellich/annulus.hpp"
#include "rellich/cylinder.hpp"
#include "rellich/families.hpp"
#include "rellich/grid.hpp"
#include "rellich/harness.hpp"
#include "rellich/modes.hpp"
#include "rellich/optimize.hpp"
#include "rellich/params.hpp"
#include "rellich/rng.hpp"

namespace {

using namespace rellich;

// ---- pinned tolerances ----------------------------------------------------
constexpr double kMuRelTol = 2e-3;        // discrete vs symbol, S = 40, N = 4096
constexpr double kResonantMuMax = 1e-2;   // resonance classification threshold
constexpr double kSharpnessRel = 1e-2;    // sharpness quotient vs γ^p at ε = 1e−3
constexpr double kSlopeTol = 0.05;        // fitted degeneration rates
constexpr double kGapTol = 1e-5;          // norm-identity rel_gap at N = 2048
constexpr double kGapShrink = 3.0;        // required gap reduction per h/2
constexpr double kSlackFloor = -1e-8;     // inequality-suite relative slack
constexpr double kFlipTol = 1e-9;         // estimate at α vs 2α*−α
constexpr double kReflectTol = 1e-12;     // reflected-hat quotient identity
constexpr double kAnnulusTol = 1e-8;      // n = 3 constant-source closed form
constexpr double kGradRelTol = 1e-5;      // analytic vs central-difference gradient
constexpr double kCapAngleTol = 1e-8;     // cap half-angles
constexpr double kCapRayleighTol = 1e-6;  // cap Rayleigh re-check

std::string fmt(const char* f, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return std::string(buf);
}

struct Verdict {
  int id = 0;
  std::string label;
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The shared α-grid: 0.25 steps over [3−n, n+5] (p = 2 throughout).
std::vector<double> alpha_grid(int n) {
  std::vector<double> out;
  for (double a = 3.0 - n; a <= n + 5.0 + 1e-9; a += 0.25) out.push_back(a);
  return out;
}

const std::map<int, std::vector<double>>& resonant_alphas() {
  // Exact integer roots of −γ_{2,α} = k(n−2+k) inside [3−n, n+5].
  static const std::map<int, std::vector<double>> table = {
      {3, {1, 3, 5, 7}},
      {4, {0, 4, 6, 8}},
      {5, {-1, 5, 7, 9}},
      {7, {-3, 7, 9, 11}},
  };
  return table;
}

// ---- 1: closed form vs discrete estimates at the pinned window -------------
void closed_form_agreement(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid1D grid = Grid1D::uniform(-40.0, 40.0, 4096);

  struct Row {
    int n = 0;
    double alpha = 0, est = 0, sym = 0, rel = 0;
  };
  int rows = 0, reported = 0;
  std::vector<Row> over_nonres, over_res;
  std::map<int, Row> worst_by_n;  // worst non-resonant row per dimension

  for (int n : {3, 4, 5, 7}) {
    for (double alpha : alpha_grid(n)) {
      const Params P{n, 2.0, 2.0, alpha};
      const SymbolOracle oracle = mu2_symbol_oracle(n, alpha);
      ++rows;
      if (!oracle.matches_closed_form) {
        ++reported;  // reported, not gated: no closed-form target to compare
        v.notes.push_back(fmt("reported only: symbol %.9e disagrees with closed form %.9e at n=%d alpha=%.2f",
                              oracle.value, mu22_closed_form(n, alpha).value, n, alpha));
        continue;
      }
      const ConstantEstimate est =
          estimate_constant(P, ConstantEstimate::Kind::mu, -1, grid, false);
      const double rel =
          std::fabs(est.value - oracle.value) / std::max(std::fabs(oracle.value), 1e-300);
      const Row row{n, alpha, est.value, oracle.value, rel};
      if (is_resonant(P)) {
        if (rel > kMuRelTol) over_res.push_back(row);
      } else {
        if (rel > kMuRelTol) over_nonres.push_back(row);
        auto it = worst_by_n.find(n);
        if (it == worst_by_n.end() || rel > it->second.rel) worst_by_n[n] = row;
      }
    }
  }

  const double secs = seconds_since(t0);
  v.pass = over_nonres.empty() && over_res.empty() && reported == 0 && secs < 120.0;
  v.detail = fmt("%d rows in %.1fs; %zu non-resonant and %zu resonant rows exceed %.0e relative",
                 rows, secs, over_nonres.size(), over_res.size(), kMuRelTol);

  if (!over_nonres.empty()) {
    const Row w = *std::max_element(over_nonres.begin(), over_nonres.end(),
                                    [](const Row& a, const Row& b) { return a.rel < b.rel; });
    v.notes.push_back(fmt("worst non-resonant row: n=%d alpha=%.2f est=%.8f symbol=%.8f rel=%.2e",
                          w.n, w.alpha, w.est, w.sym, w.rel));
    v.notes.push_back(
        "the gap is window truncation, not solver error: the Dirichlet ground frequency "
        "pi/(2S) lifts every mode by ~(2c+4A^2)(pi/2S)^2 above its symbol minimum, which at "
        "S=40 is a few 1e-3 relative on every row of this family");
    // Non-gating diagnostic: quadrupling the span shrinks the lift by 64x.
    const Grid1D wide = Grid1D::uniform(-320.0, 320.0, 32768);
    for (const auto& [n, w40] : worst_by_n) {
      const Params P{n, 2.0, 2.0, w40.alpha};
      const ConstantEstimate e320 =
          estimate_constant(P, ConstantEstimate::Kind::mu, -1, wide, false);
      const double rel320 = std::fabs(e320.value - w40.sym) / std::max(std::fabs(w40.sym), 1e-300);
      v.notes.push_back(fmt("diagnostic (not gated): n=%d alpha=%.2f rel %.2e at S=40 -> %.2e at S=320",
                            n, w40.alpha, w40.rel, rel320));
    }
  }
  if (!over_res.empty())
    v.notes.push_back(fmt("%zu resonant rows have symbol value 0: no positive discrete value can "
                          "meet a relative tolerance against 0; their classification is the "
                          "dedicated resonance check below",
                          over_res.size()));
}

// ---- 2: resonance classification -------------------------------------------
void resonance_classification(Verdict& v) {
  const Grid1D fine = Grid1D::uniform(-160.0, 160.0, 16384);
  bool ok = true;
  double worst_resonant = 0.0, floor_nonres = 1e300;

  for (int n : {3, 4, 5, 7}) {
    std::vector<double> predicted, discrete;
    for (double alpha : alpha_grid(n)) {
      const Params P{n, 2.0, 2.0, alpha};
      const bool res = is_resonant(P);
      if (res) predicted.push_back(alpha);
      const double est =
          estimate_constant(P, ConstantEstimate::Kind::mu, -1, fine, false).value;
      if (est < kResonantMuMax) discrete.push_back(alpha);
      if (res)
        worst_resonant = std::max(worst_resonant, est);
      else
        floor_nonres = std::min(floor_nonres, est);
    }
    if (predicted != resonant_alphas().at(n)) {
      ok = false;
      v.notes.push_back(fmt("n=%d: resonance predicate does not hit the exact roots", n));
    }
    if (discrete != predicted) {
      ok = false;
      v.notes.push_back(fmt("n=%d: {alpha : mu_discrete < %.0e} differs from the predicate set",
                            n, kResonantMuMax));
    }
  }

  // At every resonant α the discrete value decreases monotonically in the span.
  const double spans[3] = {20.0, 40.0, 80.0};
  const int points[3] = {2048, 4096, 8192};
  for (int n : {3, 4, 5, 7}) {
    for (double alpha : resonant_alphas().at(n)) {
      const Params P{n, 2.0, 2.0, alpha};
      double prev = 1e300;
      for (int i = 0; i < 3; ++i) {
        const Grid1D g = Grid1D::uniform(-spans[i], spans[i], points[i]);
        const double est = estimate_constant(P, ConstantEstimate::Kind::mu, -1, g, false).value;
        if (!(est > 0.0) || !(est < prev)) {
          ok = false;
          v.notes.push_back(fmt("n=%d alpha=%.0f: value %.3e at S=%.0f does not decrease (prev %.3e)",
                                n, alpha, est, spans[i], prev));
        }
        prev = est;
      }
    }
  }

  v.pass = ok;
  v.detail = fmt("resonant max %.2e < %.0e, non-resonant min %.2e (S=160); span ladders decrease",
                 worst_resonant, kResonantMuMax, floor_nonres);
}

// ---- 3: radial sharpness limit ---------------------------------------------
void sharpness_limit(Verdict& v) {
  const ProfileOmega omega = ProfileOmega::canonical();
  struct Row {
    int n;
    double p, alpha;
  };
  bool ok = true;
  std::string parts;
  for (const Row r : {Row{5, 2.0, 0.0}, Row{5, 2.0, 3.0}, Row{4, 3.0, 2.0}, Row{6, 1.5, 1.0}}) {
    const Params P{r.n, r.p, r.p, r.alpha};
    const double target = std::pow(derive_params(P).gamma, r.p);
    const double q = mitidieri_sharpness_quotient(omega, 1e-3, P);
    // "within 1%": relative to γ^p, absolute when the limit itself is 0.
    const bool pass = target > 1e-12 ? std::fabs(q - target) <= kSharpnessRel * target
                                     : std::fabs(q) <= kSharpnessRel;
    ok = ok && pass;
    const double dev = target > 1e-12 ? std::fabs(q - target) / target : std::fabs(q);
    parts += fmt("%s(%d,%.2g,%g): %.2e", parts.empty() ? "" : "  ", r.n, r.p, r.alpha, dev);
    if (!pass)
      v.notes.push_back(fmt("n=%d p=%.2g alpha=%g: quotient %.8f vs gamma^p %.8f", r.n, r.p,
                            r.alpha, q, target));
  }
  v.pass = ok;
  v.detail = "deviation at eps=1e-3: " + parts;
}

// ---- 4: degeneration rates --------------------------------------------------
void degeneration_rates(Verdict& v) {
  std::vector<double> ladder;
  for (int k = 4; k <= 11; ++k) ladder.push_back(std::ldexp(1.0, -k));
  const ProfileOmega omega = ProfileOmega::canonical();

  bool ok = true;
  std::string parts;
  auto gate = [&](const char* name, const RateFit& fit, double target) {
    const bool pass = std::fabs(fit.slope - target) <= kSlopeTol;
    ok = ok && pass;
    parts += fmt("%s%s %.3f/%.2g", parts.empty() ? "" : "  ", name, fit.slope, target);
    if (!pass)
      v.notes.push_back(fmt("%s: slope %.4f (target %.2f +/- %.2f, r^2 %.6f)", name, fit.slope,
                            target, kSlopeTol, fit.r_squared));
  };

  {
    const Params P{5, 2.0, 2.0, 7.0};
    std::vector<double> vals;
    for (double e : ladder) vals.push_back(resonance_family_bound(omega, e, P, 1));
    gate("res(5,2)", fit_rate(ladder, vals), P.p);
  }
  {
    const Params P{4, 3.0, 3.0, 8.0};
    std::vector<double> vals;
    for (double e : ladder) vals.push_back(resonance_family_bound(omega, e, P, 0));
    gate("res(4,3)", fit_rate(ladder, vals), P.p);
  }
  {
    const Params P{3, 2.0, 2.0, 6.0};
    const SphericalMode cap = cap_for_eigenvalue(3, -derive_params(P).gamma);
    std::vector<double> vals;
    for (double e : ladder) vals.push_back(navier_degeneration_quotient(omega, e, P, cap));
    gate("nav(3,2,2)", fit_rate(ladder, vals), P.p - 1.0 + P.p / P.q);
  }
  {
    const Params P{3, 2.0, 4.0, 6.0};
    const SphericalMode cap = cap_for_eigenvalue(3, -derive_params(P).gamma);
    std::vector<double> vals;
    for (double e : ladder) vals.push_back(navier_degeneration_quotient(omega, e, P, cap));
    gate("nav(3,2,4)", fit_rate(ladder, vals), P.p - 1.0 + P.p / P.q);
  }

  v.pass = ok;
  v.detail = "fitted/target: " + parts;
}

// ---- 5: norm identities under the change of variables ------------------------
void norm_identities(Verdict& v) {
  struct Triple {
    int n;
    double p, alpha;
    std::vector<int> modes;
  };
  const std::vector<Triple> triples = {
      {4, 2.0, 0.0, {0, 1, 2}},
      {5, 2.0, 3.0, {0, 1, 2}},
      {3, 2.0, 1.0, {0, 1, 2}},
      {5, 3.0, 2.0, {0}},  // p != 2 separates per mode: radial family
  };
  const Grid1D coarse = Grid1D::uniform(-40.0, 40.0, 2048);
  const Grid1D fine = Grid1D::uniform(-40.0, 40.0, 4095);  // exactly h/2

  bool ok = true;
  std::string parts;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const Triple& t = triples[i];
    const Params P{t.n, t.p, t.p, t.alpha};
    SampleSpec spec;
    spec.seed = 500 + i;
    spec.n = t.n;
    spec.modes = t.modes;
    spec.count = 100;
    // widths >= 3 keep every bump above the 64-node support floor of the
    // norm evaluator at this h
    spec.width_lo = 3.0;
    spec.width_hi = 6.0;

    auto worst_gap = [&](const Grid1D& g) {
      double worst = 0.0;
      for (const CylinderFunction& s : generate_samples(spec, g)) {
        const SecondOrderNorms so = second_order_norms(s, P);
        const FirstOrderNorms fo = first_order_norms(s, t.alpha, P);
        worst = std::max({worst, so.op.rel_gap, so.mass.rel_gap, fo.grad.rel_gap,
                          fo.mass.rel_gap});
      }
      return worst;
    };
    const double wc = worst_gap(coarse);
    const double wf = worst_gap(fine);
    const double shrink = wf > 0.0 ? wc / wf : 1e300;
    const bool pass = wc < kGapTol && shrink >= kGapShrink;
    ok = ok && pass;
    parts += fmt("%s(%d,%.2g,%g): %.1e/%.1fx", parts.empty() ? "" : "  ", t.n, t.p, t.alpha, wc,
                 std::min(shrink, 999.0));
    if (!pass)
      v.notes.push_back(fmt("n=%d p=%.2g alpha=%g: worst gap %.3e at N=2048, %.3e at h/2 (x%.2f)",
                            t.n, t.p, t.alpha, wc, wf, shrink));
  }
  v.pass = ok;
  v.detail = "worst rel_gap / halving factor: " + parts;
}

// ---- 6: inequality suites ----------------------------------------------------
void inequality_suites(Verdict& v) {
  const Grid1D grid = Grid1D::uniform(0.0, 40.0, 2048);
  struct Run {
    Suite suite;
    Params P;
    unsigned long long seed;
  };
  const std::vector<Run> runs = {
      {Suite::hardy, Params{5, 2.0, 2.0, 0.0}, 601},
      {Suite::rellich, Params{5, 2.0, 2.0, 1.0}, 602},
      {Suite::improved_log, Params{5, 2.0, 2.0, 4.0}, 603},
  };
  bool ok = true;
  std::string parts;
  for (const Run& r : runs) {
    SampleSpec spec;
    spec.seed = r.seed;
    spec.n = r.P.n;
    spec.modes = {0, 1, 2};
    spec.count = 1000;
    const SuiteReport rep = verify_inequalities(generate_samples(spec, grid), r.P, r.suite);
    const bool pass = rep.violations == 0 && rep.min_slack >= kSlackFloor;
    ok = ok && pass;
    parts += fmt("%s%s: %d viol, slack %.1e", parts.empty() ? "" : "  ",
                 suite_name(r.suite).c_str(), rep.violations, rep.min_slack);
    if (!pass)
      v.notes.push_back(fmt("%s (n=%d alpha=%g): %d violations, min slack %.3e",
                            suite_name(r.suite).c_str(), r.P.n, r.P.alpha, rep.violations,
                            rep.min_slack));
  }
  v.pass = ok;
  v.detail = "1000 samples each: " + parts;
}

// ---- 7: weight-flip symmetry ---------------------------------------------------
void weight_flip_symmetry(Verdict& v) {
  const Grid1D grid = Grid1D::uniform(-40.0, 40.0, 4096);
  double worst_flip = 0.0;
  for (double alpha : {0.0, 1.0}) {
    const double a =
        estimate_constant(Params{5, 2.0, 2.0, alpha}, ConstantEstimate::Kind::mu, -1, grid, false)
            .value;
    const double b = estimate_constant(Params{5, 2.0, 2.0, 4.0 - alpha},
                                       ConstantEstimate::Kind::mu, -1, grid, false)
                         .value;
    worst_flip = std::max(worst_flip, std::fabs(a - b));
  }

  SampleSpec spec;
  spec.seed = 71;
  spec.n = 5;
  spec.modes = {0, 1};
  spec.count = 1;
  const CylinderFunction g = generate_samples(spec, Grid1D::uniform(-40.0, 40.0, 2048)).front();
  const Params P{5, 2.0, 2.0, 3.0};
  const SecondOrderNorms before = second_order_norms(g, P);
  const auto [gh, Ph] = reflect_and_hat(g, P);
  const SecondOrderNorms after = second_order_norms(gh, Ph);
  const double r0 = before.op.cylinder / before.mass.cylinder;
  const double r1 = after.op.cylinder / after.mass.cylinder;
  const double refl = std::fabs(r0 - r1) / std::max(1.0, std::fabs(r0));

  v.pass = worst_flip <= kFlipTol && refl <= kReflectTol;
  v.detail = fmt("estimate(alpha) vs estimate(2a*-alpha): %.2e; reflected-hat quotient: %.2e",
                 worst_flip, refl);
  if (!v.pass && worst_flip > kFlipTol)
    v.notes.push_back(fmt("weight flip difference %.3e exceeds %.0e", worst_flip, kFlipTol));
  if (!v.pass && refl > kReflectTol)
    v.notes.push_back(fmt("reflected quotient difference %.3e exceeds %.0e", refl, kReflectTol));
}

// ---- 8: comparison principle on the annulus --------------------------------------
std::vector<double> random_bumps(Rng& rng, const Grid1D& grid, bool sign_changing) {
  const double lo = grid.lo(), hi = grid.hi();
  const double margin = 0.05 * (hi - lo);
  for (;;) {
    std::vector<double> u(grid.size(), 0.0);
    const int nb = rng.uniform_int(2, 4);
    for (int b = 0; b < nb; ++b) {
      const double l = rng.uniform(lo + margin, hi - 3.0 * margin);
      const double r = std::min(l + rng.uniform(0.15, 0.45) * (hi - lo), hi - margin);
      double amp = rng.uniform(0.3, 1.0);
      if (sign_changing && (b % 2 == 1)) amp = -amp;
      const double peak = std::pow((r - l) / 2.0, 6);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.s[i];
        if (x <= l || x >= r) continue;
        const double f = (x - l) * (r - x);
        u[i] += amp * f * f * f / peak;
      }
    }
    if (!sign_changing) return u;
    const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
    if (*mx > 1e-6 && *mn < -1e-6) return u;
  }
}

void comparison_principle(Verdict& v) {
  const Grid1D grid = Grid1D::uniform(0.5, 2.0, 1024);
  const Params P{5, 2.0, 2.0, 2.0};
  Rng rng(81);
  int bad = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> u = random_bumps(rng, grid, true);
    const ComparisonReport rep = comparison_check(grid, u, P);
    worst_gap = std::min(worst_gap, rep.min_gap);
    if (!rep.dominates || !rep.quotient_monotone) {
      ++bad;
      if (bad <= 3)
        v.notes.push_back(fmt("sample %d: dominates=%d monotone=%d min_gap=%.3e quotients %.6f/%.6f",
                              i, int(rep.dominates), int(rep.quotient_monotone), rep.min_gap,
                              rep.quotient_v, rep.quotient_u));
    }
  }

  // n = 3, f ≡ 1: v(r) = −r²/6 + 7/8 − 5/(12r) on [1/2, 2].
  AnnulusProblem prob;
  prob.n = 3;
  prob.R = 2.0;
  prob.grid = Grid1D::uniform(0.5, 2.0, 2048);
  prob.f.assign(prob.grid.size(), 1.0);
  const RadialSolution sol = solve_radial_annulus(prob);
  double closed_err = 0.0;
  for (std::size_t i = 0; i < prob.grid.size(); ++i) {
    const double r = prob.grid.s[i];
    const double exact = -r * r / 6.0 + 7.0 / 8.0 - 5.0 / (12.0 * r);
    closed_err = std::max(closed_err, std::fabs(sol.v[i] - exact));
  }

  // Weighted a-priori bound on 100 random nonnegative sources.
  const Params Ps{3, 2.0, 2.0, 2.0};
  Rng rng2(82);
  int stab_bad = 0;
  for (int i = 0; i < 100; ++i) {
    AnnulusProblem p2;
    p2.n = 3;
    p2.R = 2.0;
    p2.grid = grid;
    p2.f = random_bumps(rng2, grid, false);
    if (!weighted_stability_bound(p2, Ps).holds) ++stab_bad;
  }

  v.pass = bad == 0 && closed_err <= kAnnulusTol && stab_bad == 0;
  v.detail = fmt("%d/100 comparison failures (worst gap %.1e); closed form max err %.2e; "
                 "%d/100 stability failures",
                 bad, worst_gap, closed_err, stab_bad);
}

// ---- 9: gradient oracle and line search ---------------------------------------------
void gradient_oracle(Verdict& v) {
  struct Config {
    int n;
    double p, q, alpha;
    int k;
  };
  const std::vector<Config> configs = {
      {5, 3.0, 4.0, 2.0, 0}, {5, 3.0, 4.0, 2.0, 1}, {3, 2.5, 3.0, 1.0, 0},
      {4, 3.0, 3.0, 0.0, 2}, {6, 2.5, 2.5, 1.0, 1},
  };
  const Grid1D grid = Grid1D::uniform(-10.0, 10.0, 64);
  Rng rng(91);
  bool ok = true;
  double worst_rel = 0.0;
  for (const Config& c : configs) {
    const Params P{c.n, c.p, c.q, c.alpha};
    const GeneralObjective obj(SphericalMode::harmonic(c.k, c.n), P, grid);
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<double> w(obj.dim());
      for (double& x : w) x = rng.uniform(-1.0, 1.0);
      const std::vector<double> g = obj.grad(w);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double delta = 1e-6 * std::max(1.0, std::fabs(w[i]));
        const double keep = w[i];
        w[i] = keep + delta;
        const double fp = obj.eval(w);
        w[i] = keep - delta;
        const double fm = obj.eval(w);
        w[i] = keep;
        const double fd = (fp - fm) / (2.0 * delta);
        num += (fd - g[i]) * (fd - g[i]);
        den += g[i] * g[i];
      }
      const double rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
      worst_rel = std::max(worst_rel, rel);
      if (rel > kGradRelTol) {
        ok = false;
        v.notes.push_back(fmt("n=%d p=%.2g q=%.2g alpha=%g k=%d rep=%d: gradient rel err %.3e",
                              c.n, c.p, c.q, c.alpha, c.k, rep, rel));
      }
    }
  }

  // Every accepted line-search step must decrease the objective.
  struct LsRun {
    Params P;
    int k;
    Grid1D grid;
  };
  const std::vector<LsRun> ls = {
      {Params{5, 2.0, 3.0, 1.0}, 0, Grid1D::uniform(-15.0, 15.0, 256)},
      {Params{5, 3.0, 4.0, 0.0}, 0, Grid1D::uniform(-10.0, 10.0, 128)},
      {Params{4, 3.0, 3.0, 2.0}, 1, Grid1D::uniform(-10.0, 10.0, 128)},
  };
  int non_monotone = 0;
  for (const LsRun& r : ls) {
    std::vector<double> log;
    minimize_mode_general(SphericalMode::harmonic(r.k, r.P.n), r.P, r.grid, 7, &log);
    for (std::size_t i = 1; i < log.size(); ++i)
      if (log[i] > log[i - 1]) ++non_monotone;
  }
  if (non_monotone > 0) {
    ok = false;
    v.notes.push_back(fmt("%d objective-log increases across %zu descent runs", non_monotone,
                          ls.size()));
  }

  v.pass = ok;
  v.detail = fmt("20 profiles, worst gradient rel err %.2e; %zu descent logs monotone", worst_rel,
                 ls.size());
}

// ---- 10: spherical cap solver -----------------------------------------------------------
void cap_solver(Verdict& v) {
  bool ok = true;
  const SphericalMode hemi = cap_for_eigenvalue(3, 2.0);
  const SphericalMode deg2 = cap_for_eigenvalue(3, 6.0);
  const double half_pi = std::acos(0.0);
  const double theta2 = std::acos(1.0 / std::sqrt(3.0));
  if (std::fabs(hemi.theta0 - half_pi) > kCapAngleTol) {
    ok = false;
    v.notes.push_back(fmt("hemisphere half-angle %.12f vs pi/2 (err %.2e)", hemi.theta0,
                          std::fabs(hemi.theta0 - half_pi)));
  }
  if (std::fabs(deg2.theta0 - theta2) > kCapAngleTol) {
    ok = false;
    v.notes.push_back(fmt("n=3 nu=2 half-angle %.12f vs acos(1/sqrt(3)) (err %.2e)", deg2.theta0,
                          std::fabs(deg2.theta0 - theta2)));
  }

  double worst_rayleigh = 0.0;
  struct Target {
    int n;
    double mu;
  };
  for (const Target t : {Target{3, 2.0}, Target{3, 3.75}, Target{3, 6.0}, Target{5, 10.0}}) {
    const SphericalMode cap = cap_for_eigenvalue(t.n, t.mu);
    const double err = std::fabs(cap_rayleigh_quotient(cap) - t.mu) / std::max(1.0, t.mu);
    worst_rayleigh = std::max(worst_rayleigh, err);
    if (err > kCapRayleighTol) {
      ok = false;
      v.notes.push_back(fmt("n=%d mu=%g: Rayleigh re-check off by %.3e", t.n, t.mu, err));
    }
  }

  v.pass = ok;
  v.detail = fmt("half-angle errs %.1e/%.1e; worst Rayleigh err %.1e",
                 std::fabs(hemi.theta0 - half_pi), std::fabs(deg2.theta0 - theta2),
                 worst_rayleigh);
}

}  // namespace

int main() {
  const bool color = isatty(1) && std::getenv("NO_COLOR") == nullptr;
  const char* green = color ? "\x1b[32m" : "";
  const char* red = color ? "\x1b[31m" : "";
  const char* dim = color ? "\x1b[2m" : "";
  const char* reset = color ? "\x1b[0m" : "";

  struct Entry {
    int id;
    const char* label;
    void (*fn)(Verdict&);
  };
  const Entry entries[] = {
      {1, "closed-form vs discrete estimates (S=40)", closed_form_agreement},
      {2, "resonance classification", resonance_classification},
      {3, "radial sharpness limit", sharpness_limit},
      {4, "degeneration rates", degeneration_rates},
      {5, "norm identities under change of variables", norm_identities},
      {6, "inequality suites", inequality_suites},
      {7, "weight-flip symmetry", weight_flip_symmetry},
      {8, "comparison principle on the annulus", comparison_principle},
      {9, "gradient oracle and line search", gradient_oracle},
      {10, "spherical cap solver", cap_solver},
  };

  int failed = 0;
  for (const Entry& e : entries) {
    Verdict v;
    v.id = e.id;
    v.label = e.label;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.fn(v);
    } catch (const std::exception& ex) {
      v.pass = false;
      v.detail = std::string("exception: ") + ex.what();
    }
    const double secs = seconds_since(t0);
    if (!v.pass) ++failed;
    std::printf("%s[%s]%s %2d  %-44s %s%s(%.1fs)\n", v.pass ? green : red,
                v.pass ? "PASS" : "FAIL", reset, v.id, v.label.c_str(), v.detail.c_str(),
                v.detail.empty() ? "" : "  ", secs);
    for (const std::string& note : v.notes)
      std::printf("          %s%s%s\n", dim, note.c_str(), reset);
    std::fflush(stdout);
  }

  std::printf("\n%d/10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
