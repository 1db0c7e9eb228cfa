// rsharp: sharp constants, degeneration rates and inequality suites for the
// weighted second-order Hardy–Rellich family, reduced to 1-D quadrature.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 usage/parameter error.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rellich/annulus.hpp"
#include "rellich/families.hpp"
#include "rellich/harness.hpp"
#include "rellich/optimize.hpp"
#include "rellich/rng.hpp"

using nlohmann::json;
using namespace rellich;

namespace {

struct Opts {
  int n = 5;
  double p = 2.0, q = 2.0, alpha = 0.0;
  std::vector<int> modes = {0, 1, 2};
  double grid_span = 40.0;
  int grid_points = 4096;
  std::vector<double> eps_ladder;
  unsigned long long seed = 1;
  std::string format = "json";
  std::string out, compare_to;
  std::string suite = "rellich";
  std::string family = "auto";
  int samples = 100;
  int k_max = -1;
  double R = 2.0;
  // tolerances (defaults as stated per module)
  double mu_tol = 2e-3;        // discrete eigenvalue vs symbol, relative
  double res_mu_max = 1e-2;    // discrete value at resonant weights, absolute
  double rate_tol = 0.05;      // fitted slope vs target
  double sharp_tol = 1e-2;     // sharpness family limit vs γ^p, relative
  double slack_tol = 1e-8;     // inequality slack, relative
};

bool color_enabled() { return ::isatty(1) && std::getenv("NO_COLOR") == nullptr; }

void print_check(const std::string& name, bool ok, double value, double target,
                 double tol) {
  const char* tag = ok ? "PASS" : "FAIL";
  if (color_enabled())
    std::printf("  [%s%s\033[0m] %-38s value=%-12.6g target=%-10.6g tol=%g\n",
                ok ? "\033[32m" : "\033[31m", tag, name.c_str(), value, target, tol);
  else
    std::printf("  [%s] %-38s value=%-12.6g target=%-10.6g tol=%g\n", tag,
                name.c_str(), value, target, tol);
}

json check_json(const std::string& name, bool ok, double value, double target,
                double tol) {
  return json{{"name", name},
              {"passed", ok},
              {"value", value},
              {"target", target},
              {"tolerance", tol}};
}

// Records one assertion in all three places: counter, stdout, report.
struct Checks {
  json arr = json::array();
  int failed = 0;
  void add(const std::string& name, bool ok, double value, double target, double tol) {
    if (!ok) ++failed;
    print_check(name, ok, value, target, tol);
    arr.push_back(check_json(name, ok, value, target, tol));
  }
};

int finish(const std::string& command, const Params& P, const json& results,
           const json& checks, const Opts& o, int failed,
           const std::string& csv_text = "") {
  std::string text;
  if (o.format == "csv") {
    if (csv_text.empty()) {
      std::fprintf(stderr, "csv output is only available for `sweep`\n");
      return 2;
    }
    text = csv_text;
  } else {
    text = assemble_report(command, P, results.dump(), checks.dump());
  }
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    f << text;
    if (!f) {
      std::fprintf(stderr, "cannot write report to '%s'\n", o.out.c_str());
      return 1;
    }
  }
  if (!o.compare_to.empty()) {
    std::ifstream f(o.compare_to, std::ios::binary);
    if (!f) {
      std::fprintf(stderr, "cannot read baseline report '%s'\n", o.compare_to.c_str());
      return 1;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    const bool same = reports_equal_modulo_timestamp(text, ss.str());
    std::printf("baseline comparison (%s): %s\n", o.compare_to.c_str(),
                same ? "identical (timestamp excluded)" : "DIFFERENT");
    if (!same) return 1;
  }
  return failed > 0 ? 1 : 0;
}

std::string exactness_name(ConstantEstimate::Exactness e) {
  switch (e) {
    case ConstantEstimate::Exactness::exact_symbol: return "exact-symbol";
    case ConstantEstimate::Exactness::eigen_converged: return "eigen-converged";
    case ConstantEstimate::Exactness::upper_bound: return "upper-bound";
  }
  return "?";
}

json estimate_json(const ConstantEstimate& est) {
  json j;
  j["value"] = est.value;
  j["kind"] = est.kind == ConstantEstimate::Kind::mu ? "mu" : "S";
  j["exactness"] = exactness_name(est.exactness);
  if (est.symbol_value) j["symbol_value"] = *est.symbol_value;
  if (est.closed_form_value) j["closed_form_value"] = *est.closed_form_value;
  if (est.value_half_span) j["value_half_span"] = *est.value_half_span;
  if (est.span_difference) j["span_difference"] = *est.span_difference;
  json rows = json::array();
  for (const auto& r : est.per_mode) {
    json m;
    if (r.mode.kind == SphericalMode::Kind::harmonic)
      m["k"] = r.mode.k;
    else
      m["nu"] = r.mode.nu;
    m["eigenvalue"] = r.mode.eigenvalue;
    m["numerator"] = r.numerator;
    m["denominator"] = r.denominator;
    m["quotient"] = r.quotient;
    m["method"] = r.method == QuotientReport::Method::eigen      ? "eigen"
                  : r.method == QuotientReport::Method::gradient ? "gradient"
                                                                 : "symbol";
    m["iterations"] = r.iterations;
    m["residual"] = r.residual;
    m["grid_span"] = r.grid_span;
    m["grid_points"] = r.grid_points;
    rows.push_back(m);
  }
  j["per_mode"] = rows;
  return j;
}

int run_constants(const Opts& o) {
  Params P{o.n, o.p, o.q, o.alpha};
  validate(P);
  const DerivedParams D = derive_params(P);
  json r;
  r["beta"] = D.beta;
  r["gamma"] = D.gamma;
  r["H1"] = D.H1;
  r["H2"] = D.H2;
  r["A"] = D.A;
  r["alpha_star"] = D.alpha_star;
  if (D.p_crit) r["p_crit"] = *D.p_crit;
  if (D.gamma_bar) r["gamma_bar"] = *D.gamma_bar;
  r["hardy_constant"] = std::pow(std::abs(hardy_exponent(P, P.alpha)), P.p);
  const auto k = resonant_mode(P);
  r["resonant"] = k.has_value();
  if (k) r["resonant_k"] = *k;
  Checks ch;
  if (P.p == 2.0 && P.q == 2.0) {
    const Mu22 closed = mu22_closed_form(P.n, P.alpha);
    const SymbolOracle sym = mu2_symbol_oracle(P.n, P.alpha, o.k_max);
    r["mu_closed"] = closed.value;
    r["mu_symbol"] = sym.value;
    r["argmin_k"] = closed.argmin_k;
    ch.add("symbol-matches-closed-form", sym.matches_closed_form,
           sym.value, closed.value, 1e-10);
  }
  std::printf("n=%d p=%g q=%g alpha=%g: beta=%.10g gamma=%.10g A=%.10g%s\n", P.n, P.p,
              P.q, P.alpha, D.beta, D.gamma, D.A, k ? "  [resonant]" : "");
  return finish("constants", P, json::array({r}), ch.arr, o, ch.failed);
}

int run_estimate(const Opts& o, ConstantEstimate::Kind kind) {
  Params P{o.n, o.p, o.q, o.alpha};
  validate(P);
  const Grid1D grid = Grid1D::uniform(-o.grid_span, o.grid_span, o.grid_points);
  const ConstantEstimate est = estimate_constant(P, kind, o.k_max, grid, true);
  Checks ch;
  if (est.symbol_value) {
    if (is_resonant(P))
      ch.add("resonant-value-small", est.value < o.res_mu_max, est.value, 0.0,
             o.res_mu_max);
    else
      ch.add("discrete-vs-symbol",
             std::abs(est.value - *est.symbol_value) <=
                 o.mu_tol * std::max(*est.symbol_value, 1e-300),
             est.value, *est.symbol_value, o.mu_tol);
  } else {
    ch.add("estimate-positive", est.value > 0.0, est.value, 0.0, 0.0);
  }
  std::printf("%s = %.12g  (%s; S=%g N=%d)\n",
              kind == ConstantEstimate::Kind::mu ? "mu" : "S", est.value,
              exactness_name(est.exactness).c_str(), o.grid_span, o.grid_points);
  if (est.span_difference)
    std::printf("  half-span value %.12g, difference %.3g\n", *est.value_half_span,
                *est.span_difference);
  return finish(kind == ConstantEstimate::Kind::mu ? "mu" : "estimate-s", P,
                json::array({estimate_json(est)}), ch.arr, o, ch.failed);
}

int run_degenerate(const Opts& o) {
  Params P{o.n, o.p, o.q, o.alpha};
  validate(P);
  const DerivedParams D = derive_params(P);
  const std::vector<double> ladder =
      o.eps_ladder.empty() ? default_eps_ladder() : o.eps_ladder;
  const ProfileOmega omega = ProfileOmega::canonical();
  const double edge = P.n * P.p - P.n;

  std::string family = o.family;
  if (family == "auto") {
    if (std::abs(P.alpha - edge) <= 1e-9 || (P.alpha < edge && is_resonant(P)))
      family = "resonance";
    else if (P.alpha > edge)
      family = "navier";
    else
      family = "mitidieri";
  }

  std::vector<double> values;
  double target = 0.0;
  if (family == "resonance") {
    const auto k = resonant_mode(P);
    if (!k) throw std::invalid_argument("degenerate: weight is not resonant");
    for (double e : ladder) values.push_back(resonance_family_bound(omega, e, P, *k));
    target = P.p;
  } else if (family == "navier") {
    const SphericalMode cap = cap_for_eigenvalue(P.n, -D.gamma);
    for (double e : ladder)
      values.push_back(navier_degeneration_quotient(omega, e, P, cap));
    target = P.p - 1.0 + P.p / P.q;
  } else if (family == "mitidieri") {
    for (double e : ladder) values.push_back(mitidieri_sharpness_quotient(omega, e, P));
  } else {
    throw std::invalid_argument("degenerate: unknown family '" + family +
                                "' (resonance, mitidieri, navier)");
  }

  json r;
  r["family"] = family;
  json tab = json::array();
  for (std::size_t i = 0; i < ladder.size(); ++i)
    tab.push_back(json{{"eps", ladder[i]}, {"value", values[i]}});
  r["ladder"] = tab;

  Checks ch;
  if (family == "mitidieri") {
    const double limit = std::pow(D.gamma, P.p);
    const double got = values.back();
    r["limit_target"] = limit;
    const bool ok = limit > 1e-8 ? std::abs(got - limit) <= o.sharp_tol * limit
                                 : std::abs(got) <= o.sharp_tol;
    ch.add("sharpness-limit-vs-gamma^p", ok, got, limit, o.sharp_tol);
    std::printf("mitidieri quotient at eps=%g: %.10g (target %.10g)\n", ladder.back(),
                got, limit);
  } else {
    const RateFit fit = fit_rate(ladder, values);
    r["slope"] = fit.slope;
    r["r_squared"] = fit.r_squared;
    r["slope_target"] = target;
    ch.add("rate-slope", std::abs(fit.slope - target) <= o.rate_tol, fit.slope, target,
           o.rate_tol);
    std::printf("%s family: slope %.4f (target %.4f), r²=%.6f\n", family.c_str(),
                fit.slope, target, fit.r_squared);
  }
  return finish("degenerate", P, json::array({r}), ch.arr, o, ch.failed);
}

int run_verify(const Opts& o) {
  Params P{o.n, o.p, o.q, o.alpha};
  validate(P);
  const Suite suite = suite_from_name(o.suite);
  // support in s > 0 (the unit ball) is admissible for every suite, so all
  // samples live on [0, S]
  const Grid1D grid = Grid1D::uniform(0.0, o.grid_span, o.grid_points);
  SampleSpec spec;
  spec.seed = o.seed;
  spec.n = o.n;
  spec.modes = o.modes;
  spec.count = o.samples;
  const auto samples = generate_samples(spec, grid);
  const SuiteReport rep = verify_inequalities(samples, P, suite);
  std::printf("%s: %d samples, %d violations; min slack %.3e, min quotient %.6g\n",
              suite_name(suite).c_str(), rep.samples, rep.violations, rep.min_slack,
              rep.min_quotient);
  if (rep.constant_is_sharp)
    std::printf("  constant %.10g (sharp)\n", rep.constant);
  else
    std::printf("  empirical minimum quotient %.10g (no closed constant for this p,q)\n",
                rep.constant);
  const json results = json::array({json::parse(suite_report_json(rep))});
  json checks = json::array();
  checks.push_back(check_json("zero-violations", rep.violations == 0,
                              rep.violations, 0.0, 0.0));
  print_check("zero-violations", rep.violations == 0, rep.violations, 0, 0);
  return finish("verify", P, results, checks, o, rep.violations);
}

int run_compare(const Opts& o) {
  Params P{o.n, o.p, o.q, o.alpha};
  validate(P);
  if (!(o.R > 1.0)) throw std::invalid_argument("compare: --R must exceed 1");
  const Grid1D grid = Grid1D::uniform(1.0 / o.R, o.R, o.grid_points);
  const double span = grid.hi() - grid.lo();
  Rng rng(o.seed);

  // signed cubic bumps strictly inside the annulus; first two get opposite
  // signs so the profile changes sign
  auto random_profile = [&](bool nonneg) {
    std::vector<double> u(grid.size(), 0.0);
    const int nb = rng.uniform_int(2, 4);
    for (int b = 0; b < nb; ++b) {
      const double w = rng.uniform(0.15 * span, 0.45 * span);
      const double c = rng.uniform(grid.lo() + 0.5 * w + 0.02 * span,
                                   grid.hi() - 0.5 * w - 0.02 * span);
      double amp = rng.uniform(0.5, 1.0);
      if (!nonneg && (b == 1 || (b > 1 && rng.uniform() < 0.5))) amp = -amp;
      const double l = c - 0.5 * w, h = c + 0.5 * w;
      const double peak = std::pow(0.25 * w * w, 3.0);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.s[i];
        if (r <= l || r >= h) continue;
        const double f = (r - l) * (h - r);
        u[i] += amp * f * f * f / peak;
      }
    }
    return u;
  };

  Checks ch;
  json rows = json::array();
  double worst_gap = 0.0;
  for (int s = 0; s < o.samples; ++s) {
    const auto u = random_profile(false);
    const ComparisonReport rep = comparison_check(grid, u, P);
    worst_gap = std::min(worst_gap, rep.min_gap);
    if (!rep.dominates || !rep.quotient_monotone)
      ch.add("comparison[" + std::to_string(s) + "]", false, rep.min_gap, 0.0, 1e-8);
    rows.push_back(json{{"min_gap", rep.min_gap},
                        {"quotient_u", rep.quotient_u},
                        {"quotient_v", rep.quotient_v}});
  }
  ch.add("domination-and-monotonicity", ch.failed == 0, worst_gap, 0.0, 1e-8);

  const double lo = 2.0 * P.p - P.n, hi = P.n * P.p - P.n;
  if (P.alpha > lo && P.alpha < hi) {
    double worst_ratio = 0.0;
    bool all_hold = true;
    for (int s = 0; s < o.samples; ++s) {
      auto f = random_profile(true);
      AnnulusProblem prob;
      prob.n = P.n;
      prob.R = o.R;
      prob.grid = grid;
      prob.f = std::move(f);
      const StabilityBound sb = weighted_stability_bound(prob, P);
      all_hold = all_hold && sb.holds;
      if (sb.rhs > 0.0) worst_ratio = std::max(worst_ratio, sb.lhs / sb.rhs);
    }
    ch.add("weighted-stability", all_hold, worst_ratio, 1.0, 1e-9);
  } else {
    std::printf("  (stability bound skipped: alpha outside (2p−n, np−n))\n");
  }
  std::printf("comparison: %d profiles, worst gap %.3e\n", o.samples, worst_gap);
  return finish("compare", P, rows, ch.arr, o, ch.failed);
}

int run_sweep(const Opts& o, double a_min, double a_max, double a_step, bool discrete,
              bool rate) {
  Params tmpl{o.n, o.p, o.q, o.alpha};
  validate(tmpl);
  const double lo = std::isnan(a_min) ? 2.0 * o.p - o.n - 1.0 : a_min;
  const double hi = std::isnan(a_max) ? o.n * o.p - o.n + 5.0 : a_max;
  const double st = std::isnan(a_step) ? 0.25 : a_step;
  if (!(st > 0.0) || hi < lo) throw std::invalid_argument("sweep: bad alpha range");
  std::vector<double> alphas;
  for (int i = 0;; ++i) {
    const double a = lo + i * st;
    if (a > hi + 1e-12) break;
    alphas.push_back(a);
  }
  SweepTasks tasks;
  tasks.discrete = discrete;
  tasks.rate = rate;
  tasks.k_max = o.k_max;
  tasks.mu_tol = o.mu_tol;
  tasks.resonant_mu_max = o.res_mu_max;
  tasks.rate_tol = o.rate_tol;
  if (discrete) tasks.grid = Grid1D::uniform(-o.grid_span, o.grid_span, o.grid_points);
  const auto rows = rellich::run_sweep(alphas, tmpl, tasks);

  int failed = 0, resonant = 0;
  for (const auto& r : rows) {
    failed += r.checks_failed;
    resonant += r.resonant ? 1 : 0;
  }
  std::printf("sweep: %zu rows, %d resonant, %d failed checks\n", rows.size(), resonant,
              failed);
  for (const auto& r : rows)
    for (const auto& id : r.failed_ids)
      std::printf("  FAIL alpha=%.6g: %s\n", r.alpha, id.c_str());
  json checks = json::array();
  checks.push_back(check_json("sweep-row-checks", failed == 0, failed, 0.0, 0.0));
  return finish("sweep", tmpl, json::parse(sweep_json(rows)), checks, o, failed,
                sweep_csv(rows));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sharp constants and inequality suites on the punctured space"};
  app.require_subcommand(1);
  Opts o;
  double a_min = std::nan(""), a_max = std::nan(""), a_step = std::nan("");
  bool discrete = false, rate = false;

  auto add_common = [&o](CLI::App* c) {
    c->add_option("--n", o.n, "dimension, ≥ 3");
    c->add_option("--p", o.p, "integrability exponent, > 1");
    c->add_option("--q", o.q, "mass exponent, ≥ p");
    c->add_option("--alpha", o.alpha, "weight exponent");
    c->add_option("--modes", o.modes, "harmonic mode degrees");
    c->add_option("--grid-span", o.grid_span, "axis half-span S (grid on [−S, S])");
    c->add_option("--grid-points", o.grid_points, "grid node count");
    c->add_option("--eps-ladder", o.eps_ladder, "degeneration eps values (decreasing)");
    c->add_option("--seed", o.seed, "sample generator seed");
    c->add_option("--format", o.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--out", o.out, "write report to this path");
    c->add_option("--compare-to", o.compare_to,
                  "compare the report against this baseline (timestamp excluded)");
    c->add_option("--k-max", o.k_max, "largest harmonic degree (−1 = automatic)");
    c->add_option("--mu-tol", o.mu_tol, "discrete-vs-symbol relative tolerance");
    c->add_option("--resonant-mu-max", o.res_mu_max,
                  "absolute bound classifying a resonant discrete value");
    c->add_option("--rate-tol", o.rate_tol, "slope tolerance");
    c->add_option("--sharp-tol", o.sharp_tol, "sharpness-limit relative tolerance");
    c->add_option("--slack-tol", o.slack_tol, "inequality slack tolerance");
  };

  auto* c_const = app.add_subcommand("constants", "closed-form constants and predicates");
  add_common(c_const);
  auto* c_mu = app.add_subcommand("mu", "discrete Rellich constant estimate");
  add_common(c_mu);
  auto* c_s = app.add_subcommand("estimate-s", "discrete Sobolev-type quotient estimate");
  add_common(c_s);
  auto* c_deg = app.add_subcommand("degenerate", "test-function family rates");
  add_common(c_deg);
  c_deg->add_option("--family", o.family, "resonance|mitidieri|navier|auto");
  auto* c_ver = app.add_subcommand("verify", "inequality suite on seeded samples");
  add_common(c_ver);
  c_ver->add_option("--suite", o.suite,
                    "hardy|rellich|ckn|rellich-sobolev|improved-log");
  c_ver->add_option("--samples", o.samples, "sample count");
  auto* c_cmp = app.add_subcommand("compare", "annulus comparison and stability checks");
  add_common(c_cmp);
  c_cmp->add_option("--R", o.R, "annulus outer radius (> 1)");
  c_cmp->add_option("--samples", o.samples, "profile count");
  auto* c_swp = app.add_subcommand("sweep", "per-alpha constants, flags and slopes");
  add_common(c_swp);
  c_swp->add_option("--alpha-min", a_min, "sweep start (default 2p−n−1)");
  c_swp->add_option("--alpha-max", a_max, "sweep end (default np−n+5)");
  c_swp->add_option("--alpha-step", a_step, "sweep step (default 0.25)");
  c_swp->add_flag("--discrete", discrete, "run the eigen solve per row");
  c_swp->add_flag("--rate", rate, "fit degeneration slopes on alpha ≥ np−n rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_const->parsed()) return run_constants(o);
    if (c_mu->parsed()) return run_estimate(o, ConstantEstimate::Kind::mu);
    if (c_s->parsed()) return run_estimate(o, ConstantEstimate::Kind::S);
    if (c_deg->parsed()) return run_degenerate(o);
    if (c_ver->parsed()) return run_verify(o);
    if (c_cmp->parsed()) return run_compare(o);
    if (c_swp->parsed()) return run_sweep(o, a_min, a_max, a_step, discrete, rate);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
