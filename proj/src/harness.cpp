#include "rellich/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rellich/families.hpp"
#include "rellich/optimize.hpp"
#include "rellich/rng.hpp"

namespace rellich {

namespace {

using nlohmann::json;

// Index-parallel loop: each call writes only slot i of its output; the first
// exception (if any) is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(count, hw));
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        if (failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------- cylinder-side norms
// All suites are checked on the reduced (exponent −1) cylinder integrals,
// with modes L²-normalized on the sphere; mode_mass_ratio carries the
// |φ|^s constants where they do not cancel.

double fo_grad(const CylinderFunction& g, const Params& P, double H) {
  KahanSum acc;
  for (const auto& m : g.modes) {
    const double lam = m.mode.eigenvalue;
    const double mp = P.p == 2.0 ? 1.0 : mode_mass_ratio(m.mode, P.p);
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
      const double t = m.d1[i] + H * m.v[i];
      const double grad2 = t * t + lam * m.v[i] * m.v[i];
      acc.add(g.grid.w[i] * (P.p == 2.0 ? grad2 : mp * std::pow(grad2, 0.5 * P.p)));
    }
  }
  return acc.value();
}

double so_op(const CylinderFunction& g, const Params& P) {
  KahanSum acc;
  for (const auto& m : g.modes) {
    const std::vector<double> L = second_order_residual(m, P);
    const double mp = P.p == 2.0 ? 1.0 : mode_mass_ratio(m.mode, P.p);
    for (std::size_t i = 0; i < g.grid.size(); ++i)
      acc.add(g.grid.w[i] * (P.p == 2.0 ? L[i] * L[i]
                                        : mp * std::pow(std::abs(L[i]), P.p)));
  }
  return acc.value();
}

// ∫|w|^pw ds per mode; the shared shape of every reduced mass norm.
double power_mass(const CylinderFunction& g, double pw, bool with_mode_constant) {
  KahanSum acc;
  for (const auto& m : g.modes) {
    const double ms = (pw == 2.0 || !with_mode_constant) ? 1.0 : mode_mass_ratio(m.mode, pw);
    for (std::size_t i = 0; i < g.grid.size(); ++i)
      acc.add(g.grid.w[i] * ms * std::pow(std::abs(m.v[i]), pw));
  }
  return acc.value();
}

// Σ ∫ s^{−2} w² ds: the log-weighted remainder mass (support in s > 0).
double log_mass(const CylinderFunction& g) {
  KahanSum acc;
  for (const auto& m : g.modes)
    for (std::size_t i = 0; i < g.grid.size(); ++i)
      if (m.v[i] != 0.0)
        acc.add(g.grid.w[i] * m.v[i] * m.v[i] / (g.grid.s[i] * g.grid.s[i]));
  return acc.value();
}

void require_single_mode(const std::vector<CylinderFunction>& samples,
                         const std::string& suite, const char* why) {
  for (const auto& g : samples)
    if (g.modes.size() != 1)
      throw std::invalid_argument(suite + ": " + why + " needs single-mode samples");
}

void require_radial(const std::vector<CylinderFunction>& samples,
                    const std::string& suite) {
  for (const auto& g : samples)
    for (const auto& m : g.modes)
      if (m.mode.eigenvalue != 0.0)
        throw std::invalid_argument(suite + ": p != 2 needs radial (k=0) modes");
}

std::string iso8601_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json record_json(const SweepRecord& r) {
  json j;
  j["n"] = r.n;
  j["p"] = r.p;
  j["q"] = r.q;
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["gamma"] = r.gamma;
  j["A"] = r.A;
  j["alpha_star"] = r.alpha_star;
  j["mu_closed"] = r.mu_closed ? json(*r.mu_closed) : json();
  j["mu_symbol"] = r.mu_symbol ? json(*r.mu_symbol) : json();
  j["mu_discrete"] = r.mu_discrete ? json(*r.mu_discrete) : json();
  j["resonant"] = r.resonant;
  j["rate_slope"] = r.rate_slope ? json(*r.rate_slope) : json();
  j["checks_passed"] = r.checks_passed;
  j["checks_failed"] = r.checks_failed;
  j["failed_ids"] = r.failed_ids;
  return j;
}

}  // namespace

std::vector<CylinderFunction> generate_samples(const SampleSpec& spec,
                                               const Grid1D& grid) {
  grid.validate();
  if (spec.modes.empty() && !spec.cap)
    throw std::invalid_argument("generate_samples: empty mode list");
  if (spec.count < 1) throw std::invalid_argument("generate_samples: count must be ≥ 1");
  if (spec.bumps_min < 1 || spec.bumps_max < spec.bumps_min)
    throw std::invalid_argument("generate_samples: bad bump count range");
  if (!(spec.amp_lo > 0.0) || spec.amp_hi < spec.amp_lo)
    throw std::invalid_argument(
        "generate_samples: amplitude range must be positive (zero excluded)");
  if (!(spec.width_lo > 0.0) || spec.width_hi < spec.width_lo)
    throw std::invalid_argument("generate_samples: bad width range");
  const double margin = 6.0;
  const double c_lo = grid.lo() + margin, c_hi = grid.hi() - margin;
  if (!(c_hi > c_lo))
    throw std::invalid_argument("generate_samples: grid shorter than 2×6 margins");

  std::vector<SphericalMode> mode_set;
  for (int k : spec.modes) mode_set.push_back(SphericalMode::harmonic(k, spec.n));
  if (spec.cap) mode_set.push_back(*spec.cap);

  struct Bump {
    double lo, hi, amp, inv_peak;
  };

  Rng rng(spec.seed);
  std::vector<CylinderFunction> out;
  out.reserve(spec.count);
  for (int c = 0; c < spec.count; ++c) {
    CylinderFunction g;
    g.grid = grid;
    for (const auto& mode : mode_set) {
      const int nb = rng.uniform_int(spec.bumps_min, spec.bumps_max);
      std::vector<Bump> bumps(nb);
      for (auto& b : bumps) {
        const double center = rng.uniform(c_lo, c_hi);
        const double width = rng.uniform(spec.width_lo, spec.width_hi);
        double amp = rng.uniform(spec.amp_lo, spec.amp_hi);
        if (rng.uniform() < 0.5) amp = -amp;
        b.lo = center - 0.5 * width;
        b.hi = center + 0.5 * width;
        b.amp = amp;
        b.inv_peak = 1.0 / std::pow(0.5 * width, 10);  // ((w/2)²)⁵ at the peak
      }
      ModeProfile m;
      m.mode = mode;
      // sum of ((s−lo)(hi−s))⁵ bumps: C⁴ at the seams, analytic inside
      m.closure = [bumps](double s, double& w, double& dw, double& ddw) {
        w = dw = ddw = 0.0;
        for (const auto& b : bumps) {
          if (s <= b.lo || s >= b.hi) continue;
          const double f = (s - b.lo) * (b.hi - s);
          const double df = (b.lo + b.hi) - 2.0 * s;
          const double f2 = f * f, f3 = f2 * f, f4 = f3 * f;
          const double a = b.amp * b.inv_peak;
          w += a * f4 * f;
          dw += a * 5.0 * f4 * df;
          ddw += a * (20.0 * f3 * df * df - 10.0 * f4);
        }
      };
      const std::size_t N = grid.size();
      m.v.resize(N);
      m.d1.resize(N);
      m.d2.resize(N);
      for (std::size_t i = 0; i < N; ++i) m.closure(grid.s[i], m.v[i], m.d1[i], m.d2[i]);
      g.modes.push_back(std::move(m));
    }
    out.push_back(std::move(g));
  }
  return out;
}

Suite suite_from_name(const std::string& name) {
  if (name == "hardy") return Suite::hardy;
  if (name == "rellich") return Suite::rellich;
  if (name == "ckn") return Suite::ckn;
  if (name == "rellich-sobolev") return Suite::rellich_sobolev;
  if (name == "improved-log") return Suite::improved_log;
  throw std::invalid_argument("unknown suite '" + name +
                              "' (hardy, rellich, ckn, rellich-sobolev, improved-log)");
}

std::string suite_name(Suite s) {
  switch (s) {
    case Suite::hardy: return "hardy";
    case Suite::rellich: return "rellich";
    case Suite::ckn: return "ckn";
    case Suite::rellich_sobolev: return "rellich-sobolev";
    case Suite::improved_log: return "improved-log";
  }
  return "?";
}

SuiteReport verify_inequalities(const std::vector<CylinderFunction>& samples,
                                const Params& P, Suite suite) {
  validate(P);
  if (samples.empty()) throw std::invalid_argument("verify_inequalities: no samples");
  const DerivedParams D = derive_params(P);
  const std::string sname = suite_name(suite);
  const double p = P.p, q = P.q;

  // Suite/parameter gates, all before any evaluation.
  const bool first_order = suite == Suite::hardy || suite == Suite::ckn;
  double H = 0.0;
  if (first_order) {
    H = hardy_exponent(P, P.alpha);
    if (std::abs(H) < 1e-10)
      throw std::invalid_argument(sname + ": degenerate first-order weight");
  }
  if (suite == Suite::hardy || suite == Suite::rellich)
    if (q != p) throw std::invalid_argument(sname + ": requires q = p");
  if (suite == Suite::rellich) {
    const double lo = 2.0 * p - P.n, hi = P.n * p - P.n;
    if (!(P.alpha > lo && P.alpha < hi))
      throw std::invalid_argument(
          "rellich: requires 2p−n < alpha < np−n (boundaries excluded)");
  }
  if (suite == Suite::improved_log) {
    if (p != 2.0 || q != 2.0)
      throw std::invalid_argument("improved-log: requires p = q = 2");
    if (!(P.alpha <= P.n)) throw std::invalid_argument("improved-log: requires alpha ≤ n");
    for (const auto& g : samples)
      for (const auto& m : g.modes)
        for (std::size_t i = 0; i < g.grid.size(); ++i)
          if (m.v[i] != 0.0 && g.grid.s[i] <= 0.0)
            throw std::invalid_argument(
                "improved-log: samples must be supported in the unit ball (s > 0)");
  }
  if (q != p) require_single_mode(samples, sname, "the q-mass");
  if (p != 2.0) {
    if (first_order)
      require_radial(samples, sname);
    else
      require_single_mode(samples, sname, "p != 2");
  }

  // The suite's constant, where a sharp one is known.
  const bool sharp = suite == Suite::hardy || suite == Suite::rellich ||
                     (p == 2.0 && q == 2.0);
  double constant = 0.0;
  double gamma_bar = 0.0;
  switch (suite) {
    case Suite::hardy:
      constant = std::pow(std::abs(H), p);
      break;
    case Suite::rellich:
      constant = std::pow(D.gamma, p);
      break;
    case Suite::ckn:
      constant = sharp ? H * H : 0.0;
      break;
    case Suite::rellich_sobolev:
      constant = sharp ? mu2_symbol_oracle(P.n, P.alpha).value : 0.0;
      break;
    case Suite::improved_log:
      constant = mu2_symbol_oracle(P.n, P.alpha).value;
      gamma_bar = D.gamma_bar.value();
      break;
  }

  struct Outcome {
    CheckLine line;
    double slack = 0.0, quotient = 0.0;
    bool violation = false;
  };
  std::vector<Outcome> res(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const CylinderFunction& g = samples[i];
    g.validate();
    double lhs = 0.0, rhs = 0.0, remainder_target = 0.0;
    if (first_order)
      lhs = fo_grad(g, P, H);
    else
      lhs = so_op(g, P);
    if (suite == Suite::improved_log) {
      rhs = power_mass(g, 2.0, false);
      const double lg = log_mass(g);
      remainder_target = constant * rhs + 0.5 * gamma_bar * lg;
      res[i].quotient = lg > 0.0 ? (lhs - constant * rhs) / lg : 0.0;
      res[i].slack = lhs > 0.0 ? (lhs - remainder_target) / lhs : -1.0;
      res[i].violation = !(res[i].slack >= -1e-8);
    } else {
      rhs = power_mass(g, q, q != p);
      res[i].quotient =
          rhs > 0.0 ? lhs / std::pow(rhs, p / q) : std::numeric_limits<double>::quiet_NaN();
      if (sharp) {
        res[i].slack = lhs > 0.0 ? (lhs - constant * std::pow(rhs, p / q)) / lhs : -1.0;
        res[i].violation = !(res[i].slack >= -1e-8);
      } else {
        res[i].slack = res[i].quotient;
        res[i].violation = !(res[i].quotient > 0.0) || !std::isfinite(res[i].quotient);
      }
    }
    res[i].line.name = sname + "[" + std::to_string(i) + "]";
    res[i].line.passed = !res[i].violation;
    res[i].line.value = sharp ? res[i].slack : res[i].quotient;
    res[i].line.target = 0.0;
    res[i].line.tolerance = sharp ? 1e-8 : 0.0;
  });

  SuiteReport rep;
  rep.suite = suite;
  rep.samples = static_cast<int>(samples.size());
  rep.constant_is_sharp = sharp;
  rep.min_slack = std::numeric_limits<double>::infinity();
  rep.min_quotient = std::numeric_limits<double>::infinity();
  for (auto& o : res) {
    rep.violations += o.violation ? 1 : 0;
    rep.min_slack = std::min(rep.min_slack, o.slack);
    rep.min_quotient = std::min(rep.min_quotient, o.quotient);
    rep.checks.push_back(std::move(o.line));
  }
  rep.constant = sharp ? constant : rep.min_quotient;
  return rep;
}

std::vector<SweepRecord> run_sweep(const std::vector<double>& alpha_grid,
                                   const Params& tmpl, const SweepTasks& tasks) {
  if (alpha_grid.empty()) throw std::invalid_argument("run_sweep: empty alpha grid");
  const bool p2q2 = tmpl.p == 2.0 && tmpl.q == 2.0;
  if (tasks.discrete) {
    if (!p2q2)
      throw std::invalid_argument("run_sweep: the discrete column needs p = q = 2");
    tasks.grid.validate();
  }
  const ProfileOmega omega = ProfileOmega::canonical();

  std::vector<SweepRecord> rows(alpha_grid.size());
  parallel_for(alpha_grid.size(), [&](std::size_t i) {
    Params P = tmpl;
    P.alpha = alpha_grid[i];
    validate(P);
    const DerivedParams D = derive_params(P);
    SweepRecord r;
    r.n = P.n;
    r.p = P.p;
    r.q = P.q;
    r.alpha = P.alpha;
    r.beta = D.beta;
    r.gamma = D.gamma;
    r.A = D.A;
    r.alpha_star = D.alpha_star;
    r.resonant = is_resonant(P);
    auto note = [&r](const std::string& id, bool ok) {
      if (ok)
        ++r.checks_passed;
      else {
        ++r.checks_failed;
        r.failed_ids.push_back(id);
      }
    };

    if (p2q2) {
      const Mu22 closed = mu22_closed_form(P.n, P.alpha);
      const SymbolOracle sym = mu2_symbol_oracle(P.n, P.alpha, tasks.k_max);
      r.mu_closed = closed.value;
      r.mu_symbol = sym.value;
      note("symbol-matches-closed-form", sym.matches_closed_form);
      note("resonant-iff-mu-zero", r.resonant == (closed.value < 1e-12));
      if (tasks.discrete) {
        const ConstantEstimate est = estimate_constant(
            P, ConstantEstimate::Kind::mu, tasks.k_max, tasks.grid, false);
        r.mu_discrete = est.value;
        if (r.resonant)
          note("resonant-mu-below-" + fmt_double(tasks.resonant_mu_max),
               est.value < tasks.resonant_mu_max);
        else
          note("mu-discrete-vs-symbol",
               std::abs(est.value - sym.value) <=
                   tasks.mu_tol * std::max(sym.value, 1e-300));
      }
    }

    if (tasks.rate) {
      const double edge = P.n * P.p - P.n;
      if (P.alpha >= edge - 1e-9) {
        try {
          const std::vector<double> ladder = default_eps_ladder();
          std::vector<double> vals;
          double target;
          if (std::abs(P.alpha - edge) <= 1e-9) {
            const auto k0 = resonant_mode(P);
            for (double e : ladder)
              vals.push_back(resonance_family_bound(omega, e, P, k0.value()));
            target = P.p;
          } else {
            const SphericalMode cap = cap_for_eigenvalue(P.n, -D.gamma);
            for (double e : ladder)
              vals.push_back(navier_degeneration_quotient(omega, e, P, cap));
            target = P.p - 1.0 + P.p / P.q;
          }
          const RateFit fit = fit_rate(ladder, vals);
          r.rate_slope = fit.slope;
          note("rate-slope-vs-" + fmt_double(target),
               std::abs(fit.slope - target) <= tasks.rate_tol);
        } catch (const std::exception& e) {
          note(std::string("rate-error: ") + e.what(), false);
        }
      }
    }
    rows[i] = std::move(r);
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRecord>& rows) {
  std::string out =
      "n,p,q,alpha,beta,gamma,A,alpha_star,mu_closed,mu_symbol,mu_discrete,"
      "resonant,rate_slope,checks_passed,checks_failed\n";
  auto opt = [](const std::optional<double>& x) {
    return x ? fmt_double(*x) : std::string();
  };
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + fmt_double(r.p) + "," + fmt_double(r.q) + "," +
           fmt_double(r.alpha) + "," + fmt_double(r.beta) + "," + fmt_double(r.gamma) +
           "," + fmt_double(r.A) + "," + fmt_double(r.alpha_star) + "," +
           opt(r.mu_closed) + "," + opt(r.mu_symbol) + "," + opt(r.mu_discrete) + "," +
           (r.resonant ? "1" : "0") + "," + opt(r.rate_slope) + "," +
           std::to_string(r.checks_passed) + "," + std::to_string(r.checks_failed) +
           "\n";
  }
  return out;
}

std::string sweep_json(const std::vector<SweepRecord>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(record_json(r));
  return arr.dump();
}

std::string suite_report_json(const SuiteReport& rep) {
  json j;
  j["suite"] = suite_name(rep.suite);
  j["samples"] = rep.samples;
  j["violations"] = rep.violations;
  j["constant"] = rep.constant;
  j["constant_is_sharp"] = rep.constant_is_sharp;
  j["min_slack"] = rep.min_slack;
  j["min_quotient"] = rep.min_quotient;
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back(json{{"name", c.name},
                          {"passed", c.passed},
                          {"value", c.value},
                          {"target", c.target},
                          {"tolerance", c.tolerance}});
  j["checks"] = checks;
  return j.dump();
}

std::string assemble_report(const std::string& command, const Params& P,
                            const std::string& results_json,
                            const std::string& checks_json) {
  json rep;
  rep["command"] = command;
  rep["params"] = json{{"n", P.n}, {"p", P.p}, {"q", P.q}, {"alpha", P.alpha}};
  rep["results"] = json::parse(results_json.empty() ? "[]" : results_json);
  rep["checks"] = json::parse(checks_json.empty() ? "[]" : checks_json);
  rep["versions"] = json{{"tool", "rsharp 0.1.0"}, {"format", 1}};
  rep["generated_at"] = iso8601_now();
  return rep.dump(2) + "\n";
}

bool reports_equal_modulo_timestamp(const std::string& a, const std::string& b) {
  json ja, jb;
  try {
    ja = json::parse(a);
    jb = json::parse(b);
  } catch (const json::parse_error&) {
    return a == b;
  }
  if (ja.is_object()) ja.erase("generated_at");
  if (jb.is_object()) jb.erase("generated_at");
  return ja == jb;
}

}  // namespace rellich
