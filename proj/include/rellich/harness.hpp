#pragma once
#include <optional>
#include <string>
#include <vector>

#include "rellich/cylinder.hpp"
#include "rellich/grid.hpp"
#include "rellich/params.hpp"

// Random test-function generation, the inequality verification suites, and
// parameter sweeps with CSV/JSON serialization.  Everything here is
// deterministic in the seed; sweep rows and sample verifications run
// concurrently but each writes only its own pre-assigned slot.

namespace rellich {

// Recipe for seeded random cylinder functions: per sample, each listed mode
// receives a sum of C⁴ polynomial bumps with random centers, widths and
// signed amplitudes.  Identical specs produce bitwise-identical samples.
struct SampleSpec {
  unsigned long long seed = 1;
  int n = 5;
  std::vector<int> modes = {0};      // harmonic degrees
  std::optional<SphericalMode> cap;  // optional extra non-integer mode
  int count = 1;
  int bumps_min = 1, bumps_max = 3;  // bumps per mode
  double amp_lo = 0.25, amp_hi = 1.0;
  double width_lo = 2.0, width_hi = 5.0;
};

// Bump centers stay 6 units inside the grid ends, so profiles vanish
// identically near both endpoints (and near s = 0 on a [0, S] grid).
// Throws std::invalid_argument on an empty mode list or a grid shorter
// than the margins allow.
std::vector<CylinderFunction> generate_samples(const SampleSpec& spec,
                                               const Grid1D& grid);

enum class Suite { hardy, rellich, ckn, rellich_sobolev, improved_log };

// "hardy" | "rellich" | "ckn" | "rellich-sobolev" | "improved-log".
Suite suite_from_name(const std::string& name);
std::string suite_name(Suite s);

// One recorded assertion: value compared against target with the stated
// tolerance (every report line carries the tolerance it used).
struct CheckLine {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
};

struct SuiteReport {
  Suite suite = Suite::hardy;
  int samples = 0;
  int violations = 0;
  double constant = 0.0;           // sharp constant, or the empirical minimum
  bool constant_is_sharp = false;  // false → no closed constant for (p,q); estimate only
  double min_slack = 0.0;          // min over samples of (LHS − c·RHS)/LHS
  double min_quotient = 0.0;       // min over samples of LHS/RHS^{p/q}
  std::vector<CheckLine> checks;   // one line per sample
};

// Checks LHS ≥ constant·RHS − 1e−8·LHS on every sample.
//   hardy            ∫|x|^a|∇u|^p  ≥ |H_{1,a}|^p ∫|x|^{a−p}|u|^p,  a = alpha
//   rellich          ∫|x|^α|Δu|^p  ≥ γ^p ∫|x|^{α−2p}|u|^p,  2p−n < α < np−n, q = p
//   ckn              first order against the q-mass; sharp constant only at p=q=2
//   rellich-sobolev  second order against the q-mass; sharp constant only at p=q=2
//   improved-log     p=q=2, α ≤ n, support in the unit ball:
//                    ∫|x|^α|Δu|² − S∫|x|^{α−4}|u|² ≥ (γ̄/2)∫|x|^{α−4}|log|x||⁻²|u|²
// Suites without a computed sharp constant check positivity of the quotient
// and record the running minimum.  Parameter/suite mismatches throw
// std::invalid_argument before any evaluation.
SuiteReport verify_inequalities(const std::vector<CylinderFunction>& samples,
                                const Params& P, Suite suite);

// One α-row of a parameter sweep.  Append-only: rows are emitted in grid
// order and never revised.
struct SweepRecord {
  int n = 0;
  double p = 0.0, q = 0.0, alpha = 0.0;
  double beta = 0.0, gamma = 0.0, A = 0.0, alpha_star = 0.0;
  std::optional<double> mu_closed;    // p = q = 2 closed form
  std::optional<double> mu_symbol;    // p = q = 2 symbol oracle
  std::optional<double> mu_discrete;  // eigen solve, when requested
  bool resonant = false;
  std::optional<double> rate_slope;   // degeneration slope, α ≥ np−n rows
  int checks_passed = 0;
  int checks_failed = 0;
  std::vector<std::string> failed_ids;  // identifiers of the failed checks
};

struct SweepTasks {
  bool discrete = false;  // run the eigen solve per row (p = q = 2 only)
  bool rate = false;      // fit the degeneration slope on α ≥ np−n rows
  int k_max = -1;
  Grid1D grid;            // axis grid for the discrete column
  double mu_tol = 2e-3;             // relative, discrete vs symbol (non-resonant)
  double resonant_mu_max = 1e-2;    // absolute, discrete value at resonant rows
  double rate_tol = 0.05;           // |slope − target|
};

// Per-α: derived constants, resonance flag, closed-form/symbol agreement,
// optional discrete eigenvalue and degeneration slope.  Rows are computed
// concurrently.  Throws std::invalid_argument on an empty grid.
std::vector<SweepRecord> run_sweep(const std::vector<double>& alpha_grid,
                                   const Params& tmpl, const SweepTasks& tasks);

// Fixed column order:
// n,p,q,alpha,beta,gamma,A,alpha_star,mu_closed,mu_symbol,mu_discrete,
// resonant,rate_slope,checks_passed,checks_failed
// Missing optionals serialize as empty fields; resonant as 1/0.
std::string sweep_csv(const std::vector<SweepRecord>& rows);

// JSON fragments (nlohmann dumps, sorted keys) for report assembly.
std::string sweep_json(const std::vector<SweepRecord>& rows);
std::string suite_report_json(const SuiteReport& rep);

// Top-level report object: {command, params, results, checks, versions,
// generated_at}.  `results` and `checks` must be JSON arrays in text form.
// generated_at is the one field excluded from report comparison.
std::string assemble_report(const std::string& command, const Params& P,
                            const std::string& results_json,
                            const std::string& checks_json);

// Byte-comparison of two report texts with generated_at masked out.
bool reports_equal_modulo_timestamp(const std::string& a, const std::string& b);

}  // namespace rellich
