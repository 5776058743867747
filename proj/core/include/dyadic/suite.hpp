#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dyadic/inequalities.hpp"
#include "dyadic/search.hpp"

namespace dyadic {

// A named exponent assignment for one registry case.
struct CellSpec {
  std::string name;
  IneqParams params;
};

// The built-in exponent cells exercised by the randomized suites.
std::vector<CellSpec> default_cells(CaseId c);

// Ledger key identifying a (case, cell, m) triple.
std::string ledger_key(CaseId c, const CellSpec& cell);

struct TrialRow {
  CaseId c = CaseId::MaxWeak;
  std::string cell;
  std::uint64_t seed = 0;
  int depth = 0;
  int m = 0;
  std::string digest;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool hard_failure = false;
};

struct SuiteConfig {
  std::vector<CaseId> cases;           // empty = all gated cases
  bool include_probes = false;
  std::vector<int> depths{4, 6, 8, 10, 12};
  int trials = 300;
  std::uint64_t master_seed = 1;
  int jobs = 1;
};

struct SuiteResult {
  std::vector<TrialRow> rows;
  std::map<std::string, double> cell_max;                 // ledger key -> max ratio
  std::map<std::string, std::map<int, double>> depth_max; // ledger key -> depth -> max ratio
  std::vector<std::string> hard_failures;
  std::vector<std::string> nonfinite;
  // Violations of: max ratio at depth 2k at most 1.5 times the max at depth k,
  // whenever both depths were swept.
  std::vector<std::string> stability_violations;
};

SuiteResult run_suite(const SuiteConfig& cfg);

// Deterministic per-trial seed, independent of execution order.
std::uint64_t trial_seed(std::uint64_t master, CaseId c, std::size_t cell_idx, int depth, int trial);

// All-ones instances on the uniform depth-4 grid of total mass 1. Every gated
// case has a closed-form expected ratio (1 for all but one case, whose
// right-hand side carries an unavoidable structural factor).
struct TrivialRow {
  CaseId c = CaseId::MaxWeak;
  std::string cell;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double expected = 1.0;
  bool pass = false;
};

std::vector<TrivialRow> run_trivial_suite(double tol = 1e-12);

// Calibration ledger: frozen per-cell maxima, compared with 5% slack.
using Ledger = std::map<std::string, double>;

std::vector<std::string> ledger_regressions(const Ledger& frozen,
                                            const std::map<std::string, double>& current,
                                            double slack = 0.05);

// Power-weight sharpness sweep for the strong maximal bound (m = 2 with the
// dependent completion). Each sweep point keeps the best ratio over a small
// dictionary of candidate functions; the log-log slope of lhs against rhs is
// the probe.
struct SharpnessPoint {
  double a = 0.0;
  std::string candidate;
  double characteristic = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct SharpnessReport {
  std::vector<SharpnessPoint> points;
  SlopeFit fit;
};

SharpnessReport run_sharpness(int depth, std::span<const double> avals);

}  // namespace dyadic
