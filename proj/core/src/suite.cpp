#include "dyadic/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "dyadic/errors.hpp"
#include "dyadic/sparse.hpp"

namespace dyadic {

std::vector<CellSpec> default_cells(CaseId c) {
  std::vector<CellSpec> cells;
  auto add = [&](const char* name, IneqParams pr) {
    pr.validate(c);
    cells.push_back(CellSpec{name, std::move(pr)});
  };
  IneqParams pr;
  switch (c) {
    case CaseId::MaxWeak:
    case CaseId::MaxStrong: {
      pr.m = 2;
      pr.t = {2.0};
      pr.r = {1.0};
      pr.rho = {0.0};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.t = {2.0, 3.0};
      pr.r = {1.0, 1.0};
      pr.rho = {0.0, 0.25};
      add("c1", pr);
      break;
    }
    case CaseId::BDual: {
      pr.m = 2;
      pr.t = {2.0, 2.0};
      pr.r = {1.0, 2.0};
      pr.rho = {0.0, 0.25};
      pr.js = {0};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.t = {2.0, 2.0, 2.0};
      pr.r = {0.5, 0.5, 1.0};
      pr.rho = {0.0, 0.0, 0.0};
      pr.js = {0, 2};
      add("c1", pr);
      break;
    }
    case CaseId::ABelow:
    case CaseId::ABelowWeakProbe: {
      pr.m = 2;
      pr.t = {1.5};
      pr.r = {2.0};
      pr.rho = {0.0};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.t = {2.0, 2.0};
      pr.r = {1.0, 1.5};
      pr.rho = {0.0, 0.1};
      add("c1", pr);
      break;
    }
    case CaseId::FwAp: {
      pr.m = 2;
      pr.q = {1.0, 1.0};
      pr.beta = {1.0, 0.0};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.q = {1.0, 2.0, 1.5};
      pr.beta = {0.5, 1.0, 0.25};
      add("c1", pr);
      break;
    }
    case CaseId::SumLt1: {
      pr.m = 2;
      pr.beta = {0.3, 0.4};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.beta = {0.2, 0.3, 0.4};
      add("c1", pr);
      break;
    }
    case CaseId::Cov: {
      pr.m = 1;
      pr.cov_s = 1.5;
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 1;
      pr.cov_s = 3.0;
      add("c1", pr);
      break;
    }
    case CaseId::Key: {
      pr.m = 2;
      pr.j = 1;
      pr.s = {1.0, 0.5};
      pr.q = {1.5, 1.5};
      pr.alpha = 0.75;
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.j = 2;
      pr.s = {1.0, 1.0, -0.25};
      pr.q = {2.0, 2.0, 0.75};
      pr.alpha = 1.5;
      add("c1", pr);
      break;
    }
    case CaseId::CharStop:
    case CaseId::CharAltProbe: {
      pr.m = 2;
      pr.p = {2.0};
      pr.s = {1.0, 0.8};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.p = {2.0, 4.0};
      pr.s = {1.0, 0.5, 1.0};
      add("c1", pr);
      break;
    }
    case CaseId::Convex: {
      pr.m = 2;
      pr.p = {2.0, 2.0};
      pr.s = {1.0, 1.0};
      pr.js = {0, 1};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.p = {2.0, 3.0, 6.0};
      pr.s = {1.0, 0.5, 0.4};
      pr.js = {0};
      add("c1", pr);
      break;
    }
    case CaseId::Concave: {
      pr.m = 2;
      pr.p = {0.8};
      pr.s = {1.5};
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 3;
      pr.p = {3.0, 6.0};
      pr.s = {0.5, 0.3};
      pr.disjoint_ground = true;
      add("c1", pr);
      break;
    }
    case CaseId::FracMaxLorentz: {
      pr.m = 1;
      pr.lor_rho = 0.0;
      pr.lor_p = 2.0;
      pr.lor_r = lorentz_inf;
      add("c0", pr);
      pr = IneqParams{};
      pr.m = 1;
      pr.lor_rho = 0.25;
      pr.lor_p = 2.0;
      pr.lor_r = 1.5;
      add("c1", pr);
      break;
    }
  }
  return cells;
}

std::string ledger_key(CaseId c, const CellSpec& cell) {
  std::ostringstream os;
  os << case_name(c) << "|" << cell.name << "|m=" << cell.params.m;
  return os.str();
}

std::uint64_t trial_seed(std::uint64_t master, CaseId c, std::size_t cell_idx, int depth, int trial) {
  std::uint64_t s = master ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(c) + 1));
  std::uint64_t out = splitmix64(s);
  s ^= 0xBF58476D1CE4E5B9ull * (static_cast<std::uint64_t>(cell_idx) + 1);
  out ^= splitmix64(s);
  s ^= 0x94D049BB133111EBull * (static_cast<std::uint64_t>(depth) + 1);
  out ^= splitmix64(s);
  s ^= 0x2545F4914F6CDD1Dull * (static_cast<std::uint64_t>(trial) + 1);
  out ^= splitmix64(s);
  return out;
}

namespace {

// Rotate through weight shapes so every depth sees the extremal profiles.
WeightFamily family_for_trial(int trial) {
  WeightFamily fam;
  switch (trial % 5) {
    case 0:
      fam.kind = FamilyKind::Power;
      fam.a = 0.7;
      break;
    case 1:
      fam.kind = FamilyKind::Spike;
      fam.height = 32.0;
      break;
    case 2:
      fam.kind = FamilyKind::Cascade;
      fam.sigma = 1.0;
      break;
    default:
      fam.kind = FamilyKind::Cascade;
      fam.sigma = 0.5;
      break;
  }
  return fam;
}

struct Task {
  CaseId c;
  std::size_t cell_idx;
  CellSpec cell;
  int depth;
};

}  // namespace

SuiteResult run_suite(const SuiteConfig& cfg) {
  if (cfg.trials < 1) throw validation_error("suite needs at least one trial");
  if (cfg.jobs < 1) throw validation_error("suite needs at least one job");
  for (int d : cfg.depths)
    if (d < 1 || d > 22) throw validation_error("suite depth out of range: " + std::to_string(d));

  const std::vector<CaseId> cases = cfg.cases.empty() ? all_cases(cfg.include_probes) : cfg.cases;

  std::vector<Task> tasks;
  for (CaseId c : cases) {
    const auto cells = default_cells(c);
    for (std::size_t ci = 0; ci < cells.size(); ++ci)
      for (int d : cfg.depths) tasks.push_back(Task{c, ci, cells[ci], d});
  }

  std::vector<std::vector<TrialRow>> buckets(tasks.size());
  auto run_task = [&](std::size_t ti) {
    const Task& task = tasks[ti];
    std::vector<TrialRow>& rows = buckets[ti];
    rows.reserve(static_cast<std::size_t>(cfg.trials));
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const std::uint64_t seed = trial_seed(cfg.master_seed, task.c, task.cell_idx, task.depth, trial);
      const WeightFamily fam = family_for_trial(trial);
      const Instance inst = generate_instance(task.c, task.cell.params, task.depth, fam, seed);
      const IneqReport rep = evaluate_inequality(task.c, inst, task.cell.params);
      TrialRow row;
      row.c = task.c;
      row.cell = task.cell.name;
      row.seed = seed;
      row.depth = task.depth;
      row.m = task.cell.params.m;
      row.digest = task.cell.name + "|" + task.cell.params.digest(task.c);
      row.lhs = rep.lhs;
      row.rhs = rep.rhs;
      row.ratio = rep.ratio;
      row.hard_failure = rep.hard_failure;
      rows.push_back(std::move(row));
    }
  };

  if (cfg.jobs == 1) {
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t ti = next.fetch_add(1);
        if (ti >= tasks.size()) break;
        run_task(ti);
      }
    };
    std::vector<std::thread> pool;
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), tasks.size());
    pool.reserve(nthreads);
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SuiteResult res;
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const std::string key = ledger_key(tasks[ti].c, tasks[ti].cell);
    for (TrialRow& row : buckets[ti]) {
      if (row.hard_failure) {
        std::ostringstream os;
        os << key << " depth " << row.depth << " seed " << row.seed << ": rhs = 0 with lhs = " << row.lhs;
        res.hard_failures.push_back(os.str());
      } else if (!std::isfinite(row.ratio)) {
        std::ostringstream os;
        os << key << " depth " << row.depth << " seed " << row.seed << ": ratio " << row.ratio;
        res.nonfinite.push_back(os.str());
      }
      double& cm = res.cell_max[key];
      cm = std::max(cm, row.ratio);
      double& dm = res.depth_max[key][row.depth];
      dm = std::max(dm, row.ratio);
      res.rows.push_back(std::move(row));
    }
  }

  for (const auto& [key, by_depth] : res.depth_max) {
    for (const auto& [d, maxk] : by_depth) {
      const auto it2 = by_depth.find(2 * d);
      if (it2 == by_depth.end()) continue;
      if (it2->second > 1.5 * maxk) {
        std::ostringstream os;
        os << key << ": max ratio " << it2->second << " at depth " << 2 * d
           << " exceeds 1.5 x " << maxk << " at depth " << d;
        res.stability_violations.push_back(os.str());
      }
    }
  }
  return res;
}

namespace {

Instance trivial_instance(CaseId c, const IneqParams& pr, int depth) {
  const std::size_t leaves = std::size_t{1} << depth;
  const double mass = 1.0 / static_cast<double>(leaves);
  Grid grid(depth, std::vector<double>(leaves, mass));
  Instance inst(std::move(grid), LeafFn(std::vector<double>(leaves, 1.0)));
  const Grid& g = inst.grid;

  const std::vector<double> ones(leaves, 1.0);
  for (std::size_t i = 0; i < case_weight_slots(c, pr.m); ++i) inst.weights.emplace_back(ones);
  for (std::size_t i = 0; i < case_function_slots(c, pr.m); ++i) inst.functions.emplace_back(ones);
  if (case_uses_tau(c)) inst.tau.at_lin(0) = 1.0;  // indicator of the root
  for (std::size_t i = 0; i < case_lambda_slots(c, pr.m); ++i) {
    CubeSeq lam(depth);
    if (c == CaseId::Cov) {
      // A root indicator keeps both sides of the covering bound at exactly 1;
      // putting mass on every cube would give a depth-dependent constant.
      lam.at_lin(0) = 1.0;
    } else {
      for (std::size_t lin = 0; lin < lam.size(); ++lin) lam.at_lin(lin) = 1.0;
    }
    inst.lambdas.push_back(std::move(lam));
  }
  if (c == CaseId::Concave && pr.disjoint_ground)
    inst.ground = carleson_to_sparse(g, inst.tau, carleson_norm(g, inst.tau));
  inst.family = "constant";
  return inst;
}

}  // namespace

std::vector<TrivialRow> run_trivial_suite(double tol) {
  struct Entry {
    CaseId c;
    std::string cell;
    IneqParams params;
  };
  std::vector<Entry> entries;
  for (CaseId c : all_cases(false)) {
    if (c == CaseId::Concave) {
      for (const CellSpec& cell : default_cells(c)) entries.push_back({c, cell.name, cell.params});
    } else {
      const CellSpec cell = default_cells(c)[0];
      entries.push_back({c, cell.name, cell.params});
    }
  }
  // The one-slot localized-sum identity: lhs and rhs are the same product.
  {
    IneqParams pr;
    pr.m = 1;
    pr.beta = {0.5};
    entries.push_back({CaseId::SumLt1, "one-slot", std::move(pr)});
  }

  std::vector<TrivialRow> rows;
  rows.reserve(entries.size());
  for (const Entry& e : entries) {
    const Instance inst = trivial_instance(e.c, e.params, 4);
    const IneqReport rep = evaluate_inequality(e.c, inst, e.params);
    TrivialRow row;
    row.c = e.c;
    row.cell = e.cell;
    row.lhs = rep.lhs;
    row.rhs = rep.rhs;
    row.ratio = rep.ratio;
    // All-ones data turn every factor into 1, except that the convex-range
    // bound sums one Fujii-Wilson term per strong slot.
    row.expected = (e.c == CaseId::Convex) ? 1.0 / static_cast<double>(e.params.m) : 1.0;
    row.pass = !rep.hard_failure && std::abs(row.ratio - row.expected) <= tol;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> ledger_regressions(const Ledger& frozen,
                                            const std::map<std::string, double>& current,
                                            double slack) {
  std::vector<std::string> out;
  for (const auto& [key, value] : current) {
    const auto it = frozen.find(key);
    if (it == frozen.end()) {
      out.push_back(key + ": not present in the frozen ledger; refreeze before gating on it");
      continue;
    }
    if (value > it->second * (1.0 + slack)) {
      std::ostringstream os;
      os << key << ": max ratio " << value << " exceeds ledger " << it->second << " by more than "
         << slack * 100.0 << "%";
      out.push_back(os.str());
    }
  }
  return out;
}

SharpnessReport run_sharpness(int depth, std::span<const double> avals) {
  if (depth < 3 || depth > 22) throw validation_error("sharpness sweep depth out of range");
  if (avals.size() < 2) throw validation_error("sharpness sweep needs at least two parameter values");

  IneqParams pr;
  pr.m = 2;
  pr.t = {2.0};
  pr.r = {1.0};
  pr.rho = {0.0};
  pr.validate(CaseId::MaxStrong);
  const std::vector<double> q = {0.5, 0.5};  // (r/t', alpha)

  const std::size_t leaves = std::size_t{1} << depth;
  Grid grid(depth, std::vector<double>(leaves, 1.0 / static_cast<double>(leaves)));

  SharpnessReport report;
  std::vector<double> xs, ys;
  for (double a : avals) {
    WeightFamily fam;
    fam.kind = FamilyKind::Power;
    fam.a = a;
    const LeafFn w1 = gen_weight(grid, fam);
    const LeafFn w2 = dependent_complete(std::span<const LeafFn>(&w1, 1), q);

    CharExponents ce;
    ce.q = q;
    const double characteristic = muckenhoupt(grid, std::vector<LeafFn>{w1, w2}, ce);

    // Candidate functions: the classical extremizers w^{1-t'} truncated to
    // left-aligned blocks, plus a point mass and the constant.
    std::vector<std::pair<std::string, LeafFn>> candidates;
    {
      std::vector<double> recip(leaves);
      for (std::size_t k = 0; k < leaves; ++k) recip[k] = 1.0 / w1[k];
      candidates.emplace_back("recip", LeafFn(recip));
      for (int frac : {2, 4, 8}) {
        std::vector<double> v(leaves, 0.0);
        for (std::size_t k = 0; k < leaves / static_cast<std::size_t>(frac); ++k) v[k] = recip[k];
        candidates.emplace_back("recip-1/" + std::to_string(frac), LeafFn(std::move(v)));
      }
      std::vector<double> spike(leaves, 0.0);
      spike[0] = 1.0;
      candidates.emplace_back("spike", LeafFn(std::move(spike)));
      candidates.emplace_back("ones", LeafFn(std::vector<double>(leaves, 1.0)));
    }

    SharpnessPoint best;
    best.a = a;
    best.ratio = -1.0;
    for (auto& [name, f] : candidates) {
      Instance inst(Grid(grid), LeafFn(std::vector<double>(leaves, 1.0)));
      inst.weights = {w1, w2};
      inst.functions = {f};
      inst.family = "power";
      const IneqReport rep = evaluate_inequality(CaseId::MaxStrong, inst, pr);
      if (!rep.hard_failure && rep.ratio > best.ratio) {
        best.candidate = name;
        best.characteristic = characteristic;
        best.lhs = rep.lhs;
        best.rhs = rep.rhs;
        best.ratio = rep.ratio;
      }
    }
    if (best.ratio < 0.0 || best.lhs <= 0.0 || best.rhs <= 0.0)
      throw validation_error("sharpness sweep produced a degenerate point at a = " + std::to_string(a));
    report.points.push_back(best);
    xs.push_back(std::log(best.rhs));
    ys.push_back(std::log(best.lhs));
  }
  report.fit = slope_fit(xs, ys);
  return report;
}

}  // namespace dyadic
