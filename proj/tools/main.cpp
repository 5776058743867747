// Command line driver: randomized inequality suites, Carleson-to-sparse
// conversion, and the sharpness sweep. Every randomized path takes an
// explicit seed so reruns are reproducible byte for byte.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadic/errors.hpp"
#include "dyadic/io.hpp"
#include "dyadic/search.hpp"
#include "dyadic/sparse.hpp"
#include "dyadic/suite.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitLedgerRegression = 3;
constexpr int kExitIo = 4;

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw dyadic::validation_error(std::string(what) + ": cannot parse integer from '" + std::string(s) + "'");
  return v;
}

// "4,6,8", "4..8", or a single value.
std::vector<int> parse_depths(const std::string& spec) {
  std::vector<int> out;
  if (const auto dots = spec.find(".."); dots != std::string::npos) {
    const int lo = parse_int(std::string_view(spec).substr(0, dots), "depth range");
    const int hi = parse_int(std::string_view(spec).substr(dots + 2), "depth range");
    if (hi < lo) throw dyadic::validation_error("depth range is empty: " + spec);
    for (int d = lo; d <= hi; ++d) out.push_back(d);
    return out;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    if (comma > start) out.push_back(parse_int(std::string_view(spec).substr(start, comma - start), "depth list"));
    start = comma + 1;
  }
  if (out.empty()) throw dyadic::validation_error("depth list is empty: " + spec);
  return out;
}

std::vector<double> parse_avals(const std::string& spec) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    if (comma > start) {
      const std::string tok = spec.substr(start, comma - start);
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw dyadic::validation_error("sweep values: cannot parse '" + tok + "'");
      }
    }
    start = comma + 1;
  }
  if (out.empty()) throw dyadic::validation_error("sweep value list is empty");
  return out;
}

std::string output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DYADIC_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

struct CheckOptions {
  std::string suite = "core";
  std::vector<std::string> cases;
  std::string depths;
  int trials = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
  bool include_probes = false;
  std::string out;
  std::string ledger_path;
  std::string write_ledger_path;
  double trivial_tol = 1e-12;
};

// Config file fields mirror the flags; a flag given on the command line wins.
void apply_config(const std::string& path, CheckOptions& opt, const CLI::App& cmd) {
  std::ifstream in(path);
  if (!in) throw dyadic::io_error("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw dyadic::io_error("cannot parse config " + path + ": " + e.what());
  }
  auto unset = [&](const char* flag) { return cmd.get_option(flag)->count() == 0; };
  try {
    if (j.contains("suite") && unset("--suite")) opt.suite = j["suite"].get<std::string>();
    if (j.contains("cases") && unset("--cases")) opt.cases = j["cases"].get<std::vector<std::string>>();
    if (j.contains("depths") && unset("--depths")) {
      if (j["depths"].is_string()) {
        opt.depths = j["depths"].get<std::string>();
      } else {
        opt.depths.clear();
        for (const auto& d : j["depths"]) {
          if (!opt.depths.empty()) opt.depths += ',';
          opt.depths += std::to_string(d.get<int>());
        }
      }
    }
    if (j.contains("trials") && unset("--trials")) opt.trials = j["trials"].get<int>();
    if (j.contains("seed") && unset("--seed")) {
      opt.seed = j["seed"].get<std::uint64_t>();
      opt.seed_set = true;
    }
    if (j.contains("jobs") && unset("--jobs")) opt.jobs = j["jobs"].get<int>();
    if (j.contains("include_probes") && unset("--include-probes"))
      opt.include_probes = j["include_probes"].get<bool>();
    if (j.contains("out_dir") && unset("--out")) opt.out = j["out_dir"].get<std::string>();
    if (j.contains("ledger") && unset("--ledger")) opt.ledger_path = j["ledger"].get<std::string>();
    if (j.contains("trivial_tol")) opt.trivial_tol = j["trivial_tol"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw dyadic::validation_error("config " + path + " has a malformed field: " + e.what());
  }
}

std::vector<dyadic::CaseId> resolve_cases(const std::vector<std::string>& names) {
  std::vector<dyadic::CaseId> out;
  for (const std::string& name : names) {
    const auto c = dyadic::case_from_name(name);
    if (!c) throw dyadic::validation_error("unknown case '" + name + "'");
    out.push_back(*c);
  }
  return out;
}

int run_trivial(const CheckOptions& opt) {
  const auto rows = dyadic::run_trivial_suite(opt.trivial_tol);
  bool all_pass = true;
  for (const auto& row : rows) {
    std::printf("%-6s %-18s %-9s ratio %.17g expected %.17g\n", row.pass ? "[PASS]" : "[FAIL]",
                std::string(dyadic::case_name(row.c)).c_str(), row.cell.c_str(), row.ratio, row.expected);
    all_pass = all_pass && row.pass;
  }
  return all_pass ? kExitPass : kExitCheckFailed;
}

int run_check(const CheckOptions& opt) {
  if (opt.suite == "trivial") return run_trivial(opt);
  if (opt.suite != "core")
    throw dyadic::validation_error("unknown suite '" + opt.suite + "' (expected 'core' or 'trivial')");
  if (!opt.seed_set)
    throw dyadic::validation_error("the randomized suite needs an explicit --seed");

  dyadic::SuiteConfig cfg;
  cfg.cases = resolve_cases(opt.cases);
  cfg.include_probes = opt.include_probes;
  if (!opt.depths.empty()) cfg.depths = parse_depths(opt.depths);
  if (opt.trials > 0) cfg.trials = opt.trials;
  cfg.master_seed = opt.seed;
  if (opt.jobs > 0) cfg.jobs = opt.jobs;

  const dyadic::SuiteResult result = dyadic::run_suite(cfg);

  std::vector<std::string> regressions;
  if (!opt.ledger_path.empty()) {
    const dyadic::Ledger frozen = dyadic::load_ledger(opt.ledger_path);
    regressions = dyadic::ledger_regressions(frozen, result.cell_max);
  }

  const std::string dir = output_dir(opt.out);
  dyadic::write_trials_csv(join_path(dir, "trials.csv"), result.rows);
  dyadic::write_summary_json(join_path(dir, "summary.json"), result, regressions);
  if (!opt.write_ledger_path.empty()) {
    dyadic::Ledger ledger;
    for (const auto& [key, value] : result.cell_max) ledger[key] = value;
    dyadic::save_ledger(opt.write_ledger_path, ledger);
  }

  std::printf("rows: %zu\n", result.rows.size());
  for (const auto& [key, value] : result.cell_max) std::printf("max %-28s %.6g\n", key.c_str(), value);
  for (const auto& s : result.hard_failures) std::printf("hard failure: %s\n", s.c_str());
  for (const auto& s : result.nonfinite) std::printf("nonfinite ratio: %s\n", s.c_str());
  for (const auto& s : result.stability_violations) std::printf("stability: %s\n", s.c_str());
  for (const auto& s : regressions) std::printf("regression: %s\n", s.c_str());

  if (!regressions.empty()) return kExitLedgerRegression;
  if (!result.hard_failures.empty() || !result.nonfinite.empty() || !result.stability_violations.empty())
    return kExitCheckFailed;
  return kExitPass;
}

int run_convert(const std::string& input, double lambda, const std::string& out_path) {
  const dyadic::InstanceFile file = dyadic::load_instance_file(input);
  const dyadic::Grid grid(file.depth, file.masses);
  dyadic::CubeSeq tau(file.depth);
  if (const auto it = file.sequences.find("tau"); it != file.sequences.end())
    tau = dyadic::seq_from_entries(file.depth, it->second);
  tau.validate("tau");

  const auto profile = dyadic::carleson_profile(grid, tau);
  const auto worst = std::max_element(profile.begin(), profile.end()) - profile.begin();
  if (profile[static_cast<std::size_t>(worst)] > lambda)
    throw dyadic::validation_error(
        "Carleson norm " + std::to_string(profile[static_cast<std::size_t>(worst)]) + " exceeds lambda " +
        std::to_string(lambda) + "; attained at cube " +
        dyadic::cube_to_string(dyadic::cube_from_linear(static_cast<std::size_t>(worst))));

  const dyadic::SparseAllocation alloc = dyadic::carleson_to_sparse(grid, tau, lambda);
  dyadic::export_allocation(out_path, alloc);
  std::printf("wrote %zu entries to %s\n", alloc.entries.size(), out_path.c_str());
  return kExitPass;
}

int run_sharpness_cmd(int depth, const std::string& avals_spec, const std::string& out,
                      double slope_tol) {
  const std::vector<double> avals = parse_avals(avals_spec);
  const dyadic::SharpnessReport report = dyadic::run_sharpness(depth, avals);
  const std::string dir = output_dir(out);
  dyadic::write_sharpness_csv(join_path(dir, "sharpness.csv"), report);
  std::printf("points: %zu\n", report.points.size());
  std::printf("slope: %.17g\n", report.fit.slope);
  std::printf("r2: %.17g\n", report.fit.r2);
  if (report.fit.low_information) std::printf("note: fewer than 3 points, fit is low-information\n");
  return report.fit.slope <= 1.0 + slope_tol ? kExitPass : kExitCheckFailed;
}

int run_sweep(const std::string& case_name_arg, const std::string& cell_name, int depth, int trials,
              std::uint64_t seed, const std::string& family, const std::string& out) {
  const auto c = dyadic::case_from_name(case_name_arg);
  if (!c) throw dyadic::validation_error("unknown case '" + case_name_arg + "'");
  const auto cells = dyadic::default_cells(*c);
  const auto cell = std::find_if(cells.begin(), cells.end(),
                                 [&](const dyadic::CellSpec& s) { return s.name == cell_name; });
  if (cell == cells.end())
    throw dyadic::validation_error("case " + case_name_arg + " has no cell named '" + cell_name + "'");

  dyadic::WeightFamily fam;
  fam.kind = dyadic::family_from_name(family);
  const dyadic::SearchResult result =
      dyadic::maximize_ratio(*c, cell->params, depth, fam, trials, seed);

  nlohmann::json j;
  j["case"] = case_name_arg;
  j["cell"] = cell_name;
  j["depth"] = depth;
  j["trials"] = trials;
  j["seed"] = seed;
  j["family"] = family;
  j["lhs"] = result.report.lhs;
  j["rhs"] = result.report.rhs;
  j["ratio"] = result.report.ratio;
  j["winning_trial"] = result.trial;
  j["improvements"] = result.improvements;
  const std::string dir = output_dir(out);
  const std::string path = join_path(dir, "sweep.json");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw dyadic::io_error("cannot open " + path + " for writing");
  f << j.dump(2) << "\n";

  std::printf("worst ratio: %.17g (lhs %.17g rhs %.17g, trial %llu, %d hill-climb steps)\n",
              result.report.ratio, result.report.lhs, result.report.rhs,
              static_cast<unsigned long long>(result.trial), result.improvements);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical checks for dyadic weighted inequalities"};
  app.require_subcommand(1);

  CheckOptions check_opt;
  std::string config_path;
  auto* check = app.add_subcommand("check", "Run the trivial or randomized registry suite");
  check->add_option("--config", config_path, "JSON config file; flags override its fields");
  check->add_option("--suite", check_opt.suite, "Suite: core or trivial");
  check->add_option("--cases", check_opt.cases, "Subset of case names")->delimiter(',');
  check->add_option("--depths", check_opt.depths, "Depth list '4,6,8' or range '4..8'");
  check->add_option("--trials", check_opt.trials, "Trials per case, cell, and depth");
  auto* seed_opt = check->add_option("--seed", check_opt.seed, "Master seed (required for core)");
  check->add_option("--jobs", check_opt.jobs, "Worker threads");
  check->add_flag("--include-probes", check_opt.include_probes, "Also run the report-only probe cases");
  check->add_option("--out", check_opt.out, "Output directory (default $DYADIC_OUT_DIR or .)");
  check->add_option("--ledger", check_opt.ledger_path, "Frozen calibration ledger to compare against");
  check->add_option("--write-ledger", check_opt.write_ledger_path, "Write the observed maxima to this path");

  std::string convert_input, convert_out = "allocation.json";
  double convert_lambda = 0.0;
  auto* convert = app.add_subcommand("convert", "Carleson sequence to disjoint-piece allocation");
  convert->add_option("--input", convert_input, "Instance JSON with a 'tau' sequence")->required();
  convert->add_option("--lambda", convert_lambda, "Carleson bound for the allocation")->required();
  convert->add_option("--out", convert_out, "Output allocation JSON path");

  int sharp_depth = 8;
  std::string sharp_avals = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string sharp_out;
  double sharp_tol = 0.05;
  auto* sharp = app.add_subcommand("sharpness", "Power-weight sweep and log-log slope fit");
  sharp->add_option("--depth", sharp_depth, "Grid depth");
  sharp->add_option("--avals", sharp_avals, "Comma-separated power exponents");
  sharp->add_option("--out", sharp_out, "Output directory");
  sharp->add_option("--slope-tol", sharp_tol, "Accept slope up to 1 + tol");

  std::string sweep_case, sweep_cell = "c0", sweep_family = "cascade", sweep_out;
  int sweep_depth = 6, sweep_trials = 50;
  std::uint64_t sweep_seed = 0;
  auto* sweep = app.add_subcommand("sweep", "Adversarial ratio search for one case");
  sweep->add_option("--case", sweep_case, "Case name")->required();
  sweep->add_option("--cell", sweep_cell, "Exponent cell name");
  sweep->add_option("--depth", sweep_depth, "Grid depth");
  sweep->add_option("--trials", sweep_trials, "Random starts");
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "Master seed (required)");
  sweep->add_option("--family", sweep_family, "Weight family: cascade, power, spike, constant");
  sweep->add_option("--out", sweep_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      if (!config_path.empty()) apply_config(config_path, check_opt, *check);
      if (seed_opt->count() > 0) check_opt.seed_set = true;
      return run_check(check_opt);
    }
    if (convert->parsed()) return run_convert(convert_input, convert_lambda, convert_out);
    if (sharp->parsed()) return run_sharpness_cmd(sharp_depth, sharp_avals, sharp_out, sharp_tol);
    if (sweep->parsed()) {
      if (sweep_seed_opt->count() == 0)
        throw dyadic::validation_error("the adversarial sweep needs an explicit --seed");
      return run_sweep(sweep_case, sweep_cell, sweep_depth, sweep_trials, sweep_seed, sweep_family,
                       sweep_out);
    }
  } catch (const dyadic::ledger_regression& e) {
    std::fprintf(stderr, "ledger regression: %s\n", e.what());
    return kExitLedgerRegression;
  } catch (const dyadic::validation_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const dyadic::io_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailed;
  }
  return kExitPass;
}
