#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/sparse.hpp"
#include "dyadic/suite.hpp"

namespace dyadic {

// On-disk instance: depth, leaf masses, named leaf functions, and optional
// named cube sequences keyed by "level:index" (entries omitted are zero).
struct InstanceFile {
  int depth = 0;
  std::vector<double> masses;
  std::map<std::string, std::vector<double>> functions;
  std::map<std::string, std::map<std::string, double>> sequences;
};

InstanceFile load_instance_file(const std::string& path);
void save_instance_file(const std::string& path, const InstanceFile& file);

// Materialize a named sequence as a dense cube sequence.
CubeSeq seq_from_entries(int depth, const std::map<std::string, double>& entries);

// Allocation export: [{"cube": "level:index", "budget": b, "density": [...]}].
void export_allocation(const std::string& path, const SparseAllocation& alloc);

// Trial table: case,seed,depth,m,params_digest,lhs,rhs,ratio with floats
// printed at 17 significant digits.
void write_trials_csv(const std::string& path, std::span<const TrialRow> rows);

void write_summary_json(const std::string& path, const SuiteResult& result,
                        std::span<const std::string> regressions);

Ledger load_ledger(const std::string& path);
void save_ledger(const std::string& path, const Ledger& ledger);

// Sharpness sweep table: a,candidate,characteristic,lhs,rhs,ratio.
void write_sharpness_csv(const std::string& path, const SharpnessReport& report);

// Format a double with 17 significant digits, locale-independent.
std::string format_g17(double v);

}  // namespace dyadic
