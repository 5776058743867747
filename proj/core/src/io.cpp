#include "dyadic/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path + " for reading");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw io_error("cannot parse " + path + ": " + e.what());
  }
  return j;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << body;
  if (!out) throw io_error("short write to " + path);
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

InstanceFile load_instance_file(const std::string& path) {
  const json j = parse_file(path);
  InstanceFile file;
  try {
    file.depth = j.at("depth").get<int>();
    file.masses = j.at("masses").get<std::vector<double>>();
    if (j.contains("functions"))
      file.functions = j.at("functions").get<std::map<std::string, std::vector<double>>>();
    if (j.contains("sequences"))
      file.sequences = j.at("sequences").get<std::map<std::string, std::map<std::string, double>>>();
  } catch (const json::exception& e) {
    throw io_error("malformed instance file " + path + ": " + e.what());
  }
  return file;
}

void save_instance_file(const std::string& path, const InstanceFile& file) {
  json j;
  j["depth"] = file.depth;
  j["masses"] = file.masses;
  if (!file.functions.empty()) j["functions"] = file.functions;
  if (!file.sequences.empty()) j["sequences"] = file.sequences;
  write_file(path, j.dump(2) + "\n");
}

CubeSeq seq_from_entries(int depth, const std::map<std::string, double>& entries) {
  CubeSeq seq(depth);
  for (const auto& [key, value] : entries) {
    const CubeId cube = cube_from_string(key);
    if (cube.level > depth)
      throw validation_error("sequence entry " + key + " lies below depth " + std::to_string(depth));
    seq.at(cube) = value;
  }
  return seq;
}

void export_allocation(const std::string& path, const SparseAllocation& alloc) {
  json arr = json::array();
  for (const auto& entry : alloc.entries) {
    json e;
    e["cube"] = cube_to_string(entry.cube);
    e["budget"] = entry.budget;
    e["density"] = entry.density;
    arr.push_back(std::move(e));
  }
  json j;
  j["lambda"] = alloc.lambda;
  j["entries"] = std::move(arr);
  write_file(path, j.dump(2) + "\n");
}

void write_trials_csv(const std::string& path, std::span<const TrialRow> rows) {
  std::string body = "case,seed,depth,m,params_digest,lhs,rhs,ratio\n";
  for (const TrialRow& row : rows) {
    body += case_name(row.c);
    body += ',';
    body += std::to_string(row.seed);
    body += ',';
    body += std::to_string(row.depth);
    body += ',';
    body += std::to_string(row.m);
    body += ',';
    body += row.digest;
    body += ',';
    body += format_g17(row.lhs);
    body += ',';
    body += format_g17(row.rhs);
    body += ',';
    body += format_g17(row.ratio);
    body += '\n';
  }
  write_file(path, body);
}

void write_summary_json(const std::string& path, const SuiteResult& result,
                        std::span<const std::string> regressions) {
  json j;
  json maxima;
  for (const auto& [key, value] : result.cell_max) maxima[key] = value;
  j["max_ratio"] = std::move(maxima);
  json depths;
  for (const auto& [key, by_depth] : result.depth_max) {
    json row;
    for (const auto& [d, v] : by_depth) row[std::to_string(d)] = v;
    depths[key] = std::move(row);
  }
  j["depth_max"] = std::move(depths);
  j["hard_failures"] = result.hard_failures;
  j["nonfinite"] = result.nonfinite;
  j["stability_violations"] = result.stability_violations;
  j["ledger_regressions"] = std::vector<std::string>(regressions.begin(), regressions.end());
  write_file(path, j.dump(2) + "\n");
}

Ledger load_ledger(const std::string& path) {
  const json j = parse_file(path);
  Ledger ledger;
  try {
    for (const auto& [key, value] : j.at("max_ratio").items()) ledger[key] = value.get<double>();
  } catch (const json::exception& e) {
    throw io_error("malformed ledger " + path + ": " + e.what());
  }
  return ledger;
}

void save_ledger(const std::string& path, const Ledger& ledger) {
  json maxima;
  for (const auto& [key, value] : ledger) maxima[key] = value;
  json j;
  j["max_ratio"] = std::move(maxima);
  write_file(path, j.dump(2) + "\n");
}

void write_sharpness_csv(const std::string& path, const SharpnessReport& report) {
  std::string body = "a,candidate,characteristic,lhs,rhs,ratio\n";
  for (const SharpnessPoint& pt : report.points) {
    body += format_g17(pt.a);
    body += ',';
    body += pt.candidate;
    body += ',';
    body += format_g17(pt.characteristic);
    body += ',';
    body += format_g17(pt.lhs);
    body += ',';
    body += format_g17(pt.rhs);
    body += ',';
    body += format_g17(pt.ratio);
    body += '\n';
  }
  write_file(path, body);
}

}  // namespace dyadic
