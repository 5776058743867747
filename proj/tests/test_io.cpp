#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dyadic/errors.hpp"
#include "dyadic/io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dyadic-io-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("doubles survive a 17-digit round trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 7.25, 123456789.123456789, 2.2250738585072014e-308}) {
    const std::string s = dyadic::format_g17(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(dyadic::format_g17(1.0) == "1");
}

TEST_CASE("instance files round-trip including sparse sequences") {
  TempDir dir;
  dyadic::InstanceFile file;
  file.depth = 2;
  file.masses = {0.1, 0.2, 0.3, 0.4};
  file.functions["w"] = {1.0, 2.0, 3.0, 4.0};
  file.functions["f"] = {0.0, 1.0, 0.0, 0.5};
  file.sequences["tau"] = {{"0:0", 1.0}, {"2:3", 0.25}};

  const std::string path = dir.file("instance.json");
  dyadic::save_instance_file(path, file);
  const auto back = dyadic::load_instance_file(path);

  CHECK(back.depth == 2);
  REQUIRE(back.masses.size() == 4);
  CHECK(back.masses[3] == 0.4);
  REQUIRE(back.functions.count("w") == 1);
  CHECK(back.functions.at("f")[1] == 1.0);
  REQUIRE(back.sequences.count("tau") == 1);
  CHECK(back.sequences.at("tau").at("2:3") == 0.25);

  const dyadic::CubeSeq tau = dyadic::seq_from_entries(2, back.sequences.at("tau"));
  CHECK(tau.at_lin(0) == 1.0);
  CHECK(tau.at(dyadic::CubeId{2, 3}) == 0.25);
  CHECK(tau.at(dyadic::CubeId{1, 0}) == 0.0);
}

TEST_CASE("sequence entries must parse and fit the depth") {
  std::map<std::string, double> bad_key{{"nope", 1.0}};
  CHECK_THROWS_AS(dyadic::seq_from_entries(2, bad_key), dyadic::validation_error);
  std::map<std::string, double> out_of_range{{"3:0", 1.0}};
  CHECK_THROWS_AS(dyadic::seq_from_entries(2, out_of_range), dyadic::validation_error);
}

TEST_CASE("missing and corrupt files raise io errors") {
  TempDir dir;
  CHECK_THROWS_AS(dyadic::load_instance_file(dir.file("absent.json")), dyadic::io_error);
  CHECK_THROWS_AS(dyadic::load_ledger(dir.file("absent.json")), dyadic::io_error);

  const std::string garbled = dir.file("garbled.json");
  std::ofstream(garbled) << "{ this is not json";
  CHECK_THROWS_AS(dyadic::load_instance_file(garbled), dyadic::io_error);
  CHECK_THROWS_AS(dyadic::load_ledger(garbled), dyadic::io_error);
}

TEST_CASE("the trial table carries the fixed header and full precision") {
  TempDir dir;
  dyadic::TrialRow row;
  row.c = dyadic::CaseId::Key;
  row.cell = "c0";
  row.seed = 42;
  row.depth = 6;
  row.m = 2;
  row.digest = "c0|m=2|alpha=0.75";
  row.lhs = 1.0 / 3.0;
  row.rhs = 2.0 / 3.0;
  row.ratio = 0.5;

  const std::string path = dir.file("trials.csv");
  dyadic::write_trials_csv(path, std::vector<dyadic::TrialRow>{row});
  const std::string text = slurp(path);

  CHECK(text.rfind("case,seed,depth,m,params_digest,lhs,rhs,ratio\n", 0) == 0);
  CHECK(text.find("KEY,42,6,2,") != std::string::npos);
  CHECK(text.find(dyadic::format_g17(1.0 / 3.0)) != std::string::npos);

  // One header plus one data line.
  std::size_t lines = 0;
  for (char ch : text) lines += (ch == '\n');
  CHECK(lines == 2);
}

TEST_CASE("ledgers round-trip") {
  TempDir dir;
  dyadic::Ledger ledger{{"KEY|c0|m=2", 0.75}, {"COV|c1|m=1", 2.0561}};
  const std::string path = dir.file("ledger.json");
  dyadic::save_ledger(path, ledger);
  const auto back = dyadic::load_ledger(path);
  REQUIRE(back.size() == 2);
  CHECK(back.at("KEY|c0|m=2") == 0.75);
  CHECK(back.at("COV|c1|m=1") == 2.0561);
}

TEST_CASE("allocations export with one record per piece") {
  TempDir dir;
  dyadic::SparseAllocation alloc;
  alloc.lambda = 2.0;
  dyadic::AllocationEntry entry;
  entry.cube = dyadic::CubeId{1, 1};
  entry.budget = 0.25;
  entry.density = {0.5, 1.0};
  alloc.entries.push_back(entry);

  const std::string path = dir.file("allocation.json");
  dyadic::export_allocation(path, alloc);
  const std::string text = slurp(path);
  CHECK(text.find("\"lambda\"") != std::string::npos);
  CHECK(text.find("\"1:1\"") != std::string::npos);
  CHECK(text.find("\"budget\"") != std::string::npos);
  CHECK(text.find("\"density\"") != std::string::npos);
}

TEST_CASE("summary and sharpness writers produce parseable files") {
  TempDir dir;

  dyadic::SuiteResult res;
  dyadic::TrialRow row;
  row.cell = "c0";
  row.m = 2;
  row.ratio = 0.5;
  res.rows.push_back(row);
  res.cell_max["MAX_WEAK|c0|m=2"] = 0.5;
  res.depth_max["MAX_WEAK|c0|m=2"][4] = 0.5;
  const std::string summary = dir.file("summary.json");
  dyadic::write_summary_json(summary, res, {});
  const std::string stext = slurp(summary);
  CHECK(stext.find("MAX_WEAK|c0|m=2") != std::string::npos);

  dyadic::SharpnessReport rep;
  dyadic::SharpnessPoint pt;
  pt.a = 0.3;
  pt.candidate = "recip";
  pt.characteristic = 1.5;
  pt.lhs = 1.0;
  pt.rhs = 2.0;
  pt.ratio = 0.5;
  rep.points.push_back(pt);
  rep.fit.slope = 0.97;
  const std::string sharp = dir.file("sharpness.csv");
  dyadic::write_sharpness_csv(sharp, rep);
  const std::string ctext = slurp(sharp);
  CHECK(ctext.rfind("a,candidate,characteristic,lhs,rhs,ratio\n", 0) == 0);
  CHECK(ctext.find("recip") != std::string::npos);
}
