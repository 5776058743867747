#include <doctest.h>

#include <cmath>
#include <set>

#include "dyadic/errors.hpp"
#include "dyadic/inequalities.hpp"
#include "dyadic/search.hpp"
#include "dyadic/sparse.hpp"
#include "dyadic/suite.hpp"
#include "oracles.hpp"

using dyadic::CaseId;
using dyadic::CubeSeq;
using dyadic::Grid;
using dyadic::IneqParams;
using dyadic::Instance;
using dyadic::LeafFn;

namespace {

dyadic::WeightFamily cascade_family() {
  dyadic::WeightFamily fam;
  fam.kind = dyadic::FamilyKind::Cascade;
  fam.sigma = 1.0;
  return fam;
}

}  // namespace

TEST_CASE("case names round-trip and the probe split is stable") {
  for (CaseId c : dyadic::all_cases(true)) {
    const auto back = dyadic::case_from_name(dyadic::case_name(c));
    REQUIRE(back.has_value());
    CHECK(*back == c);
  }
  CHECK(dyadic::all_cases(false).size() == 12);
  CHECK(dyadic::all_cases(true).size() == 14);
  CHECK_FALSE(dyadic::case_from_name("NOT_A_CASE").has_value());
  CHECK(dyadic::case_is_probe(CaseId::ABelowWeakProbe));
  CHECK(dyadic::case_is_probe(CaseId::CharAltProbe));
  CHECK_FALSE(dyadic::case_is_probe(CaseId::MaxStrong));
}

TEST_CASE("dependent completion") {
  std::vector<LeafFn> ones{LeafFn::constant(4, 1.0)};
  std::vector<double> q11{1.0, 1.0};
  const LeafFn c = dyadic::dependent_complete(ones, q11);
  for (std::size_t i = 0; i < 4; ++i) CHECK(c[i] == doctest::Approx(1.0));

  std::vector<LeafFn> w1{LeafFn({4, 1})};
  const LeafFn rec = dyadic::dependent_complete(w1, q11);
  CHECK(rec[0] == doctest::Approx(0.25));
  CHECK(rec[1] == doctest::Approx(1.0));

  std::vector<double> q12{1.0, 2.0};
  const LeafFn root = dyadic::dependent_complete(w1, q12);
  CHECK(root[0] == doctest::Approx(0.5));
  CHECK(root[1] == doctest::Approx(1.0));

  // The completed tuple multiplies to 1 in log space.
  std::vector<LeafFn> pair{w1[0], rec};
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(std::abs(q11[0] * std::log(pair[0][i]) + q11[1] * std::log(pair[1][i])) <= 1e-12);

  std::vector<LeafFn> with_zero{LeafFn({1, 0})};
  CHECK_THROWS_AS(dyadic::dependent_complete(with_zero, q11), dyadic::validation_error);
}

TEST_CASE("parameter validation names the violated constraint") {
  IneqParams pr;
  pr.m = 2;
  pr.t = {2.0};
  pr.r = {1.0};
  pr.rho = {0.0};
  pr.validate(CaseId::MaxWeak);  // baseline is fine

  IneqParams bad_t = pr;
  bad_t.t = {1.0};
  CHECK_THROWS_WITH_AS(bad_t.validate(CaseId::MaxWeak),
                       doctest::Contains("1 < t"), dyadic::validation_error);

  IneqParams bad_trho = pr;
  bad_trho.rho = {0.6};  // t = 2 >= 1/rho
  CHECK_THROWS_WITH_AS(bad_trho.validate(CaseId::MaxWeak),
                       doctest::Contains("t < 1/rho"), dyadic::validation_error);

  // The sparse form needs the scaling exponent to be exactly 1.
  IneqParams bd;
  bd.m = 2;
  bd.t = {2.0, 2.0};
  bd.r = {1.0, 2.0};
  bd.rho = {0.0, 0.25};
  bd.js = {0};
  bd.validate(CaseId::BDual);
  IneqParams bd_bad = bd;
  bd_bad.r = {1.0, 1.0};  // Σ r_i (1/t_i - rho_i) = 0.75
  CHECK_THROWS_WITH_AS(bd_bad.validate(CaseId::BDual),
                       doctest::Contains("= 1"), dyadic::validation_error);
  IneqParams bd_nojs = bd;
  bd_nojs.js = {};
  CHECK_THROWS_AS(bd_nojs.validate(CaseId::BDual), dyadic::validation_error);
  IneqParams bd_dup = bd;
  bd_dup.js = {0, 0};
  CHECK_THROWS_WITH_AS(bd_dup.validate(CaseId::BDual),
                       doctest::Contains("repeated"), dyadic::validation_error);

  // The convex-range split needs the Hoelder condition on p.
  IneqParams cv;
  cv.m = 2;
  cv.p = {2.0, 3.0};
  cv.s = {1.0, 1.0};
  cv.js = {0, 1};
  CHECK_THROWS_WITH_AS(cv.validate(CaseId::Convex),
                       doctest::Contains("1/p_i = 1"), dyadic::validation_error);
  cv.p = {2.0, 2.0};
  cv.validate(CaseId::Convex);
  cv.s = {0.5, 1.0};  // s_1 - 1/p_1 = 0
  CHECK_THROWS_AS(cv.validate(CaseId::Convex), dyadic::validation_error);

  // The summation estimate enforces its coupling q_j = 1 + s_j.
  IneqParams key;
  key.m = 2;
  key.j = 1;
  key.s = {1.0, 0.5};
  key.q = {1.5, 1.5};
  key.alpha = 0.75;
  key.validate(CaseId::Key);
  key.q = {1.5, 2.0};
  CHECK_THROWS_WITH_AS(key.validate(CaseId::Key),
                       doctest::Contains("q_j = 1 + s_j"), dyadic::validation_error);

  IneqParams cov;
  cov.m = 1;
  cov.cov_s = 1.0;
  CHECK_THROWS_AS(cov.validate(CaseId::Cov), dyadic::validation_error);

  IneqParams lt1;
  lt1.m = 2;
  lt1.beta = {0.6, 0.6};
  CHECK_THROWS_WITH_AS(lt1.validate(CaseId::SumLt1),
                       doctest::Contains("beta_i < 1"), dyadic::validation_error);
}

TEST_CASE("digests are comma-free and distinguish cells") {
  std::set<std::string> seen;
  std::size_t cells = 0;
  for (CaseId c : dyadic::all_cases(true)) {
    for (const auto& cell : dyadic::default_cells(c)) {
      const std::string d = cell.params.digest(c);
      CHECK(d.find(',') == std::string::npos);
      seen.insert(std::string(dyadic::case_name(c)) + "|" + d);
      ++cells;
    }
  }
  // Every (case, cell) pair has a distinct digest line.
  CHECK(seen.size() == cells);
}

TEST_CASE("summation estimate matches the brute-force oracle") {
  const auto cells = dyadic::default_cells(CaseId::Key);
  REQUIRE(cells.size() >= 2);
  for (const auto& cell : cells) {
    for (std::uint64_t seed = 1; seed <= 250; ++seed) {
      const int depth = 2 + static_cast<int>(seed % 5);  // up to 6
      const Instance inst =
          dyadic::generate_instance(CaseId::Key, cell.params, depth, cascade_family(), seed);
      const auto rep = dyadic::evaluate_inequality(CaseId::Key, inst, cell.params);

      const double lhs = oracle::key_lhs(inst.grid, inst.weights, inst.tau, cell.params.s,
                                         cell.params.j, cell.params.alpha);
      const double rhs = oracle::key_rhs(inst.grid, inst.weights, inst.tau, cell.params.s,
                                         cell.params.q, cell.params.j, cell.params.alpha);
      CHECK(rep.lhs == doctest::Approx(lhs).epsilon(1e-10));
      CHECK(rep.rhs == doctest::Approx(rhs).epsilon(1e-10));
      CHECK_FALSE(rep.hard_failure);
    }
  }
}

TEST_CASE("weak maximal bound never exceeds the strong one") {
  for (const auto& cell : dyadic::default_cells(CaseId::MaxWeak)) {
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
      const int depth = 3 + static_cast<int>(seed % 4);
      const Instance inst =
          dyadic::generate_instance(CaseId::MaxWeak, cell.params, depth, cascade_family(), seed);
      const auto weak = dyadic::evaluate_inequality(CaseId::MaxWeak, inst, cell.params);
      const auto strong = dyadic::evaluate_inequality(CaseId::MaxStrong, inst, cell.params);
      CHECK(weak.lhs <= strong.lhs * (1.0 + 1e-12));
      // The strong right-hand side adds a factor that is at least 1.
      CHECK(strong.rhs >= weak.rhs * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("the weak probe of the sparse operator bound drops a factor on each side") {
  for (const auto& cell : dyadic::default_cells(CaseId::ABelow)) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
      const Instance inst =
          dyadic::generate_instance(CaseId::ABelow, cell.params, 4, cascade_family(), seed);
      const auto main_rep = dyadic::evaluate_inequality(CaseId::ABelow, inst, cell.params);
      const auto probe = dyadic::evaluate_inequality(CaseId::ABelowWeakProbe, inst, cell.params);
      // Weak Lorentz norm below the strong norm, right side without its
      // Fujii-Wilson factor below the full right side.
      CHECK(probe.lhs <= main_rep.lhs * (1.0 + 1e-12));
      CHECK(probe.rhs <= main_rep.rhs * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("the stopping probe changes only the right-hand side") {
  for (const auto& cell : dyadic::default_cells(CaseId::CharStop)) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const Instance inst =
          dyadic::generate_instance(CaseId::CharStop, cell.params, 4, cascade_family(), seed);
      const auto main_rep = dyadic::evaluate_inequality(CaseId::CharStop, inst, cell.params);
      const auto probe = dyadic::evaluate_inequality(CaseId::CharAltProbe, inst, cell.params);
      CHECK(probe.lhs == doctest::Approx(main_rep.lhs).epsilon(1e-12));
      CHECK(std::isfinite(probe.rhs));
      CHECK(probe.rhs > 0.0);
    }
  }
}

TEST_CASE("scaling the functions leaves every ratio invariant") {
  const double c = 37.5;
  for (CaseId id : {CaseId::MaxWeak, CaseId::MaxStrong, CaseId::BDual, CaseId::ABelow,
                    CaseId::FracMaxLorentz}) {
    for (const auto& cell : dyadic::default_cells(id)) {
      for (std::uint64_t seed = 3; seed <= 22; ++seed) {
        Instance inst = dyadic::generate_instance(id, cell.params, 4, cascade_family(), seed);
        const auto base = dyadic::evaluate_inequality(id, inst, cell.params);
        for (auto& f : inst.functions) {
          std::vector<double> v = f.values();
          for (double& x : v) x *= c;
          f = LeafFn(std::move(v));
        }
        const auto scaled = dyadic::evaluate_inequality(id, inst, cell.params);
        if (base.ratio > 0.0)
          CHECK(scaled.ratio == doctest::Approx(base.ratio).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("vanishing functions give zero over zero, not a hard failure") {
  const auto cell = dyadic::default_cells(CaseId::MaxWeak)[0];
  Instance inst = dyadic::generate_instance(CaseId::MaxWeak, cell.params, 3, cascade_family(), 5);
  inst.functions[0] = LeafFn::constant(inst.grid.leaf_count(), 0.0);
  const auto rep = dyadic::evaluate_inequality(CaseId::MaxWeak, inst, cell.params);
  CHECK(rep.lhs == 0.0);
  CHECK(rep.rhs == 0.0);
  CHECK(rep.ratio == 0.0);
  CHECK_FALSE(rep.hard_failure);
}

TEST_CASE("the characteristic comparison rejects tuples that do not multiply to 1") {
  const auto cell = dyadic::default_cells(CaseId::FwAp)[0];
  Instance inst = dyadic::generate_instance(CaseId::FwAp, cell.params, 3, cascade_family(), 9);
  dyadic::evaluate_inequality(CaseId::FwAp, inst, cell.params);  // dependent tuple passes

  std::vector<double> v = inst.weights[0].values();
  for (double& x : v) x *= 2.0;  // breaks the pointwise product
  inst.weights[0] = LeafFn(std::move(v));
  CHECK_THROWS_AS(dyadic::evaluate_inequality(CaseId::FwAp, inst, cell.params),
                  dyadic::validation_error);
}

TEST_CASE("prescribed ground pieces must stay disjoint") {
  const auto cells = dyadic::default_cells(CaseId::Concave);
  const dyadic::CellSpec* disjoint_cell = nullptr;
  for (const auto& cell : cells)
    if (cell.params.disjoint_ground) disjoint_cell = &cell;
  REQUIRE(disjoint_cell != nullptr);

  Instance inst = dyadic::generate_instance(CaseId::Concave, disjoint_cell->params, 3,
                                            cascade_family(), 11);
  // Pin a deterministic ground: a root-only coefficient sequence allocates
  // one full-density piece covering every leaf.
  inst.tau = CubeSeq(inst.grid.depth());
  inst.tau.at_lin(0) = 0.7;
  inst.ground = dyadic::carleson_to_sparse(inst.grid, inst.tau,
                                           dyadic::carleson_norm(inst.grid, inst.tau));
  REQUIRE_FALSE(inst.ground.entries.empty());
  dyadic::evaluate_inequality(CaseId::Concave, inst, disjoint_cell->params);

  auto entry = inst.ground.entries[0];
  for (double& d : entry.density) d = 1.0;
  inst.ground.entries.push_back(entry);  // duplicates a full piece: stacks above 1
  CHECK_THROWS_WITH_AS(dyadic::evaluate_inequality(CaseId::Concave, inst, disjoint_cell->params),
                       doctest::Contains("disjoint"), dyadic::validation_error);
}

TEST_CASE("probe variants evaluate to finite reports") {
  for (CaseId id : {CaseId::ABelowWeakProbe, CaseId::CharAltProbe}) {
    const auto cells = dyadic::default_cells(id);
    REQUIRE(cells.size() >= 2);
    for (const auto& cell : cells) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Instance inst = dyadic::generate_instance(id, cell.params, 4, cascade_family(), seed);
        const auto rep = dyadic::evaluate_inequality(id, inst, cell.params);
        CHECK(std::isfinite(rep.ratio));
        CHECK_FALSE(rep.hard_failure);
      }
    }
  }
}
