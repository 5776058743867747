#include <doctest.h>

#include <cmath>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/search.hpp"
#include "dyadic/suite.hpp"

using dyadic::CaseId;
using dyadic::FamilyKind;
using dyadic::Grid;
using dyadic::LeafFn;
using dyadic::Rng;
using dyadic::WeightFamily;

namespace {

Grid uniform_grid(int depth) {
  const std::size_t leaves = std::size_t{1} << depth;
  return Grid(depth, std::vector<double>(leaves, 1.0 / static_cast<double>(leaves)));
}

}  // namespace

TEST_CASE("family names round-trip") {
  for (FamilyKind k :
       {FamilyKind::Constant, FamilyKind::Cascade, FamilyKind::Power, FamilyKind::Spike})
    CHECK(dyadic::family_from_name(dyadic::family_name(k)) == k);
  CHECK_THROWS_AS(dyadic::family_from_name("sawtooth"), dyadic::validation_error);
}

TEST_CASE("weight recipes produce the advertised vectors") {
  const Grid g = uniform_grid(2);

  WeightFamily constant;
  const LeafFn ones = dyadic::gen_weight(g, constant);
  for (std::size_t k = 0; k < 4; ++k) CHECK(ones[k] == 1.0);

  WeightFamily pw;
  pw.kind = FamilyKind::Power;
  pw.a = 0.0;
  const LeafFn flat = dyadic::gen_weight(g, pw);
  for (std::size_t k = 0; k < 4; ++k) CHECK(flat[k] == 1.0);
  pw.a = 1.0;
  const LeafFn ramp = dyadic::gen_weight(g, pw);
  CHECK(ramp[0] == doctest::Approx(0.25));
  CHECK(ramp[1] == doctest::Approx(0.5));
  CHECK(ramp[2] == doctest::Approx(0.75));
  CHECK(ramp[3] == doctest::Approx(1.0));

  WeightFamily spike;
  spike.kind = FamilyKind::Spike;
  spike.height = 16.0;
  const LeafFn spiked = dyadic::gen_weight(g, spike);
  CHECK(spiked[0] == 16.0);
  CHECK(spiked[1] == 1.0);
  CHECK(spiked[3] == 1.0);
}

TEST_CASE("cascade weights are deterministic in the seed") {
  const Grid g = uniform_grid(6);
  WeightFamily fam;
  fam.kind = FamilyKind::Cascade;
  fam.sigma = 0.4;
  fam.seed = 123;
  const LeafFn w1 = dyadic::gen_weight(g, fam);
  const LeafFn w2 = dyadic::gen_weight(g, fam);
  bool identical = true;
  for (std::size_t k = 0; k < w1.size(); ++k) identical = identical && (w1[k] == w2[k]);
  CHECK(identical);

  fam.seed = 124;
  const LeafFn w3 = dyadic::gen_weight(g, fam);
  bool differs = false;
  for (std::size_t k = 0; k < w1.size(); ++k) differs = differs || (w1[k] != w3[k]);
  CHECK(differs);
  for (std::size_t k = 0; k < w3.size(); ++k) CHECK(w3[k] > 0.0);
}

TEST_CASE("family parameters are validated") {
  WeightFamily bad;
  bad.kind = FamilyKind::Cascade;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), dyadic::validation_error);

  bad.kind = FamilyKind::Power;
  bad.a = -1.0;
  CHECK_THROWS_AS(bad.validate(), dyadic::validation_error);

  bad.kind = FamilyKind::Spike;
  bad.height = 0.0;
  CHECK_THROWS_AS(bad.validate(), dyadic::validation_error);

  WeightFamily fine;  // constant needs nothing
  fine.validate();
}

TEST_CASE("random masses form a strictly positive probability vector") {
  Rng rng(77);
  const auto masses = dyadic::gen_masses(5, 0.3, rng);
  REQUIRE(masses.size() == 32);
  double total = 0.0;
  for (double m : masses) {
    CHECK(m > 0.0);
    total += m;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  Rng again(77);
  const auto replay = dyadic::gen_masses(5, 0.3, again);
  bool identical = true;
  for (std::size_t k = 0; k < masses.size(); ++k)
    identical = identical && (masses[k] == replay[k]);
  CHECK(identical);
}

TEST_CASE("generated instances are deterministic and well-shaped") {
  const auto cell = dyadic::default_cells(CaseId::BDual)[0];
  WeightFamily fam;
  fam.kind = FamilyKind::Cascade;
  const auto a = dyadic::generate_instance(CaseId::BDual, cell.params, 5, fam, 42);
  const auto b = dyadic::generate_instance(CaseId::BDual, cell.params, 5, fam, 42);
  REQUIRE(a.weights.size() == 2);
  REQUIRE(a.functions.size() == 2);
  for (std::size_t i = 0; i < a.weights.size(); ++i)
    for (std::size_t k = 0; k < a.weights[i].size(); ++k)
      CHECK(a.weights[i][k] == b.weights[i][k]);
  for (std::size_t lin = 0; lin < a.tau.size(); ++lin)
    CHECK(a.tau.at_lin(lin) == b.tau.at_lin(lin));
  CHECK(a.grid.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.family == "cascade");

  // The characteristic-comparison case completes its last weight so the
  // exponent-weighted log product vanishes.
  const auto fw_cell = dyadic::default_cells(CaseId::FwAp)[0];
  const auto inst = dyadic::generate_instance(CaseId::FwAp, fw_cell.params, 4, fam, 7);
  for (std::size_t x = 0; x < inst.grid.leaf_count(); ++x) {
    double logprod = 0.0;
    for (std::size_t i = 0; i < inst.weights.size(); ++i)
      logprod += fw_cell.params.q[i] * std::log(inst.weights[i][x]);
    CHECK(std::abs(logprod) <= 1e-10);
  }
}

TEST_CASE("the ratio search never falls below its own random starts") {
  const auto cell = dyadic::default_cells(CaseId::SumLt1)[0];
  WeightFamily fam;
  fam.kind = FamilyKind::Cascade;
  const int budget = 8;
  const std::uint64_t master = 2026;

  double best_raw = -1.0;
  for (int trial = 0; trial < budget; ++trial) {
    Rng sub = Rng::substream(master, static_cast<std::uint64_t>(trial));
    const auto inst =
        dyadic::generate_instance(CaseId::SumLt1, cell.params, 4, fam, sub.next());
    const auto rep = dyadic::evaluate_inequality(CaseId::SumLt1, inst, cell.params);
    best_raw = std::max(best_raw, rep.ratio);
  }

  const auto result = dyadic::maximize_ratio(CaseId::SumLt1, cell.params, 4, fam, budget, master);
  CHECK(result.report.ratio >= best_raw * (1.0 - 1e-12));
  CHECK(result.improvements >= 0);
  CHECK(result.trial < static_cast<std::uint64_t>(budget));
  CHECK_FALSE(result.report.hard_failure);

  CHECK_THROWS_AS(dyadic::maximize_ratio(CaseId::SumLt1, cell.params, 4, fam, 0, master),
                  dyadic::validation_error);
}

TEST_CASE("skewing a power weight grows the two-weight characteristic") {
  const Grid g = uniform_grid(4);
  const std::vector<double> q{1.0, 1.0};
  auto char_at = [&](double a) {
    WeightFamily fam;
    fam.kind = FamilyKind::Power;
    fam.a = a;
    std::vector<LeafFn> ws{dyadic::gen_weight(g, fam)};
    ws.push_back(dyadic::dependent_complete(ws, q));
    return dyadic::muckenhoupt(g, ws, dyadic::CharExponents{q});
  };
  const double mild = char_at(0.5);
  const double steep = char_at(2.0);
  CHECK(mild >= 1.0);
  CHECK(steep > mild);
}

TEST_CASE("least squares recovers an exact line") {
  const std::vector<double> x{0.0, 1.0, 2.0, 5.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 11.0};
  const auto fit = dyadic::slope_fit(x, y);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(fit.low_information);
}

TEST_CASE("least squares edge cases") {
  const std::vector<double> two_x{1.0, 2.0};
  const std::vector<double> two_y{4.0, 9.0};
  const auto two = dyadic::slope_fit(two_x, two_y);
  CHECK(two.slope == doctest::Approx(5.0));
  CHECK(two.low_information);

  const std::vector<double> flat_x{0.0, 1.0, 2.0};
  const std::vector<double> flat_y{3.0, 3.0, 3.0};
  const auto flat = dyadic::slope_fit(flat_x, flat_y);
  CHECK(flat.slope == doctest::Approx(0.0));
  CHECK(flat.r2 == doctest::Approx(1.0));

  const std::vector<double> same_x{2.0, 2.0, 2.0};
  CHECK_THROWS_AS(dyadic::slope_fit(same_x, flat_y), dyadic::validation_error);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(dyadic::slope_fit(one, one), dyadic::validation_error);
  CHECK_THROWS_AS(dyadic::slope_fit(two_x, one), dyadic::validation_error);
}
