#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "dyadic/characteristics.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/inequalities.hpp"
#include "dyadic/operators.hpp"
#include "dyadic/rng.hpp"
#include "dyadic/search.hpp"
#include "dyadic/sparse.hpp"
#include "dyadic/suite.hpp"

namespace {

dyadic::Grid make_grid(int depth, std::uint64_t seed) {
  dyadic::Rng rng(seed);
  return dyadic::Grid(depth, dyadic::gen_masses(depth, 0.3, rng));
}

std::vector<dyadic::LeafFn> make_weights(const dyadic::Grid& g, int m, std::uint64_t seed) {
  std::vector<dyadic::LeafFn> ws;
  for (int i = 0; i < m; ++i) {
    dyadic::WeightFamily fam;
    fam.kind = dyadic::FamilyKind::Cascade;
    fam.sigma = 0.8;
    fam.seed = seed + static_cast<std::uint64_t>(i);
    ws.push_back(dyadic::gen_weight(g, fam));
  }
  return ws;
}

dyadic::CubeSeq make_tau(int depth, std::uint64_t seed) {
  dyadic::Rng rng(seed);
  dyadic::CubeSeq tau(depth);
  for (std::size_t lin = 0; lin < tau.size(); ++lin)
    if (rng.u01() < 0.4) tau.at_lin(lin) = rng.u01();
  tau.at_lin(0) = 1.0;
  return tau;
}

void BM_MultilinearMaximal(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto g = make_grid(depth, 11);
  const auto ws = make_weights(g, 2, 21);
  const dyadic::ExponentProfile prof{{1.0, 0.7}, {0.0, 0.2}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dyadic::multilinear_maximal(g, ws, prof));
  }
  state.SetComplexityN(std::int64_t{1} << state.range(0));
}
BENCHMARK(BM_MultilinearMaximal)->DenseRange(6, 14, 2)->Complexity();

void BM_FujiiWilson(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto g = make_grid(depth, 12);
  const auto ws = make_weights(g, 2, 22);
  const dyadic::CharExponents ce{{1.0, 0.7}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dyadic::fujii_wilson(g, ws, ce));
  }
  state.SetComplexityN(std::int64_t{1} << state.range(0));
}
BENCHMARK(BM_FujiiWilson)->DenseRange(6, 14, 2)->Complexity();

void BM_CarlesonToSparse(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto g = make_grid(depth, 13);
  const auto tau = make_tau(depth, 23);
  const double lambda = dyadic::carleson_norm(g, tau);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dyadic::carleson_to_sparse(g, tau, lambda));
  }
  state.SetComplexityN(std::int64_t{1} << state.range(0));
}
BENCHMARK(BM_CarlesonToSparse)->DenseRange(6, 14, 2)->Complexity();

void BM_SummationCase(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const auto cells = dyadic::default_cells(dyadic::CaseId::Key);
  dyadic::WeightFamily fam;
  fam.kind = dyadic::FamilyKind::Cascade;
  fam.sigma = 1.0;
  const auto inst =
      dyadic::generate_instance(dyadic::CaseId::Key, cells[0].params, depth, fam, 31);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dyadic::evaluate_inequality(dyadic::CaseId::Key, inst, cells[0].params));
  }
  state.SetComplexityN(std::int64_t{1} << state.range(0));
}
BENCHMARK(BM_SummationCase)->DenseRange(4, 12, 2)->Complexity();

}  // namespace

BENCHMARK_MAIN();
