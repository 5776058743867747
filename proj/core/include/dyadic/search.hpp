#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/inequalities.hpp"
#include "dyadic/rng.hpp"

namespace dyadic {

enum class FamilyKind { Constant, Cascade, Power, Spike };

std::string_view family_name(FamilyKind k);
FamilyKind family_from_name(std::string_view name);

// Recipe for one strictly positive leaf vector.
struct WeightFamily {
  FamilyKind kind = FamilyKind::Constant;
  double sigma = 0.3;    // cascade: per-level log-volatility
  double a = 0.0;        // power: exponent of ((k+1)/2^D)^a
  double height = 16.0;  // spike: value at leaf 0
  std::uint64_t seed = 0;

  void validate() const;
};

LeafFn gen_weight(const Grid& grid, const WeightFamily& fam);

// Random leaf masses: a multiplicative cascade normalized to total mass 1.
std::vector<double> gen_masses(int depth, double sigma, Rng& rng);

// Randomized instance for one registry case. Deterministic in (seed).
Instance generate_instance(CaseId c, const IneqParams& params, int depth, const WeightFamily& fam,
                           std::uint64_t seed);

struct SearchResult {
  IneqReport report;
  std::uint64_t trial = 0;  // index of the winning random start
  int improvements = 0;     // accepted hill-climb steps on top of it
};

// Random starts plus coordinatewise hill-climb on log-weights.
SearchResult maximize_ratio(CaseId c, const IneqParams& params, int depth, const WeightFamily& fam,
                            int budget, std::uint64_t master_seed);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool low_information = false;  // fewer than 3 points
};

// Ordinary least squares y against x. Throws on fewer than 2 points or a
// degenerate x-range.
SlopeFit slope_fit(std::span<const double> x, std::span<const double> y);

}  // namespace dyadic
