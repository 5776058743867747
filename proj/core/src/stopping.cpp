#include "dyadic/stopping.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dyadic/characteristics.hpp"
#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

// Top-down family construction shared by both stopping rules. `joins`
// decides, given the score of the candidate node and the score of its current
// family ancestor, whether the candidate becomes a member.
template <typename Joins>
StoppingFamily build_family(const Grid& g, const std::vector<double>& score, Joins joins) {
  const std::size_t n = g.cube_count();
  StoppingFamily fam;
  fam.member.assign(n, 0);
  fam.parent.assign(n, 0);

  // ref[lin] = linear id of the family ancestor in force at lin.
  std::vector<std::size_t> ref(n);
  fam.member[0] = 1;
  fam.parent[0] = 0;
  ref[0] = 0;
  fam.cubes.push_back(0);

  for (std::size_t lin = 1; lin < n; ++lin) {
    const std::size_t up = (lin - 1) / 2;
    const std::size_t anchor = ref[up];
    if (joins(score[lin], score[anchor])) {
      fam.member[lin] = 1;
      fam.parent[lin] = lin;
      ref[lin] = lin;
      fam.cubes.push_back(lin);
    } else {
      fam.parent[lin] = anchor;
      ref[lin] = anchor;
    }
  }
  return fam;
}

}  // namespace

StoppingFamily build_stopping(const Grid& g, const CubeSeq& lam) {
  if (lam.depth() != g.depth())
    throw validation_error("node sequence depth does not match grid depth");
  lam.validate("stopping sequence");
  return build_family(g, lam.values(),
                      [](double candidate, double anchor) { return candidate >= 2.0 * anchor; });
}

StrongStoppingResult strong_stopping(const Grid& g, std::span<const LeafFn> fs,
                                     std::span<const LeafFn> ws, const ExponentProfile& prof) {
  if (fs.size() != ws.size())
    throw validation_error("strong stopping needs one weight per function slot");
  if (fs.empty()) throw validation_error("strong stopping needs at least one function slot");
  prof.validate(fs.size());
  require_weights(g, ws);
  for (const auto& f : fs)
    if (f.size() != g.leaf_count())
      throw validation_error("every function must have one value per leaf of the grid");

  // Scores log Π_i (μ(Q)^{-(1-rho_i)} ∫_Q f_i w_i)^{r_i}; -inf marks nodes
  // where some integral vanishes.
  std::vector<CubeIntegrals> ints;
  ints.reserve(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    std::vector<double> prod(g.leaf_count());
    for (std::size_t x = 0; x < prod.size(); ++x) prod[x] = fs[i][x] * ws[i][x];
    ints.emplace_back(g, prod);
  }
  const auto score = cube_scores(g, ints, prof.r, prof.rho);

  const std::size_t m = fs.size() + 1;
  const double log_gain = prof.r_sum() * std::log(2.0 * static_cast<double>(m));

  // A node joins when its product of averages exceeds the family anchor's by
  // the gain factor, ties included. The scores are rounded logs, so an exact
  // tie can land a few ulps on either side of the threshold; the slack keeps
  // ties joining while staying far below the 1e-9 tolerance of the
  // child-fraction certificate below. Nodes with vanishing product never
  // join: if the anchor already vanishes, everything below vanishes too, and
  // treating those as non-members keeps the residual sets exhaustive.
  constexpr double tie_slack = 1e-12;
  StrongStoppingResult out;
  out.family = build_family(g, score, [log_gain](double candidate, double anchor) {
    return std::isfinite(candidate) && candidate >= anchor + log_gain - tie_slack;
  });

  // Residual ground: each member's leaves minus its stopping children's
  // leaves. Children of a member F are members whose π-anchor above is F.
  const auto& fam = out.family;
  out.residual.resize(fam.cubes.size());
  std::vector<std::size_t> member_slot(g.cube_count(), 0);
  for (std::size_t s = 0; s < fam.cubes.size(); ++s) member_slot[fam.cubes[s]] = s;

  for (std::size_t s = 0; s < fam.cubes.size(); ++s) {
    const CubeId q = cube_from_linear(fam.cubes[s]);
    const auto [lo, hi] = g.leaf_range(q);
    out.residual[s].assign(hi - lo, 1.0);
  }
  std::vector<double> child_mass(fam.cubes.size(), 0.0);
  for (std::size_t s = 1; s < fam.cubes.size(); ++s) {  // skip the root member
    const std::size_t lin = fam.cubes[s];
    const std::size_t up = (lin - 1) / 2;
    const std::size_t anchor = fam.parent[up];
    const std::size_t anchor_slot = member_slot[anchor];
    const CubeId child = cube_from_linear(lin);
    const CubeId anchor_cube = cube_from_linear(anchor);
    const auto [clo, chi] = g.leaf_range(child);
    const auto [alo, ahi] = g.leaf_range(anchor_cube);
    (void)ahi;
    for (std::size_t leaf = clo; leaf < chi; ++leaf) out.residual[anchor_slot][leaf - alo] = 0.0;
    child_mass[anchor_slot] += g.measure_lin(lin);
  }

  out.worst_child_fraction = 0.0;
  for (std::size_t s = 0; s < fam.cubes.size(); ++s) {
    const double frac = child_mass[s] / g.measure_lin(fam.cubes[s]);
    out.worst_child_fraction = std::max(out.worst_child_fraction, frac);
  }
  if (out.worst_child_fraction > 0.5 * (1.0 + 1e-9))
    throw std::logic_error("stopping children cover more than half of a family member; "
                           "the sparseness certificate failed");

  out.sparse.eta = 0.5;
  out.sparse.cubes.reserve(fam.cubes.size());
  for (std::size_t lin : fam.cubes) out.sparse.cubes.push_back(cube_from_linear(lin));
  return out;
}

}  // namespace dyadic
