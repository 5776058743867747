#include "dyadic/operators.hpp"

#include <cmath>

#include "dyadic/errors.hpp"

namespace dyadic {

double ExponentProfile::r_sum() const {
  double s = 0.0;
  for (double x : r) s += x;
  return s;
}

void ExponentProfile::validate(std::size_t slots) const {
  if (r.size() != slots || rho.size() != slots)
    throw validation_error("exponent profile must carry one (r, rho) pair per function slot: got " +
                           std::to_string(r.size()) + " powers and " + std::to_string(rho.size()) +
                           " fractional indices for " + std::to_string(slots) + " slots");
  for (std::size_t i = 0; i < slots; ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(r[i]))
      throw validation_error("maximal operator powers must satisfy 0 < r < inf; slot " + std::to_string(i) +
                             " has r = " + std::to_string(r[i]));
    if (!(rho[i] >= 0.0) || !(rho[i] < 1.0))
      throw validation_error("fractional indices must satisfy 0 <= rho < 1; slot " + std::to_string(i) +
                             " has rho = " + std::to_string(rho[i]));
  }
}

std::vector<double> cube_scores(const Grid& g, std::span<const CubeIntegrals> ints,
                                std::span<const double> powers, std::span<const double> rho) {
  std::vector<double> score(g.cube_count(), 0.0);
  for (std::size_t lin = 0; lin < score.size(); ++lin) {
    const double logmu = g.log_measure_lin(lin);
    double s = 0.0;
    for (std::size_t i = 0; i < ints.size(); ++i)
      s += powers[i] * (ints[i].log_integral_lin(lin) - (1.0 - rho[i]) * logmu);
    score[lin] = s;
  }
  return score;
}

namespace {

void check_functions(const Grid& g, std::span<const LeafFn> fs) {
  if (fs.empty()) throw validation_error("the multilinear maximal function needs at least one function slot");
  for (const auto& f : fs)
    if (f.size() != g.leaf_count())
      throw validation_error("every function must have one value per leaf of the grid");
}

// Pushes the running chain maximum of `score` from the root to the leaves and
// returns its exponential at each leaf.
LeafFn chain_max_exp(const Grid& g, const std::vector<double>& score) {
  std::vector<double> running(score.size());
  running[0] = score[0];
  const std::size_t internal = g.leaf_count() - 1;
  for (std::size_t lin = 0; lin < internal; ++lin) {
    running[2 * lin + 1] = std::max(running[lin], score[2 * lin + 1]);
    running[2 * lin + 2] = std::max(running[lin], score[2 * lin + 2]);
  }
  std::vector<double> out(g.leaf_count());
  const std::size_t leaf_off = g.leaf_count() - 1;
  for (std::size_t i = 0; i < g.leaf_count(); ++i) out[i] = std::exp(running[leaf_off + i]);
  return LeafFn(std::move(out));
}

}  // namespace

LeafFn multilinear_maximal(const Grid& g, std::span<const LeafFn> fs, const ExponentProfile& prof) {
  check_functions(g, fs);
  prof.validate(fs.size());
  std::vector<CubeIntegrals> ints;
  ints.reserve(fs.size());
  for (const auto& f : fs) ints.emplace_back(g, f);
  const auto score = cube_scores(g, ints, prof.r, prof.rho);
  return chain_max_exp(g, score);
}

LeafFn fractional_maximal_wrt(const Grid& g, const LeafFn& f, double rho, const LeafFn& nu) {
  if (f.size() != g.leaf_count() || nu.size() != g.leaf_count())
    throw validation_error("f and nu must have one value per leaf of the grid");
  if (!(rho >= 0.0) || !(rho < 1.0))
    throw validation_error("fractional indices must satisfy 0 <= rho < 1; got " + std::to_string(rho));
  if (!nu.strictly_positive())
    throw validation_error("the auxiliary measure nu must be strictly positive on every leaf");

  // Bottom-up masses of ν and of f dν, then the usual chain maximum.
  const std::size_t n = g.cube_count();
  std::vector<double> nu_mass(n), fnu(n);
  const std::size_t leaf_off = g.leaf_count() - 1;
  for (std::size_t i = 0; i < g.leaf_count(); ++i) {
    nu_mass[leaf_off + i] = nu[i];
    fnu[leaf_off + i] = f[i] * nu[i];
  }
  for (std::size_t lin = leaf_off; lin-- > 0;) {
    nu_mass[lin] = nu_mass[2 * lin + 1] + nu_mass[2 * lin + 2];
    fnu[lin] = fnu[2 * lin + 1] + fnu[2 * lin + 2];
  }
  std::vector<double> score(n);
  for (std::size_t lin = 0; lin < n; ++lin)
    score[lin] = std::log(fnu[lin]) - (1.0 - rho) * std::log(nu_mass[lin]);
  return chain_max_exp(g, score);
}

LeafFn seq_maximal(const Grid& g, const CubeSeq& lam) {
  if (lam.depth() != g.depth())
    throw validation_error("node sequence depth " + std::to_string(lam.depth()) +
                           " does not match grid depth " + std::to_string(g.depth()));
  lam.validate("maximal operator input sequence");
  std::vector<double> running(g.cube_count());
  running[0] = lam.at_lin(0);
  const std::size_t internal = g.leaf_count() - 1;
  for (std::size_t lin = 0; lin < internal; ++lin) {
    running[2 * lin + 1] = std::max(running[lin], lam.at_lin(2 * lin + 1));
    running[2 * lin + 2] = std::max(running[lin], lam.at_lin(2 * lin + 2));
  }
  std::vector<double> out(g.leaf_count());
  const std::size_t leaf_off = g.leaf_count() - 1;
  for (std::size_t i = 0; i < g.leaf_count(); ++i) out[i] = running[leaf_off + i];
  return LeafFn(std::move(out));
}

}  // namespace dyadic
