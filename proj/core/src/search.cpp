#include "dyadic/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyadic/errors.hpp"
#include "dyadic/sparse.hpp"

namespace dyadic {

std::string_view family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Constant:
      return "constant";
    case FamilyKind::Cascade:
      return "cascade";
    case FamilyKind::Power:
      return "power";
    case FamilyKind::Spike:
      return "spike";
  }
  return "?";
}

FamilyKind family_from_name(std::string_view name) {
  if (name == "constant") return FamilyKind::Constant;
  if (name == "cascade") return FamilyKind::Cascade;
  if (name == "power") return FamilyKind::Power;
  if (name == "spike") return FamilyKind::Spike;
  throw validation_error("unknown weight family '" + std::string(name) + "'");
}

void WeightFamily::validate() const {
  switch (kind) {
    case FamilyKind::Cascade:
      if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw validation_error("cascade volatility must be positive; got " + std::to_string(sigma));
      break;
    case FamilyKind::Power:
      if (!(a > -1.0) || !std::isfinite(a))
        throw validation_error("power exponent must exceed -1; got " + std::to_string(a));
      break;
    case FamilyKind::Spike:
      if (!(height > 0.0) || !std::isfinite(height))
        throw validation_error("spike height must be positive; got " + std::to_string(height));
      break;
    case FamilyKind::Constant:
      break;
  }
}

LeafFn gen_weight(const Grid& grid, const WeightFamily& fam) {
  fam.validate();
  const std::size_t leaves = grid.leaf_count();
  std::vector<double> v(leaves, 1.0);
  switch (fam.kind) {
    case FamilyKind::Constant:
      break;
    case FamilyKind::Cascade: {
      // One +-sigma log increment per non-root node; a leaf multiplies the
      // increments along its root-to-leaf path.
      Rng rng(fam.seed);
      const std::size_t n = grid.cube_count();
      std::vector<double> logv(n, 0.0);
      for (std::size_t lin = 1; lin < n; ++lin)
        logv[lin] = logv[(lin - 1) / 2] + fam.sigma * rng.sign();
      const std::size_t off = leaves - 1;
      for (std::size_t k = 0; k < leaves; ++k) v[k] = std::exp(logv[off + k]);
      break;
    }
    case FamilyKind::Power: {
      const double scale = static_cast<double>(leaves);
      for (std::size_t k = 0; k < leaves; ++k)
        v[k] = std::pow((static_cast<double>(k) + 1.0) / scale, fam.a);
      break;
    }
    case FamilyKind::Spike:
      v[0] = fam.height;
      break;
  }
  return LeafFn(std::move(v));
}

std::vector<double> gen_masses(int depth, double sigma, Rng& rng) {
  const std::size_t leaves = std::size_t{1} << depth;
  const std::size_t n = 2 * leaves - 1;
  std::vector<double> logv(n, 0.0);
  for (std::size_t lin = 1; lin < n; ++lin)
    logv[lin] = logv[(lin - 1) / 2] + sigma * rng.sign();
  std::vector<double> out(leaves);
  double total = 0.0;
  const std::size_t off = leaves - 1;
  for (std::size_t k = 0; k < leaves; ++k) {
    out[k] = std::exp(logv[off + k]);
    total += out[k];
  }
  for (double& x : out) x /= total;
  return out;
}

namespace {

// Nonnegative function with a random zero set but never identically zero.
LeafFn gen_function(const Grid& grid, double sigma, Rng& rng) {
  const std::size_t leaves = grid.leaf_count();
  const std::size_t n = grid.cube_count();
  std::vector<double> logv(n, 0.0);
  for (std::size_t lin = 1; lin < n; ++lin)
    logv[lin] = logv[(lin - 1) / 2] + sigma * rng.sign();
  const double zero_frac = (rng.below(3) == 0) ? 0.25 : 0.0;
  std::vector<double> v(leaves);
  bool any = false;
  const std::size_t off = leaves - 1;
  for (std::size_t k = 0; k < leaves; ++k) {
    if (zero_frac > 0.0 && rng.u01() < zero_frac) {
      v[k] = 0.0;
    } else {
      v[k] = std::exp(logv[off + k]);
      any = true;
    }
  }
  if (!any) v[0] = 1.0;
  return LeafFn(std::move(v));
}

CubeSeq gen_tau(int depth, Rng& rng) {
  CubeSeq tau(depth);
  const double support = (rng.below(3) == 0) ? 0.15 : ((rng.below(2) == 0) ? 0.5 : 1.0);
  bool any = false;
  for (std::size_t lin = 0; lin < tau.size(); ++lin) {
    if (rng.u01() < support) {
      tau.at_lin(lin) = rng.u01();
      any = true;
    }
  }
  if (!any) tau.at_lin(0) = 1.0;
  return tau;
}

CubeSeq gen_lambda(const Grid& grid, double sigma, Rng& rng) {
  CubeSeq lam(grid.depth());
  if (rng.below(2) == 0) {
    // Cube averages of a random function: natural stopping data.
    const LeafFn f = gen_function(grid, sigma, rng);
    const CubeIntegrals ints(grid, f);
    for (std::size_t lin = 0; lin < lam.size(); ++lin)
      lam.at_lin(lin) = ints.integral_lin(lin) / grid.measure_lin(lin);
  } else {
    for (std::size_t lin = 0; lin < lam.size(); ++lin)
      if (rng.below(4) != 0) lam.at_lin(lin) = rng.u01();
  }
  return lam;
}

WeightFamily perturbed(const WeightFamily& base, Rng& rng) {
  WeightFamily fam = base;
  fam.seed = rng.next();
  switch (fam.kind) {
    case FamilyKind::Cascade:
      fam.sigma = base.sigma * (0.5 + rng.u01());
      break;
    case FamilyKind::Power:
      fam.a = base.a + 0.2 * (2.0 * rng.u01() - 1.0);
      if (fam.a <= -1.0) fam.a = -0.9;
      break;
    case FamilyKind::Spike:
      fam.height = base.height * std::exp(rng.u01() - 0.5);
      break;
    case FamilyKind::Constant:
      break;
  }
  return fam;
}

}  // namespace

Instance generate_instance(CaseId c, const IneqParams& params, int depth, const WeightFamily& fam,
                           std::uint64_t seed) {
  params.validate(c);
  Rng rng(seed);

  Grid grid(depth, gen_masses(depth, 0.3, rng));
  Instance inst(std::move(grid), LeafFn(std::vector<double>(std::size_t{1} << depth, 1.0)));
  inst.seed = seed;
  inst.family = std::string(family_name(fam.kind));
  const Grid& g = inst.grid;

  const std::size_t wslots = case_weight_slots(c, params.m);
  if (wslots > 0) {
    const std::size_t free_slots = (c == CaseId::FwAp) ? wslots - 1 : wslots;
    for (std::size_t i = 0; i < free_slots; ++i) inst.weights.push_back(gen_weight(g, perturbed(fam, rng)));
    if (c == CaseId::FwAp)
      inst.weights.push_back(dependent_complete(inst.weights, params.q));
  }

  const std::size_t fslots = case_function_slots(c, params.m);
  for (std::size_t i = 0; i < fslots; ++i) inst.functions.push_back(gen_function(g, 0.4, rng));

  if (case_uses_tau(c)) inst.tau = gen_tau(depth, rng);

  const std::size_t lslots = case_lambda_slots(c, params.m);
  for (std::size_t i = 0; i < lslots; ++i) inst.lambdas.push_back(gen_lambda(g, 0.4, rng));

  if (case_uses_aux(c)) inst.aux = gen_weight(g, perturbed(fam, rng));

  if (c == CaseId::Concave && params.disjoint_ground) {
    // A Carleson allocation of tau is a valid family of disjoint pieces.
    const double lambda = std::max(carleson_norm(g, inst.tau), 1e-12);
    inst.ground = carleson_to_sparse(g, inst.tau, lambda);
  }
  return inst;
}

namespace {

double try_eval(CaseId c, const Instance& inst, const IneqParams& params) {
  const IneqReport rep = evaluate_inequality(c, inst, params);
  if (rep.hard_failure) return -1.0;
  return rep.ratio;
}

}  // namespace

SearchResult maximize_ratio(CaseId c, const IneqParams& params, int depth, const WeightFamily& fam,
                            int budget, std::uint64_t master_seed) {
  if (budget < 1) throw validation_error("search budget must be at least 1 trial");
  params.validate(c);

  SearchResult best;
  best.report.ratio = -1.0;
  Instance best_inst(Grid(0, {1.0}), LeafFn(std::vector<double>{1.0}));
  for (int trial = 0; trial < budget; ++trial) {
    Rng sub = Rng::substream(master_seed, static_cast<std::uint64_t>(trial));
    Instance inst = generate_instance(c, params, depth, fam, sub.next());
    const IneqReport rep = evaluate_inequality(c, inst, params);
    if (!rep.hard_failure && rep.ratio > best.report.ratio) {
      best.report = rep;
      best.trial = static_cast<std::uint64_t>(trial);
      best_inst = std::move(inst);
    }
  }
  if (best.report.ratio < 0.0) {
    best.report.ratio = 0.0;
    return best;
  }

  // Coordinatewise ascent on the logs of the positive leaf vectors. Weights
  // are the coordinates except where a case carries its own measure, and the
  // dependent slot of the characteristic comparison is re-completed after
  // every move.
  Instance& inst = best_inst;
  std::vector<LeafFn*> coords;
  if (case_uses_aux(c)) {
    coords.push_back(&inst.aux);
  } else {
    const std::size_t mutable_slots =
        (c == CaseId::FwAp) ? inst.weights.size() - 1 : inst.weights.size();
    for (std::size_t i = 0; i < mutable_slots; ++i) coords.push_back(&inst.weights[i]);
  }
  if (coords.empty()) return best;

  double current = best.report.ratio;
  for (double delta = 0.5; delta >= 1e-3; delta *= 0.5) {
    const double up = std::exp(delta), down = std::exp(-delta);
    for (LeafFn* w : coords) {
      for (std::size_t leaf = 0; leaf < w->size(); ++leaf) {
        const double old = (*w)[leaf];
        for (double factor : {up, down}) {
          w->set(leaf, old * factor);
          if (c == CaseId::FwAp)
            inst.weights.back() =
                dependent_complete(std::span<const LeafFn>(inst.weights.data(), inst.weights.size() - 1),
                                   params.q);
          const double ratio = try_eval(c, inst, params);
          if (ratio > current) {
            current = ratio;
            ++best.improvements;
            break;
          }
          w->set(leaf, old);
        }
      }
    }
  }
  if (c == CaseId::FwAp)
    inst.weights.back() = dependent_complete(
        std::span<const LeafFn>(inst.weights.data(), inst.weights.size() - 1), params.q);
  best.report = evaluate_inequality(c, inst, params);
  return best;
}

SlopeFit slope_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw validation_error("slope fit needs matching x and y lengths");
  const std::size_t n = x.size();
  if (n < 2) throw validation_error("slope fit needs at least 2 points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  // Rounding in the mean makes sums of squared deviations of identical inputs
  // come out a few ulp above zero, so degeneracy is judged by relative spread.
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double xspread = *xmax - *xmin;
  const double yspread = *ymax - *ymin;
  if (!(xspread > 1e-12 * std::max(1.0, std::abs(mx))))
    throw validation_error("slope fit needs a non-degenerate x-range (all abscissae coincide)");
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const bool flat = !(yspread > 1e-12 * std::max(1.0, std::abs(my)));
  fit.r2 = flat ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.low_information = n < 3;
  return fit;
}

}  // namespace dyadic
