#include "dyadic/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "dyadic/characteristics.hpp"
#include "dyadic/errors.hpp"

namespace dyadic {

SparseAllocation carleson_to_sparse(const Grid& g, const CubeSeq& tau, double lambda) {
  if (tau.depth() != g.depth())
    throw validation_error("node sequence depth does not match grid depth");
  tau.validate("Carleson sequence");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw validation_error("sparseness scale lambda must be positive and finite");

  SparseAllocation out;
  out.lambda = lambda;

  // Fraction of each leaf already handed out to strictly smaller nodes.
  std::vector<double> stack(g.leaf_count(), 0.0);

  // Children before parents: walk levels bottom-up, left to right. Within a
  // node, fill greedily over its leaves in increasing index order. Feasibility
  // is the inductive content of the Carleson bound: everything taken inside Q
  // so far belongs to strictly smaller nodes, whose budgets sum to at most
  // (‖τ‖ - τ_Q) μ(Q) / lambda <= (1 - τ_Q / lambda) μ(Q).
  for (int level = g.depth(); level >= 0; --level) {
    const std::size_t level_off = (std::size_t{1} << level) - 1;
    const std::uint64_t count = std::uint64_t{1} << level;
    for (std::uint64_t k = 0; k < count; ++k) {
      const CubeId q{level, k};
      const std::size_t lin = level_off + k;
      const double tq = tau.at_lin(lin);
      if (tq == 0.0) continue;
      const double budget = tq * g.measure_lin(lin) / lambda;

      AllocationEntry entry;
      entry.cube = q;
      entry.budget = budget;
      const auto [lo, hi] = g.leaf_range(q);
      entry.density.assign(hi - lo, 0.0);

      double need = budget;
      for (std::size_t leaf = lo; leaf < hi && need > 0.0; ++leaf) {
        const double room = 1.0 - stack[leaf];
        if (room <= 0.0) continue;
        const double capacity = room * g.leaf_mass(leaf);
        const double take = std::min(need, capacity);
        const double frac = take / g.leaf_mass(leaf);
        entry.density[leaf - lo] = frac;
        stack[leaf] += frac;
        need -= take;
      }
      if (need > budget * 1e-9 + 1e-300)
        throw validation_error("allocation infeasible at cube " + cube_to_string(q) +
                               ": the Carleson norm of tau exceeds lambda = " + std::to_string(lambda));
      out.entries.push_back(std::move(entry));
    }
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const AllocationEntry& a, const AllocationEntry& b) {
              return cube_linear(a.cube) < cube_linear(b.cube);
            });
  return out;
}

std::vector<double> allocation_stack(const Grid& g, const SparseAllocation& alloc) {
  std::vector<double> stack(g.leaf_count(), 0.0);
  for (const auto& entry : alloc.entries) {
    g.require(entry.cube);
    const auto [lo, hi] = g.leaf_range(entry.cube);
    if (entry.density.size() != hi - lo)
      throw validation_error("allocation entry for cube " + cube_to_string(entry.cube) +
                             " must carry one density per covered leaf");
    for (std::size_t leaf = lo; leaf < hi; ++leaf) stack[leaf] += entry.density[leaf - lo];
  }
  return stack;
}

void validate_allocation(const Grid& g, const CubeSeq& tau, const SparseAllocation& alloc,
                         double budget_rel_tol, double stack_tol) {
  for (const auto& entry : alloc.entries) {
    const auto [lo, hi] = g.leaf_range(entry.cube);
    double mass = 0.0;
    for (std::size_t leaf = lo; leaf < hi; ++leaf) {
      const double frac = entry.density[leaf - lo];
      if (!(frac >= 0.0) || !(frac <= 1.0 + stack_tol))
        throw validation_error("allocation density out of [0,1] at cube " + cube_to_string(entry.cube));
      mass += frac * g.leaf_mass(leaf);
    }
    const double budget = tau.at(entry.cube) * g.measure(entry.cube) / alloc.lambda;
    if (std::abs(mass - budget) > budget_rel_tol * budget)
      throw validation_error("allocation for cube " + cube_to_string(entry.cube) + " has mass " +
                             std::to_string(mass) + ", budget requires " + std::to_string(budget));
  }
  const auto stack = allocation_stack(g, alloc);
  for (std::size_t leaf = 0; leaf < stack.size(); ++leaf)
    if (stack[leaf] > 1.0 + stack_tol)
      throw validation_error("allocation stacks to " + std::to_string(stack[leaf]) + " > 1 at leaf " +
                             std::to_string(leaf));
}

SparseToCarlesonResult sparse_to_carleson(const Grid& g, std::span<const CubeId> cubes, double eta) {
  if (!(eta > 0.0) || !(eta <= 1.0))
    throw validation_error("sparseness parameter eta must lie in (0, 1]");
  CubeSeq tau(g.depth());
  for (CubeId q : cubes) {
    g.require(q);
    tau.at(q) = 1.0;
  }
  SparseToCarlesonResult res{std::move(tau), 0.0, 1.0 / eta, false};
  res.norm = carleson_norm(g, res.tau);
  res.within_bound = res.norm <= res.bound * (1.0 + 1e-12);
  return res;
}

namespace {

// τ_Q times the product of powered averages at every node, in linear layout.
std::vector<double> sparse_terms(const Grid& g, const CubeSeq& tau, std::span<const LeafFn> fs,
                                 const ExponentProfile& prof) {
  if (tau.depth() != g.depth())
    throw validation_error("node sequence depth does not match grid depth");
  tau.validate("sparse coefficient sequence");
  if (fs.empty()) throw validation_error("sparse expressions need at least one function slot");
  prof.validate(fs.size());
  std::vector<CubeIntegrals> ints;
  ints.reserve(fs.size());
  for (const auto& f : fs) {
    if (f.size() != g.leaf_count())
      throw validation_error("every function must have one value per leaf of the grid");
    ints.emplace_back(g, f);
  }
  auto score = cube_scores(g, ints, prof.r, prof.rho);
  for (std::size_t lin = 0; lin < score.size(); ++lin) {
    const double t = tau.at_lin(lin);
    score[lin] = (t == 0.0) ? 0.0 : t * std::exp(score[lin]);
  }
  return score;
}

}  // namespace

LeafFn sparse_operator(const Grid& g, const CubeSeq& tau, std::span<const LeafFn> fs,
                       const ExponentProfile& prof) {
  const auto term = sparse_terms(g, tau, fs, prof);
  std::vector<double> running(term.size());
  running[0] = term[0];
  const std::size_t internal = g.leaf_count() - 1;
  for (std::size_t lin = 0; lin < internal; ++lin) {
    running[2 * lin + 1] = running[lin] + term[2 * lin + 1];
    running[2 * lin + 2] = running[lin] + term[2 * lin + 2];
  }
  std::vector<double> out(g.leaf_count());
  const std::size_t leaf_off = g.leaf_count() - 1;
  for (std::size_t i = 0; i < g.leaf_count(); ++i) out[i] = running[leaf_off + i];
  return LeafFn(std::move(out));
}

double sparse_form(const Grid& g, const CubeSeq& tau, std::span<const LeafFn> fs,
                   const ExponentProfile& prof) {
  const auto term = sparse_terms(g, tau, fs, prof);
  double sum = 0.0;
  for (std::size_t lin = 0; lin < term.size(); ++lin) sum += term[lin] * g.measure_lin(lin);
  return sum;
}

}  // namespace dyadic
