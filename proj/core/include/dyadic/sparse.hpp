#ifndef DYADIC_SPARSE_HPP
#define DYADIC_SPARSE_HPP

#include <span>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/operators.hpp"

namespace dyadic {

// One allocated piece of ground: the node, its mass budget, and the fraction
// of each leaf under the node that the piece occupies (entries in [0, 1],
// one per leaf of the node, left to right).
struct AllocationEntry {
  CubeId cube;
  double budget = 0.0;
  std::vector<double> density;
};

// Disjoint ground allocation witnessing sparseness: for each listed node Q a
// set E(Q) ⊆ Q realized as fractional leaf densities, pairwise disjoint in
// the sense that the per-leaf stack of densities never exceeds 1.
struct SparseAllocation {
  double lambda = 0.0;
  std::vector<AllocationEntry> entries;  // ordered by (level, index)
};

// A sparse family: nodes together with the sparseness parameter eta they are
// claimed to witness (|E(Q)| >= eta μ(Q) for disjoint E(Q)).
struct SparseFamily {
  double eta = 0.0;
  std::vector<CubeId> cubes;
};

// Constructive half of the equivalence "Λ-Carleson <=> 1/Λ-sparse": given τ
// with Carleson norm at most lambda, produces disjoint sets E(Q) ⊆ Q with
// |E(Q)| = τ_Q μ(Q) / lambda exactly. Children are allocated before parents
// and each node fills greedily over its leaves in increasing index order, so
// the output is deterministic. Nodes with τ_Q = 0 are omitted.
SparseAllocation carleson_to_sparse(const Grid& g, const CubeSeq& tau, double lambda);

// Converse direction: the indicator sequence of an eta-sparse family has
// Carleson norm at most 1/eta.
struct SparseToCarlesonResult {
  CubeSeq tau;
  double norm = 0.0;
  double bound = 0.0;  // 1/eta
  bool within_bound = false;
};
SparseToCarlesonResult sparse_to_carleson(const Grid& g, std::span<const CubeId> cubes, double eta);

// Checks that an allocation actually witnesses the claimed budgets and
// disjointness; throws validation_error naming the first violated invariant.
void validate_allocation(const Grid& g, const CubeSeq& tau, const SparseAllocation& alloc,
                         double budget_rel_tol = 1e-12, double stack_tol = 1e-12);

// Per-leaf stack Σ_Q density_Q(leaf) of an allocation.
std::vector<double> allocation_stack(const Grid& g, const SparseAllocation& alloc);

// Sparse operator x ↦ Σ_Q τ_Q Π_i ( μ(Q)^{-(1-rho_i)} ∫_Q f_i )^{r_i} 1_Q(x).
LeafFn sparse_operator(const Grid& g, const CubeSeq& tau, std::span<const LeafFn> fs,
                       const ExponentProfile& prof);

// Sparse form Σ_Q τ_Q μ(Q) Π_i ( μ(Q)^{-(1-rho_i)} ∫_Q f_i )^{r_i}.
double sparse_form(const Grid& g, const CubeSeq& tau, std::span<const LeafFn> fs,
                   const ExponentProfile& prof);

}  // namespace dyadic

#endif
