#ifndef DYADIC_STOPPING_HPP
#define DYADIC_STOPPING_HPP

#include <span>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/operators.hpp"
#include "dyadic/sparse.hpp"

namespace dyadic {

// A stopping family over a grid: membership flags, the map π sending every
// node to the smallest family member containing it, and the members in
// increasing linear order.
struct StoppingFamily {
  std::vector<std::uint8_t> member;   // per node, 0/1
  std::vector<std::size_t> parent;    // per node: linear id of π(node)
  std::vector<std::size_t> cubes;     // linear ids of the members, ascending

  bool is_member_lin(std::size_t lin) const { return member[lin] != 0; }
};

// The minimal family F containing the root such that whenever F ∈ F, every
// maximal node F' strictly inside F with λ_{F'} >= 2 λ_F also belongs to F
// (ties join). Deterministic top-down construction.
StoppingFamily build_stopping(const Grid& g, const CubeSeq& lam);

// Stopping construction certifying the sparse domination of the multilinear
// maximal function of (f_1 w_1, ..., f_k w_k): starting from the root, the
// maximal nodes where the product of powered averages exceeds its value on
// the current family node by the factor (2m)^{Σ r_i} join, with m = k + 1.
// Each member keeps the part of its ground not covered by its stopping
// children; those residual sets are disjoint, cover everything, and occupy at
// least half of each member, which certifies that the family indicator is
// 2-Carleson (equivalently 1/2-sparse). The construction also yields the
// pointwise bound  M(fw)(x) <= (2m)^{Σ r_i} Σ_F [product of averages on F] 1_{residual(F)}(x).
struct StrongStoppingResult {
  StoppingFamily family;
  // Residual ground per family member, aligned with family.cubes: 0/1
  // densities over the member's leaf range.
  std::vector<std::vector<double>> residual;
  // Max over members of (stopping children mass) / (member mass); the
  // construction guarantees <= 1/2 and this is asserted.
  double worst_child_fraction = 0.0;
  SparseFamily sparse;  // the members with eta = 1/2
};

StrongStoppingResult strong_stopping(const Grid& g, std::span<const LeafFn> fs,
                                     std::span<const LeafFn> ws, const ExponentProfile& prof);

}  // namespace dyadic

#endif
