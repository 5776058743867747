#ifndef DYADIC_OPERATORS_HPP
#define DYADIC_OPERATORS_HPP

#include <span>
#include <vector>

#include "dyadic/grid.hpp"

namespace dyadic {

// Exponents of a multilinear maximal operator or sparse expression: one power
// r[i] > 0 and one fractionality rho[i] in [0, 1) per function slot.
struct ExponentProfile {
  std::vector<double> r;
  std::vector<double> rho;

  double r_sum() const;
  void validate(std::size_t slots) const;
};

// Pointwise values of the multilinear maximal function
//   x ↦ sup_{Q ∋ x} Π_i ( μ(Q)^{-(1-rho_i)} ∫_Q f_i dμ )^{r_i}.
// Products of averages are accumulated in log space; slots whose integral
// vanishes push the product to zero.
LeafFn multilinear_maximal(const Grid& g, std::span<const LeafFn> fs, const ExponentProfile& prof);

// Per-node score log Π_i (μ(Q)^{-(1-rho_i)} ∫_Q f_i)^{r_i}, shared by the
// maximal function, the characteristics and the sparse expressions so that
// identities between them hold bit-for-bit.
std::vector<double> cube_scores(const Grid& g, std::span<const CubeIntegrals> ints,
                                std::span<const double> powers, std::span<const double> rho);

// Fractional maximal function with respect to an auxiliary measure ν given by
// its per-leaf masses (the grid measure plays no role here):
//   x ↦ sup_{Q ∋ x} ν(Q)^{-(1-rho)} ∫_Q f dν.
LeafFn fractional_maximal_wrt(const Grid& g, const LeafFn& f, double rho, const LeafFn& nu);

// x ↦ sup_{Q ∋ x} λ_Q for a node sequence λ.
LeafFn seq_maximal(const Grid& g, const CubeSeq& lam);

}  // namespace dyadic

#endif
