#ifndef DYADIC_CHARACTERISTICS_HPP
#define DYADIC_CHARACTERISTICS_HPP

#include <limits>
#include <span>
#include <vector>

#include "dyadic/grid.hpp"

namespace dyadic {

inline constexpr double lorentz_inf = std::numeric_limits<double>::infinity();

// One Muckenhoupt-type exponent per weight.
struct CharExponents {
  std::vector<double> q;

  double total() const;
  // Joint characteristic: every exponent nonnegative, at least one positive.
  void validate(std::size_t weights) const;
};

void require_weights(const Grid& g, std::span<const LeafFn> ws);

// Joint Muckenhoupt characteristic sup_Q Π_i (w_i)_Q^{q_i}.
double muckenhoupt(const Grid& g, std::span<const LeafFn> ws, const CharExponents& ce);

// Joint Fujii-Wilson characteristic
//   sup_Q ( ∫_Q M^{q/|q|}(1_Q w) dμ )^{|q|} ( ∫_Q Π_i w_i^{q_i/|q|} dμ )^{-|q|},
// where |q| = Σ_i q_i and M^{q/|q|} is the multilinear maximal function with
// powers q_i/|q| and no fractionality. The weights are truncated to Q but the
// supremum inside runs over all nodes; on a tree this collapses to the chains
// within Q, which is how it is computed. Always at least 1.
double fujii_wilson(const Grid& g, std::span<const LeafFn> ws, const CharExponents& ce);

// sup_Q μ(Q)^{-1} Σ_{Q' ⊆ Q} τ_{Q'} μ(Q').
double carleson_norm(const Grid& g, const CubeSeq& tau);

// Per-node normalized subtree sums μ(Q)^{-1} Σ_{Q' ⊆ Q} τ_{Q'} μ(Q'); the
// Carleson norm is their maximum.
std::vector<double> carleson_profile(const Grid& g, const CubeSeq& tau);

// Lorentz norm over an arbitrary finite atomic measure: values[i] sits on an
// atom of mass atom_masses[i]. For s = lorentz_inf this is the weak norm
// sup_v v * m{f >= v}^{1/p}, evaluated at the distinct values of f; for
// finite s it is the rearrangement integral ( ∫_0^∞ (t^{1/p} f*(t))^s dt/t )^{1/s}
// evaluated exactly on the flat steps of f*. With s = p it reduces to the
// plain L^p norm.
double lorentz_norm_measure(std::span<const double> values, std::span<const double> atom_masses,
                            double p, double s);

// Lorentz norm of f in L^{p,s}(w dμ).
double lorentz_norm(const Grid& g, const LeafFn& f, const LeafFn& w, double p, double s);

// ( ∫ f^p w dμ )^{1/p}; also used for p < 1 where it is merely a quasinorm.
double weighted_lp_norm(const Grid& g, const LeafFn& f, const LeafFn& w, double p);

}  // namespace dyadic

#endif
