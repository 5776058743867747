// Brute-force reference implementations used only by the tests. Everything
// here is written as close to the defining formula as possible: plain loops,
// plain double arithmetic, no log-space tricks, no shared helpers with the
// library under test.
#ifndef DYADIC_TESTS_ORACLES_HPP
#define DYADIC_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/operators.hpp"

namespace oracle {

inline std::vector<dyadic::CubeId> all_cubes(const dyadic::Grid& g) {
  std::vector<dyadic::CubeId> out;
  for (int l = 0; l <= g.depth(); ++l)
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << l); ++k) out.push_back({l, k});
  return out;
}

inline double cube_integral(const dyadic::Grid& g, const dyadic::LeafFn& f, dyadic::CubeId q) {
  const auto [lo, hi] = g.leaf_range(q);
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += f[i] * g.leaf_mass(i);
  return s;
}

inline double cube_measure(const dyadic::Grid& g, dyadic::CubeId q) {
  const auto [lo, hi] = g.leaf_range(q);
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += g.leaf_mass(i);
  return s;
}

inline double average(const dyadic::Grid& g, const dyadic::LeafFn& f, dyadic::CubeId q) {
  return oracle::cube_integral(g, f, q) / oracle::cube_measure(g, q);
}

inline dyadic::CubeId leaf_cube(const dyadic::Grid& g, std::size_t leaf) {
  return {g.depth(), static_cast<std::uint64_t>(leaf)};
}

inline bool cube_has_leaf(const dyadic::Grid& g, dyadic::CubeId q, std::size_t leaf) {
  const auto [lo, hi] = g.leaf_range(q);
  return leaf >= lo && leaf < hi;
}

// sup_{Q ∋ x} Π_i ( μ(Q)^{-(1-rho_i)} ∫_Q f_i dμ )^{r_i} by scanning every
// cube of the grid at every leaf.
inline dyadic::LeafFn multilinear_maximal(const dyadic::Grid& g,
                                          std::span<const dyadic::LeafFn> fs,
                                          std::span<const double> r,
                                          std::span<const double> rho) {
  std::vector<double> out(g.leaf_count(), 0.0);
  for (std::size_t x = 0; x < g.leaf_count(); ++x) {
    double best = 0.0;
    for (const dyadic::CubeId q : oracle::all_cubes(g)) {
      if (!oracle::cube_has_leaf(g, q, x)) continue;
      double prod = 1.0;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const double term =
            std::pow(oracle::cube_measure(g, q), -(1.0 - rho[i])) * oracle::cube_integral(g, fs[i], q);
        prod *= std::pow(term, r[i]);
      }
      best = std::max(best, prod);
    }
    out[x] = best;
  }
  return dyadic::LeafFn(out);
}

inline double muckenhoupt(const dyadic::Grid& g, std::span<const dyadic::LeafFn> ws,
                          std::span<const double> q) {
  double best = 0.0;
  for (const dyadic::CubeId c : oracle::all_cubes(g)) {
    double prod = 1.0;
    for (std::size_t i = 0; i < ws.size(); ++i) prod *= std::pow(oracle::average(g, ws[i], c), q[i]);
    best = std::max(best, prod);
  }
  return best;
}

// Literal transcription of the Fujii-Wilson formula: for each candidate cube
// Q, truncate every weight to Q, evaluate the full multilinear maximal
// function of the truncated tuple (sup over all cubes of the grid), and
// integrate it over Q.
inline double fujii_wilson(const dyadic::Grid& g, std::span<const dyadic::LeafFn> ws,
                           std::span<const double> q) {
  const double qt = std::accumulate(q.begin(), q.end(), 0.0);
  double best = 0.0;
  for (const dyadic::CubeId c : oracle::all_cubes(g)) {
    const auto [lo, hi] = g.leaf_range(c);
    std::vector<dyadic::LeafFn> trunc;
    for (const dyadic::LeafFn& w : ws) {
      std::vector<double> v(g.leaf_count(), 0.0);
      for (std::size_t i = lo; i < hi; ++i) v[i] = w[i];
      trunc.emplace_back(std::move(v));
    }
    std::vector<double> powers(q.size()), zero(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) powers[i] = q[i] / qt;
    const dyadic::LeafFn mx = oracle::multilinear_maximal(g, trunc, powers, zero);

    double num = 0.0, den = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      num += mx[i] * g.leaf_mass(i);
      double prod = 1.0;
      for (std::size_t j = 0; j < ws.size(); ++j) prod *= std::pow(ws[j][i], q[j] / qt);
      den += prod * g.leaf_mass(i);
    }
    best = std::max(best, std::pow(num / den, qt));
  }
  return best;
}

inline double carleson_norm(const dyadic::Grid& g, const dyadic::CubeSeq& tau) {
  double best = 0.0;
  for (const dyadic::CubeId c : oracle::all_cubes(g)) {
    double sum = 0.0;
    for (const dyadic::CubeId d : oracle::all_cubes(g))
      if (dyadic::cube_contains(c, d)) sum += tau.at(d) * oracle::cube_measure(g, d);
    best = std::max(best, sum / oracle::cube_measure(g, c));
  }
  return best;
}

inline dyadic::LeafFn sparse_operator(const dyadic::Grid& g, const dyadic::CubeSeq& tau,
                                      std::span<const dyadic::LeafFn> fs,
                                      std::span<const double> r, std::span<const double> rho) {
  std::vector<double> out(g.leaf_count(), 0.0);
  for (const dyadic::CubeId q : oracle::all_cubes(g)) {
    if (tau.at(q) == 0.0) continue;
    double prod = tau.at(q);
    for (std::size_t i = 0; i < fs.size(); ++i)
      prod *= std::pow(std::pow(oracle::cube_measure(g, q), -(1.0 - rho[i])) * oracle::cube_integral(g, fs[i], q),
                       r[i]);
    const auto [lo, hi] = g.leaf_range(q);
    for (std::size_t x = lo; x < hi; ++x) out[x] += prod;
  }
  return dyadic::LeafFn(out);
}

inline double sparse_form(const dyadic::Grid& g, const dyadic::CubeSeq& tau,
                          std::span<const dyadic::LeafFn> fs, std::span<const double> r,
                          std::span<const double> rho) {
  double total = 0.0;
  for (const dyadic::CubeId q : oracle::all_cubes(g)) {
    if (tau.at(q) == 0.0) continue;
    double prod = tau.at(q) * oracle::cube_measure(g, q);
    for (std::size_t i = 0; i < fs.size(); ++i)
      prod *= std::pow(std::pow(oracle::cube_measure(g, q), -(1.0 - rho[i])) * oracle::cube_integral(g, fs[i], q),
                       r[i]);
    total += prod;
  }
  return total;
}

// Both sides of the two-exponent summation estimate, by direct summation.
inline double key_lhs(const dyadic::Grid& g, std::span<const dyadic::LeafFn> ws,
                      const dyadic::CubeSeq& tau, std::span<const double> s, int j,
                      double alpha) {
  double total = 0.0;
  for (std::size_t x = 0; x < g.leaf_count(); ++x) {
    double inner = 0.0;
    for (const dyadic::CubeId q : oracle::all_cubes(g)) {
      if (!oracle::cube_has_leaf(g, q, x) || tau.at(q) == 0.0) continue;
      double prod = tau.at(q);
      for (std::size_t i = 0; i < ws.size(); ++i)
        prod *= std::pow(oracle::average(g, ws[i], q), s[i] * alpha);
      inner += prod;
    }
    if (inner > 0.0)
      total += std::pow(inner, 1.0 / alpha) * ws[static_cast<std::size_t>(j)][x] * g.leaf_mass(x);
  }
  return total;
}

inline double key_rhs(const dyadic::Grid& g, std::span<const dyadic::LeafFn> ws,
                      const dyadic::CubeSeq& tau, std::span<const double> s,
                      std::span<const double> q, int j, double alpha) {
  double sum = 0.0;
  for (const dyadic::CubeId c : oracle::all_cubes(g)) {
    if (tau.at(c) == 0.0) continue;
    double prod = tau.at(c) * oracle::cube_measure(g, c);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (static_cast<int>(i) == j) continue;
      prod *= std::pow(oracle::average(g, ws[i], c), s[i] - q[i]);
    }
    sum += prod;
  }
  return std::pow(oracle::carleson_norm(g, tau), 1.0 / alpha - 1.0) * oracle::muckenhoupt(g, ws, q) * sum;
}

// Weak and strong Lorentz norms straight from the layer-cake formulas, with
// the normalization that makes L^{p,p} the plain L^p norm.
inline double lorentz(std::vector<double> values, std::vector<double> masses, double p,
                      double s) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  if (std::isinf(s)) {
    double best = 0.0, t = 0.0;
    for (std::size_t k : idx) {
      if (values[k] <= 0.0) break;
      t += masses[k];
      best = std::max(best, values[k] * std::pow(t, 1.0 / p));
    }
    return best;
  }
  double acc = 0.0, t0 = 0.0;
  for (std::size_t k : idx) {
    if (values[k] <= 0.0) break;
    const double t1 = t0 + masses[k];
    acc += std::pow(values[k], s) * (std::pow(t1, s / p) - std::pow(t0, s / p));
    t0 = t1;
  }
  return std::pow(acc * p / s, 1.0 / s);
}

}  // namespace oracle

#endif
