#include "dyadic/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyadic/errors.hpp"
#include "dyadic/operators.hpp"

namespace dyadic {

double CharExponents::total() const {
  double s = 0.0;
  for (double x : q) s += x;
  return s;
}

void CharExponents::validate(std::size_t weights) const {
  if (q.size() != weights)
    throw validation_error("characteristic exponents must carry one entry per weight: got " +
                           std::to_string(q.size()) + " for " + std::to_string(weights) + " weights");
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!(q[i] >= 0.0) || !std::isfinite(q[i]))
      throw validation_error("characteristic exponents must be finite and nonnegative; entry " +
                             std::to_string(i) + " is " + std::to_string(q[i]));
  if (!(total() > 0.0))
    throw validation_error("characteristic exponents must not all vanish");
}

void require_weights(const Grid& g, std::span<const LeafFn> ws) {
  if (ws.empty()) throw validation_error("at least one weight is required");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ws[i].size() != g.leaf_count())
      throw validation_error("weight " + std::to_string(i) + " must have one value per leaf of the grid");
    if (!ws[i].strictly_positive())
      throw validation_error("weight " + std::to_string(i) + " must be strictly positive on every leaf");
  }
}

double muckenhoupt(const Grid& g, std::span<const LeafFn> ws, const CharExponents& ce) {
  require_weights(g, ws);
  ce.validate(ws.size());
  std::vector<CubeIntegrals> ints;
  ints.reserve(ws.size());
  for (const auto& w : ws) ints.emplace_back(g, w);
  double best = -lorentz_inf;
  for (std::size_t lin = 0; lin < g.cube_count(); ++lin) {
    const double logmu = g.log_measure_lin(lin);
    double s = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i)
      if (ce.q[i] != 0.0) s += ce.q[i] * (ints[i].log_integral_lin(lin) - logmu);
    best = std::max(best, s);
  }
  return std::exp(best);
}

double fujii_wilson(const Grid& g, std::span<const LeafFn> ws, const CharExponents& ce) {
  require_weights(g, ws);
  ce.validate(ws.size());
  const double qtot = ce.total();

  std::vector<CubeIntegrals> ints;
  ints.reserve(ws.size());
  for (const auto& w : ws) ints.emplace_back(g, w);

  // score(R) = log Π_i (w_i)_R^{q_i/|q|}
  const std::size_t n = g.cube_count();
  std::vector<double> score(n, 0.0);
  for (std::size_t lin = 0; lin < n; ++lin) {
    const double logmu = g.log_measure_lin(lin);
    double s = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i)
      if (ce.q[i] != 0.0) s += (ce.q[i] / qtot) * (ints[i].log_integral_lin(lin) - logmu);
    score[lin] = s;
  }

  // Denominator integrand Π_i w_i(x)^{q_i/|q|}.
  std::vector<double> geo(g.leaf_count(), 1.0);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ce.q[i] == 0.0) continue;
    const double e = ce.q[i] / qtot;
    for (std::size_t x = 0; x < geo.size(); ++x) geo[x] *= std::pow(ws[i][x], e);
  }
  CubeIntegrals geo_ints(g, geo);

  // For each node Q, integrate exp of the chain maximum of `score` started at
  // Q over the subtree of Q. Truncating the weights to Q removes every node
  // outside the chains through Q, and among the ancestors of Q the score of Q
  // itself dominates, so starting the running maximum at Q is exact.
  const std::size_t leaf_off = g.leaf_count() - 1;
  std::vector<double> running(n);
  double best = -lorentz_inf;
  for (std::size_t q_lin = 0; q_lin < n; ++q_lin) {
    running[q_lin] = score[q_lin];
    double num = 0.0;
    if (q_lin >= leaf_off) {
      num = std::exp(score[q_lin]) * g.measure_lin(q_lin);
    } else {
      // Iterative subtree sweep; nodes of the subtree are visited in linear
      // order bands, but a simple stack keeps it cache-friendly enough.
      std::size_t stack_buf[64];
      int top = 0;
      stack_buf[top++] = q_lin;
      while (top > 0) {
        const std::size_t cur = stack_buf[--top];
        if (cur >= leaf_off) {
          num += std::exp(running[cur]) * g.measure_lin(cur);
          continue;
        }
        const std::size_t a = 2 * cur + 1, b = 2 * cur + 2;
        running[a] = std::max(running[cur], score[a]);
        running[b] = std::max(running[cur], score[b]);
        stack_buf[top++] = b;
        stack_buf[top++] = a;
      }
    }
    const double val = std::log(num) - geo_ints.log_integral_lin(q_lin);
    best = std::max(best, val);
  }
  return std::exp(qtot * best);
}

std::vector<double> carleson_profile(const Grid& g, const CubeSeq& tau) {
  if (tau.depth() != g.depth())
    throw validation_error("node sequence depth " + std::to_string(tau.depth()) +
                           " does not match grid depth " + std::to_string(g.depth()));
  tau.validate("Carleson sequence");
  const std::size_t n = g.cube_count();
  std::vector<double> subtree(n);
  for (std::size_t lin = n; lin-- > 0;) {
    double s = tau.at_lin(lin) * g.measure_lin(lin);
    if (2 * lin + 2 < n) s += subtree[2 * lin + 1] + subtree[2 * lin + 2];
    subtree[lin] = s;
  }
  for (std::size_t lin = 0; lin < n; ++lin) subtree[lin] /= g.measure_lin(lin);
  return subtree;
}

double carleson_norm(const Grid& g, const CubeSeq& tau) {
  const auto profile = carleson_profile(g, tau);
  return *std::max_element(profile.begin(), profile.end());
}

double lorentz_norm_measure(std::span<const double> values, std::span<const double> atom_masses,
                            double p, double s) {
  if (values.size() != atom_masses.size())
    throw validation_error("Lorentz norm needs one atom mass per value");
  if (!(p > 0.0) || !std::isfinite(p))
    throw validation_error("Lorentz norm needs 0 < p < inf; got p = " + std::to_string(p));
  if (!(s > 0.0))
    throw validation_error("Lorentz norm needs 0 < s <= inf; got s = " + std::to_string(s));

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  if (s == lorentz_inf) {
    // Evaluated at the distinct values of f; within a block of equal values
    // only the last position matters and the intermediate ones are dominated.
    double best = 0.0, t = 0.0;
    for (std::size_t k : order) {
      if (!(values[k] > 0.0)) break;
      t += atom_masses[k];
      best = std::max(best, values[k] * std::pow(t, 1.0 / p));
    }
    return best;
  }

  // Piecewise-exact rearrangement integral on the flat steps of f*.
  double sum = 0.0, t_prev = 0.0, t_pow_prev = 0.0;
  const double e = s / p;
  for (std::size_t k : order) {
    if (!(values[k] > 0.0)) break;
    const double t = t_prev + atom_masses[k];
    const double t_pow = std::pow(t, e);
    sum += std::pow(values[k], s) * (t_pow - t_pow_prev);
    t_prev = t;
    t_pow_prev = t_pow;
  }
  sum *= p / s;
  return std::pow(sum, 1.0 / s);
}

double lorentz_norm(const Grid& g, const LeafFn& f, const LeafFn& w, double p, double s) {
  if (f.size() != g.leaf_count() || w.size() != g.leaf_count())
    throw validation_error("f and w must have one value per leaf of the grid");
  std::vector<double> masses(g.leaf_count());
  for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = w[i] * g.leaf_mass(i);
  return lorentz_norm_measure(f.values(), masses, p, s);
}

double weighted_lp_norm(const Grid& g, const LeafFn& f, const LeafFn& w, double p) {
  if (f.size() != g.leaf_count() || w.size() != g.leaf_count())
    throw validation_error("f and w must have one value per leaf of the grid");
  if (!(p > 0.0) || !std::isfinite(p))
    throw validation_error("weighted norm needs 0 < p < inf; got p = " + std::to_string(p));
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] > 0.0) sum += std::pow(f[i], p) * w[i] * g.leaf_mass(i);
  return std::pow(sum, 1.0 / p);
}

}  // namespace dyadic
