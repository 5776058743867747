#include "dyadic/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "dyadic/characteristics.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/operators.hpp"
#include "dyadic/stopping.hpp"

namespace dyadic {

namespace {

struct CaseRow {
  CaseId id;
  std::string_view name;
  bool probe;
};

constexpr CaseRow kCases[kCaseCount] = {
    {CaseId::MaxWeak, "MAX_WEAK", false},
    {CaseId::MaxStrong, "MAX_STRONG", false},
    {CaseId::BDual, "B_DUAL", false},
    {CaseId::ABelow, "A_BELOW", false},
    {CaseId::FwAp, "FW_AP", false},
    {CaseId::SumLt1, "SUM_LT1", false},
    {CaseId::Cov, "COV", false},
    {CaseId::Key, "KEY", false},
    {CaseId::CharStop, "CHAR", false},
    {CaseId::Convex, "CONVEX", false},
    {CaseId::Concave, "CONCAVE", false},
    {CaseId::FracMaxLorentz, "FRAC_MAX_LORENTZ", false},
    {CaseId::ABelowWeakProbe, "A_BELOW_WEAK_PROBE", true},
    {CaseId::CharAltProbe, "CHAR_ALT_PROBE", true},
};

}  // namespace

std::string_view case_name(CaseId c) {
  for (const auto& row : kCases)
    if (row.id == c) return row.name;
  return "?";
}

std::optional<CaseId> case_from_name(std::string_view name) {
  for (const auto& row : kCases)
    if (row.name == name) return row.id;
  return std::nullopt;
}

std::vector<CaseId> all_cases(bool include_probes) {
  std::vector<CaseId> out;
  for (const auto& row : kCases)
    if (include_probes || !row.probe) out.push_back(row.id);
  return out;
}

bool case_is_probe(CaseId c) {
  for (const auto& row : kCases)
    if (row.id == c) return row.probe;
  return false;
}

bool case_uses_aux(CaseId c) { return c == CaseId::Cov || c == CaseId::FracMaxLorentz; }

std::size_t case_weight_slots(CaseId c, int m) {
  return case_uses_aux(c) ? 0 : static_cast<std::size_t>(m);
}

std::size_t case_function_slots(CaseId c, int m) {
  switch (c) {
    case CaseId::MaxWeak:
    case CaseId::MaxStrong:
    case CaseId::ABelow:
    case CaseId::ABelowWeakProbe:
      return static_cast<std::size_t>(m) - 1;
    case CaseId::BDual:
      return static_cast<std::size_t>(m);
    case CaseId::FracMaxLorentz:
      return 1;
    default:
      return 0;
  }
}

std::size_t case_lambda_slots(CaseId c, int m) {
  switch (c) {
    case CaseId::Cov:
      return 1;
    case CaseId::CharStop:
    case CaseId::CharAltProbe:
    case CaseId::Concave:
      return static_cast<std::size_t>(m) - 1;
    case CaseId::Convex:
      return static_cast<std::size_t>(m);
    default:
      return 0;
  }
}

bool case_uses_tau(CaseId c) {
  switch (c) {
    case CaseId::BDual:
    case CaseId::ABelow:
    case CaseId::ABelowWeakProbe:
    case CaseId::SumLt1:
    case CaseId::Key:
    case CaseId::CharStop:
    case CaseId::CharAltProbe:
    case CaseId::Convex:
    case CaseId::Concave:
      return true;
    default:
      return false;
  }
}

double IneqParams::alpha_from_t() const {
  double a = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) a += r[i] * (1.0 / t[i] - rho[i]);
  return a;
}

namespace {

void require_positive(std::span<const double> xs, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(xs[i] > 0.0) || !std::isfinite(xs[i]))
      throw validation_error(std::string(what) + " must be positive and finite; entry " + std::to_string(i) +
                             " is " + std::to_string(xs[i]));
}

void require_t_range(std::span<const double> t, std::span<const double> rho) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 1.0) || !std::isfinite(t[i]))
      throw validation_error("integrability exponents need 1 < t < inf; slot " + std::to_string(i) +
                             " has t = " + std::to_string(t[i]));
    if (!(rho[i] >= 0.0) || !(rho[i] < 1.0))
      throw validation_error("fractional indices need 0 <= rho < 1; slot " + std::to_string(i) +
                             " has rho = " + std::to_string(rho[i]));
    if (!(t[i] < 1.0 / rho[i]))
      throw validation_error("integrability exponents need t < 1/rho; slot " + std::to_string(i) +
                             " has t = " + std::to_string(t[i]) + ", 1/rho = " + std::to_string(1.0 / rho[i]));
  }
}

void check_partition(const std::vector<int>& js, int m) {
  if (js.empty()) throw validation_error("the strong slot set of the partition must be non-empty");
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (int j : js) {
    if (j < 0 || j >= m) throw validation_error("partition index " + std::to_string(j) + " out of range");
    if (seen[static_cast<std::size_t>(j)])
      throw validation_error("partition index " + std::to_string(j) + " repeated");
    seen[static_cast<std::size_t>(j)] = true;
  }
}

std::string join_doubles(std::span<const double> xs) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << " ";
    os << xs[i];
  }
  os << "]";
  return os.str();
}

}  // namespace

void IneqParams::validate(CaseId c) const {
  const int min_m = (c == CaseId::Cov || c == CaseId::SumLt1 || c == CaseId::FracMaxLorentz) ? 1 : 2;
  if (m < min_m)
    throw validation_error("case " + std::string(case_name(c)) + " needs m >= " + std::to_string(min_m));
  const auto slots = static_cast<std::size_t>(m) - 1;
  switch (c) {
    case CaseId::MaxWeak:
    case CaseId::MaxStrong: {
      if (t.size() != slots || r.size() != slots || rho.size() != slots)
        throw validation_error("maximal cases need one (t, r, rho) triple per function slot (m-1 slots)");
      require_positive(r, "maximal powers r");
      require_t_range(t, rho);
      if (!(alpha_from_t() > 0.0)) throw validation_error("the scaling exponent must be positive");
      break;
    }
    case CaseId::ABelow:
    case CaseId::ABelowWeakProbe: {
      if (t.size() != slots || r.size() != slots || rho.size() != slots)
        throw validation_error("sparse operator cases need one (t, r, rho) triple per function slot (m-1 slots)");
      require_positive(r, "sparse powers r");
      require_t_range(t, rho);
      if (c == CaseId::ABelow && !(alpha_from_t() >= 1.0))
        throw validation_error("the sparse operator bound needs scaling exponent alpha >= 1; got " +
                               std::to_string(alpha_from_t()));
      break;
    }
    case CaseId::BDual: {
      const auto mm = static_cast<std::size_t>(m);
      if (t.size() != mm || r.size() != mm || rho.size() != mm)
        throw validation_error("the sparse form case needs one (t, r, rho) triple per weight (m slots)");
      require_positive(r, "sparse form powers r");
      require_t_range(t, rho);
      double total = 0.0;
      for (std::size_t i = 0; i < mm; ++i) total += r[i] * (1.0 / t[i] - rho[i]);
      if (std::abs(total - 1.0) > 1e-9)
        throw validation_error("the sparse form case needs Σ r_i (1/t_i - rho_i) = 1; got " + std::to_string(total));
      check_partition(js, m);
      break;
    }
    case CaseId::FwAp: {
      const auto mm = static_cast<std::size_t>(m);
      if (q.size() != mm || beta.size() != mm)
        throw validation_error("the characteristic comparison needs per-weight exponents q and beta");
      require_positive(q, "Muckenhoupt exponents q");
      double btot = 0.0;
      for (std::size_t i = 0; i < mm; ++i) {
        if (!(beta[i] >= 0.0)) throw validation_error("beta exponents must be nonnegative");
        btot += beta[i];
      }
      if (!(btot > 0.0)) throw validation_error("beta exponents must not all vanish");
      break;
    }
    case CaseId::SumLt1: {
      if (beta.size() != static_cast<std::size_t>(m))
        throw validation_error("the subunit sum case needs one beta exponent per weight");
      double btot = 0.0;
      for (double b : beta) {
        if (!(b >= 0.0)) throw validation_error("beta exponents must be nonnegative");
        btot += b;
      }
      if (!(btot < 1.0))
        throw validation_error("the subunit sum case needs Σ beta_i < 1; got " + std::to_string(btot));
      break;
    }
    case CaseId::Cov: {
      if (!(cov_s > 1.0) || !std::isfinite(cov_s))
        throw validation_error("the covering case needs 1 < s < inf; got s = " + std::to_string(cov_s));
      break;
    }
    case CaseId::Key: {
      const auto mm = static_cast<std::size_t>(m);
      if (s.size() != mm || q.size() != mm)
        throw validation_error("the summation estimate needs per-weight exponents s and q");
      if (j < 0 || j >= m) throw validation_error("distinguished index out of range");
      require_positive(q, "exponents q");
      double s_tot = 0.0, q_tot = 0.0;
      for (std::size_t i = 0; i < mm; ++i) {
        if (static_cast<int>(i) != j && !(s[i] > 0.0))
          throw validation_error("s exponents away from the distinguished index must be positive");
        s_tot += s[i];
        q_tot += q[i];
      }
      if (std::abs(q[static_cast<std::size_t>(j)] - (1.0 + s[static_cast<std::size_t>(j)])) > 1e-12)
        throw validation_error("the distinguished exponents must satisfy q_j = 1 + s_j");
      if (!(s_tot <= q_tot))
        throw validation_error("the summation estimate needs Σ s_i <= Σ q_i");
      for (std::size_t i = 0; i < mm; ++i)
        if (static_cast<int>(i) != j && !(s_tot / q_tot < s[i] / q[i]))
          throw validation_error("the summation estimate needs Σs/Σq < s_i/q_i away from the distinguished index");
      if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw validation_error("the free exponent alpha must be positive and finite");
      break;
    }
    case CaseId::CharStop:
    case CaseId::CharAltProbe: {
      if (p.size() != slots)
        throw validation_error("the stopping double sum needs one p exponent per sequence slot (m-1 slots)");
      require_positive(p, "exponents p");
      if (s.size() != static_cast<std::size_t>(m))
        throw validation_error("the stopping double sum needs one s exponent per weight");
      double a = 0.0;
      for (double pi : p) a += 1.0 / pi;
      for (std::size_t i = 0; i < slots; ++i)
        if (!(s[i] - 1.0 / p[i] > 0.0))
          throw validation_error("the stopping double sum needs s_i - 1/p_i > 0 for every sequence slot");
      if (!(s[slots] - (1.0 - a) > 0.0))
        throw validation_error("the stopping double sum needs s_m - (1 - alpha) > 0");
      break;
    }
    case CaseId::Convex: {
      const auto mm = static_cast<std::size_t>(m);
      if (p.size() != mm || s.size() != mm)
        throw validation_error("the convex range case needs per-weight exponents p and s");
      double a = 0.0;
      for (double pi : p) {
        if (!(pi > 1.0) || !std::isfinite(pi))
          throw validation_error("the convex range case needs 1 < p_i < inf");
        a += 1.0 / pi;
      }
      if (std::abs(a - 1.0) > 1e-9)
        throw validation_error("the convex range case needs Σ 1/p_i = 1; got " + std::to_string(a));
      for (std::size_t i = 0; i < mm; ++i)
        if (!(s[i] - 1.0 / p[i] > 0.0))
          throw validation_error("the convex range case needs s_i - 1/p_i > 0 for every slot");
      check_partition(js, m);
      break;
    }
    case CaseId::Concave: {
      if (p.size() != slots || s.size() != slots)
        throw validation_error("the concave range case needs one (p, s) pair per sequence slot (m-1 slots)");
      require_positive(p, "exponents p");
      require_positive(s, "exponents s");
      double a = 0.0;
      for (double pi : p) a += 1.0 / pi;
      for (std::size_t i = 0; i < slots; ++i)
        if (!(s[i] - 1.0 / p[i] > 0.0))
          throw validation_error("the concave range case needs s_i - 1/p_i > 0 for every slot");
      if (!disjoint_ground && !(a >= 1.0))
        throw validation_error("the whole-node concave variant needs Σ 1/p_i >= 1; got " + std::to_string(a));
      break;
    }
    case CaseId::FracMaxLorentz: {
      if (!(lor_rho >= 0.0) || !(lor_rho < 1.0))
        throw validation_error("the Lorentz maximal case needs 0 <= rho < 1");
      if (!(lor_p > 1.0) || !(lor_p < 1.0 / lor_rho))
        throw validation_error("the Lorentz maximal case needs 1 < p < 1/rho");
      if (!(lor_r >= 1.0))
        throw validation_error("the Lorentz maximal case needs 1 <= r <= inf");
      break;
    }
  }
}

std::string IneqParams::digest(CaseId c) const {
  std::ostringstream os;
  os << "m=" << m;
  switch (c) {
    case CaseId::MaxWeak:
    case CaseId::MaxStrong:
    case CaseId::ABelow:
    case CaseId::ABelowWeakProbe:
      os << "|t=" << join_doubles(t) << "|r=" << join_doubles(r) << "|rho=" << join_doubles(rho);
      break;
    case CaseId::BDual: {
      os << "|t=" << join_doubles(t) << "|r=" << join_doubles(r) << "|rho=" << join_doubles(rho) << "|Js=[";
      for (std::size_t i = 0; i < js.size(); ++i) os << (i ? " " : "") << js[i];
      os << "]";
      break;
    }
    case CaseId::FwAp:
      os << "|q=" << join_doubles(q) << "|beta=" << join_doubles(beta);
      break;
    case CaseId::SumLt1:
      os << "|beta=" << join_doubles(beta);
      break;
    case CaseId::Cov:
      os << "|s=" << cov_s;
      break;
    case CaseId::Key:
      os << "|j=" << j << "|s=" << join_doubles(s) << "|q=" << join_doubles(q) << "|alpha=" << alpha;
      break;
    case CaseId::CharStop:
    case CaseId::CharAltProbe:
      os << "|p=" << join_doubles(p) << "|s=" << join_doubles(s);
      break;
    case CaseId::Convex: {
      os << "|p=" << join_doubles(p) << "|s=" << join_doubles(s) << "|Js=[";
      for (std::size_t i = 0; i < js.size(); ++i) os << (i ? " " : "") << js[i];
      os << "]";
      break;
    }
    case CaseId::Concave:
      os << "|p=" << join_doubles(p) << "|s=" << join_doubles(s)
         << "|ground=" << (disjoint_ground ? "disjoint" : "whole");
      break;
    case CaseId::FracMaxLorentz:
      os << "|rho=" << lor_rho << "|p=" << lor_p << "|r=" << lor_r;
      break;
  }
  return os.str();
}

LeafFn dependent_complete(std::span<const LeafFn> ws, std::span<const double> q) {
  if (ws.empty()) throw validation_error("dependent completion needs at least one free weight");
  if (q.size() != ws.size() + 1)
    throw validation_error("dependent completion needs one exponent per weight including the completed slot");
  require_positive(q, "dependent completion exponents");
  const std::size_t n = ws[0].size();
  std::vector<double> out(n);
  const double qm = q[q.size() - 1];
  for (std::size_t x = 0; x < n; ++x) {
    double logw = 0.0;
    for (std::size_t i = 0; i < ws.size(); ++i) {
      if (!ws[i].strictly_positive())
        throw validation_error("dependent completion needs strictly positive weights");
      logw += q[i] * std::log(ws[i][x]);
    }
    out[x] = std::exp(-logw / qm);
  }
  return LeafFn(std::move(out));
}

namespace {

double safe_ratio(IneqReport& rep) {
  if (rep.rhs > 0.0) {
    rep.ratio = rep.lhs / rep.rhs;
  } else if (rep.lhs > 0.0) {
    rep.ratio = lorentz_inf;
    rep.hard_failure = true;
    rep.note = "rhs vanished while lhs did not";
  } else {
    rep.ratio = 0.0;
  }
  return rep.ratio;
}

std::vector<LeafFn> pointwise_products(std::span<const LeafFn> fs, std::span<const LeafFn> ws,
                                       std::size_t count) {
  std::vector<LeafFn> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> prod(fs[i].size());
    for (std::size_t x = 0; x < prod.size(); ++x) prod[x] = fs[i][x] * ws[i][x];
    out.emplace_back(std::move(prod));
  }
  return out;
}

// ‖f‖_{L^t(w)}^r = ( ∫ f^t w dμ )^{r/t}
double powered_strong_norm(const Grid& g, const LeafFn& f, const LeafFn& w, double t, double r) {
  double sum = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x)
    if (f[x] > 0.0) sum += std::pow(f[x], t) * w[x] * g.leaf_mass(x);
  return std::pow(sum, r / t);
}

// Per-weight log-average tables.
std::vector<CubeIntegrals> weight_integrals(const Grid& g, std::span<const LeafFn> ws) {
  std::vector<CubeIntegrals> ints;
  ints.reserve(ws.size());
  for (const auto& w : ws) ints.emplace_back(g, w);
  return ints;
}

void check_instance_weights(const Instance& inst, int m) {
  if (inst.weights.size() != static_cast<std::size_t>(m))
    throw validation_error("instance carries " + std::to_string(inst.weights.size()) + " weights, case needs " +
                           std::to_string(m));
  require_weights(inst.grid, inst.weights);
}

void check_instance_functions(const Instance& inst, std::size_t count) {
  if (inst.functions.size() != count)
    throw validation_error("instance carries " + std::to_string(inst.functions.size()) +
                           " functions, case needs " + std::to_string(count));
  for (const auto& f : inst.functions)
    if (f.size() != inst.grid.leaf_count())
      throw validation_error("every function must have one value per leaf of the grid");
}

void check_instance_lambdas(const Instance& inst, std::size_t count) {
  if (inst.lambdas.size() != count)
    throw validation_error("instance carries " + std::to_string(inst.lambdas.size()) +
                           " node sequences, case needs " + std::to_string(count));
  for (const auto& lam : inst.lambdas) {
    if (lam.depth() != inst.grid.depth())
      throw validation_error("node sequence depth does not match grid depth");
    lam.validate("node sequence");
  }
}

// --- case evaluators -------------------------------------------------------

IneqReport eval_max(const Instance& inst, const IneqParams& pr, bool weak) {
  const auto slots = static_cast<std::size_t>(pr.m) - 1;
  check_instance_weights(inst, pr.m);
  check_instance_functions(inst, slots);

  const double alpha = pr.alpha_from_t();
  const auto fw_prod = pointwise_products(inst.functions, inst.weights, slots);
  const LeafFn max_fn = multilinear_maximal(inst.grid, fw_prod, ExponentProfile{pr.r, pr.rho});

  IneqReport rep;
  const LeafFn& wm = inst.weights[slots];
  if (weak) {
    rep.lhs = lorentz_norm(inst.grid, max_fn, wm, 1.0 / alpha, lorentz_inf);
  } else {
    rep.lhs = weighted_lp_norm(inst.grid, max_fn, wm, 1.0 / alpha);
  }

  CharExponents ce;
  ce.q.resize(static_cast<std::size_t>(pr.m));
  for (std::size_t i = 0; i < slots; ++i) ce.q[i] = pr.r[i] * (1.0 - 1.0 / pr.t[i]);
  ce.q[slots] = alpha;
  double rhs = muckenhoupt(inst.grid, inst.weights, ce);
  if (!weak) {
    CharExponents fwce;
    fwce.q.assign(static_cast<std::size_t>(pr.m), 0.0);
    for (std::size_t i = 0; i < slots; ++i) fwce.q[i] = pr.r[i] * (1.0 / pr.t[i] - pr.rho[i]);
    rhs *= fujii_wilson(inst.grid, inst.weights, fwce);
  }
  for (std::size_t i = 0; i < slots; ++i)
    rhs *= powered_strong_norm(inst.grid, inst.functions[i], inst.weights[i], pr.t[i], pr.r[i]);
  rep.rhs = rhs;
  safe_ratio(rep);
  return rep;
}

IneqReport eval_b_dual(const Instance& inst, const IneqParams& pr) {
  const auto mm = static_cast<std::size_t>(pr.m);
  check_instance_weights(inst, pr.m);
  check_instance_functions(inst, mm);

  const auto fw_prod = pointwise_products(inst.functions, inst.weights, mm);
  IneqReport rep;
  rep.lhs = sparse_form(inst.grid, inst.tau, fw_prod, ExponentProfile{pr.r, pr.rho});

  CharExponents ce;
  ce.q.resize(mm);
  for (std::size_t i = 0; i < mm; ++i) ce.q[i] = pr.r[i] * (1.0 - 1.0 / pr.t[i]);
  double rhs = carleson_norm(inst.grid, inst.tau) * muckenhoupt(inst.grid, inst.weights, ce);

  double fw_sum = 0.0;
  for (int j : pr.js) {
    CharExponents fwce;
    fwce.q.assign(mm, 0.0);
    for (std::size_t i = 0; i < mm; ++i)
      if (static_cast<int>(i) != j) fwce.q[i] = pr.r[i] * (1.0 / pr.t[i] - pr.rho[i]);
    fw_sum += fujii_wilson(inst.grid, inst.weights, fwce);
  }
  rhs *= fw_sum;

  std::vector<bool> strong(mm, false);
  for (int j : pr.js) strong[static_cast<std::size_t>(j)] = true;
  for (std::size_t i = 0; i < mm; ++i) {
    if (strong[i]) {
      rhs *= powered_strong_norm(inst.grid, inst.functions[i], inst.weights[i], pr.t[i], pr.r[i]);
    } else {
      rhs *= std::pow(lorentz_norm(inst.grid, inst.functions[i], inst.weights[i], pr.t[i], pr.r[i]), pr.r[i]);
    }
  }
  rep.rhs = rhs;
  safe_ratio(rep);
  return rep;
}

IneqReport eval_a_below(const Instance& inst, const IneqParams& pr, bool weak_probe) {
  const auto slots = static_cast<std::size_t>(pr.m) - 1;
  check_instance_weights(inst, pr.m);
  check_instance_functions(inst, slots);

  const double alpha = pr.alpha_from_t();
  const auto fw_prod = pointwise_products(inst.functions, inst.weights, slots);
  const LeafFn op = sparse_operator(inst.grid, inst.tau, fw_prod, ExponentProfile{pr.r, pr.rho});

  IneqReport rep;
  const LeafFn& wm = inst.weights[slots];
  if (weak_probe) {
    rep.lhs = lorentz_norm(inst.grid, op, wm, 1.0 / alpha, lorentz_inf);
  } else {
    rep.lhs = weighted_lp_norm(inst.grid, op, wm, 1.0 / alpha);
  }

  CharExponents ce;
  ce.q.resize(static_cast<std::size_t>(pr.m));
  for (std::size_t i = 0; i < slots; ++i) ce.q[i] = pr.r[i] * (1.0 - 1.0 / pr.t[i]);
  ce.q[slots] = alpha;
  double rhs = carleson_norm(inst.grid, inst.tau) * muckenhoupt(inst.grid, inst.weights, ce);
  if (!weak_probe) {
    CharExponents fwce;
    fwce.q.assign(static_cast<std::size_t>(pr.m), 0.0);
    for (std::size_t i = 0; i < slots; ++i) fwce.q[i] = pr.r[i] * (1.0 / pr.t[i] - pr.rho[i]);
    rhs *= fujii_wilson(inst.grid, inst.weights, fwce);
  }
  for (std::size_t i = 0; i < slots; ++i)
    rhs *= powered_strong_norm(inst.grid, inst.functions[i], inst.weights[i], pr.t[i], pr.r[i]);
  rep.rhs = rhs;
  safe_ratio(rep);
  return rep;
}

IneqReport eval_fw_ap(const Instance& inst, const IneqParams& pr) {
  const auto mm = static_cast<std::size_t>(pr.m);
  check_instance_weights(inst, pr.m);

  // The comparison only holds on the variety Π w_i^{q_i} = 1.
  for (std::size_t x = 0; x < inst.grid.leaf_count(); ++x) {
    double logprod = 0.0;
    for (std::size_t i = 0; i < mm; ++i) logprod += pr.q[i] * std::log(inst.weights[i][x]);
    if (std::abs(logprod) > 1e-9)
      throw validation_error("the characteristic comparison needs Π w_i^{q_i} = 1 on every leaf; leaf " +
                             std::to_string(x) + " has log product " + std::to_string(logprod));
  }

  IneqReport rep;
  rep.lhs = fujii_wilson(inst.grid, inst.weights, CharExponents{pr.beta});

  double gamma = 0.0;
  for (std::size_t i = 0; i < mm; ++i) gamma = std::max(gamma, pr.beta[i] / pr.q[i]);
  CharExponents ce;
  ce.q.resize(mm);
  for (std::size_t i = 0; i < mm; ++i) ce.q[i] = gamma * pr.q[i];
  rep.rhs = muckenhoupt(inst.grid, inst.weights, ce);
  safe_ratio(rep);
  return rep;
}

IneqReport eval_sum_lt1(const Instance& inst, const IneqParams& pr) {
  const auto mm = static_cast<std::size_t>(pr.m);
  check_instance_weights(inst, pr.m);
  inst.tau.validate("sparse coefficient sequence");

  const Grid& g = inst.grid;
  const auto ints = weight_integrals(g, inst.weights);

  // term(Q) = τ_Q μ(Q) Π_i (w_i)_Q^{beta_i}
  const std::size_t n = g.cube_count();
  std::vector<double> weighted(n), term(n);
  for (std::size_t lin = 0; lin < n; ++lin) {
    double s = 0.0;
    for (std::size_t i = 0; i < mm; ++i)
      if (pr.beta[i] != 0.0) s += pr.beta[i] * (ints[i].log_integral_lin(lin) - g.log_measure_lin(lin));
    weighted[lin] = std::exp(s);
    term[lin] = inst.tau.at_lin(lin) * g.measure_lin(lin) * weighted[lin];
  }

  // Subtree sums, then the worst node against ‖τ‖ μ(Q) Π (w_i)_Q^{beta_i}.
  std::vector<double> subtree(n);
  const std::size_t leaf_off = g.leaf_count() - 1;
  for (std::size_t lin = n; lin-- > 0;) {
    double s = term[lin];
    if (lin < leaf_off) s += subtree[2 * lin + 1] + subtree[2 * lin + 2];
    subtree[lin] = s;
  }
  const double tau_norm = carleson_norm(g, inst.tau);

  IneqReport rep;
  if (tau_norm == 0.0) {
    rep.lhs = 0.0;
    rep.rhs = 0.0;
    safe_ratio(rep);
    return rep;
  }
  double best = -1.0;
  std::size_t best_lin = 0;
  for (std::size_t lin = 0; lin < n; ++lin) {
    const double rhs = tau_norm * g.measure_lin(lin) * weighted[lin];
    const double ratio = subtree[lin] / rhs;
    if (ratio > best) {
      best = ratio;
      best_lin = lin;
    }
  }
  rep.lhs = subtree[best_lin];
  rep.rhs = tau_norm * g.measure_lin(best_lin) * weighted[best_lin];
  rep.note = "worst node " + cube_to_string(cube_from_linear(best_lin));
  safe_ratio(rep);
  return rep;
}

IneqReport eval_cov(const Instance& inst, const IneqParams& pr) {
  const Grid& g = inst.grid;
  check_instance_lambdas(inst, 1);
  if (!inst.aux.strictly_positive())
    throw validation_error("the covering case needs a strictly positive auxiliary measure");

  const CubeSeq& lam = inst.lambdas[0];
  CubeIntegrals sigma(g, inst.aux);

  const std::size_t n = g.cube_count();
  const std::size_t leaf_off = g.leaf_count() - 1;

  // g(x) = Σ_{Q ∋ x} λ_Q / σ(Q), accumulated top-down.
  std::vector<double> running(n);
  running[0] = lam.at_lin(0) / sigma.integral_lin(0);
  for (std::size_t lin = 0; lin < leaf_off; ++lin) {
    running[2 * lin + 1] = running[lin] + lam.at_lin(2 * lin + 1) / sigma.integral_lin(2 * lin + 1);
    running[2 * lin + 2] = running[lin] + lam.at_lin(2 * lin + 2) / sigma.integral_lin(2 * lin + 2);
  }
  IneqReport rep;
  double lhs = 0.0;
  for (std::size_t x = 0; x < g.leaf_count(); ++x) {
    const double v = running[leaf_off + x];
    if (v > 0.0) lhs += std::pow(v, pr.cov_s) * inst.aux[x] * g.leaf_mass(x);
  }
  rep.lhs = lhs;

  // Σ_Q λ_Q ( σ(Q)^{-1} Σ_{Q' ⊆ Q} λ_{Q'} )^{s-1}
  std::vector<double> subtree(n);
  for (std::size_t lin = n; lin-- > 0;) {
    double s = lam.at_lin(lin);
    if (lin < leaf_off) s += subtree[2 * lin + 1] + subtree[2 * lin + 2];
    subtree[lin] = s;
  }
  double rhs = 0.0;
  for (std::size_t lin = 0; lin < n; ++lin) {
    const double l = lam.at_lin(lin);
    if (l > 0.0) rhs += l * std::pow(subtree[lin] / sigma.integral_lin(lin), pr.cov_s - 1.0);
  }
  rep.rhs = rhs;
  safe_ratio(rep);
  return rep;
}

IneqReport eval_key(const Instance& inst, const IneqParams& pr) {
  const auto mm = static_cast<std::size_t>(pr.m);
  check_instance_weights(inst, pr.m);
  inst.tau.validate("sparse coefficient sequence");

  const Grid& g = inst.grid;
  const auto ints = weight_integrals(g, inst.weights);
  const std::size_t n = g.cube_count();
  const std::size_t leaf_off = g.leaf_count() - 1;
  const std::size_t jj = static_cast<std::size_t>(pr.j);

  // lhs = ∫ ( Σ_Q τ_Q Π_i (w_i)_Q^{s_i alpha} 1_Q )^{1/alpha} dw_j
  std::vector<double> term(n);
  for (std::size_t lin = 0; lin < n; ++lin) {
    const double tq = inst.tau.at_lin(lin);
    if (tq == 0.0) {
      term[lin] = 0.0;
      continue;
    }
    double sscore = 0.0;
    for (std::size_t i = 0; i < mm; ++i)
      sscore += pr.s[i] * (ints[i].log_integral_lin(lin) - g.log_measure_lin(lin));
    term[lin] = tq * std::exp(pr.alpha * sscore);
  }
  std::vector<double> running(n);
  running[0] = term[0];
  for (std::size_t lin = 0; lin < leaf_off; ++lin) {
    running[2 * lin + 1] = running[lin] + term[2 * lin + 1];
    running[2 * lin + 2] = running[lin] + term[2 * lin + 2];
  }
  IneqReport rep;
  double lhs = 0.0;
  for (std::size_t x = 0; x < g.leaf_count(); ++x) {
    const double v = running[leaf_off + x];
    if (v > 0.0) lhs += std::pow(v, 1.0 / pr.alpha) * inst.weights[jj][x] * g.leaf_mass(x);
  }
  rep.lhs = lhs;

  // rhs = ‖τ‖^{1/alpha - 1} [w]^q Σ_Q τ_Q μ(Q) Π_{i≠j} (w_i)_Q^{s_i - q_i}
  const double tau_norm = carleson_norm(g, inst.tau);
  double sum = 0.0;
  for (std::size_t lin = 0; lin < n; ++lin) {
    const double tq = inst.tau.at_lin(lin);
    if (tq == 0.0) continue;
    double sscore = 0.0;
    for (std::size_t i = 0; i < mm; ++i)
      if (i != jj) sscore += (pr.s[i] - pr.q[i]) * (ints[i].log_integral_lin(lin) - g.log_measure_lin(lin));
    sum += tq * g.measure_lin(lin) * std::exp(sscore);
  }
  const double char_q = muckenhoupt(g, inst.weights, CharExponents{pr.q});
  rep.rhs = (tau_norm > 0.0) ? std::pow(tau_norm, 1.0 / pr.alpha - 1.0) * char_q * sum : 0.0;
  safe_ratio(rep);
  return rep;
}

// Shared by the stopping double sum and its probe variant.
IneqReport eval_char_stop(const Instance& inst, const IneqParams& pr, bool single_weight_rhs) {
  const auto mm = static_cast<std::size_t>(pr.m);
  const std::size_t slots = mm - 1;
  check_instance_weights(inst, pr.m);
  check_instance_lambdas(inst, slots);
  inst.tau.validate("sparse coefficient sequence");

  const Grid& g = inst.grid;
  const auto ints = weight_integrals(g, inst.weights);
  const std::size_t n = g.cube_count();

  double alpha = 0.0;
  for (double pi : pr.p) alpha += 1.0 / pi;

  std::vector<StoppingFamily> fams;
  fams.reserve(slots);
  for (std::size_t i = 0; i < slots; ++i) fams.push_back(build_stopping(g, inst.lambdas[i]));

  // Group nodes by the tuple (π_1(Q), ..., π_{m-1}(Q)).
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
  {
    std::vector<std::size_t> key(slots);
    for (std::size_t lin = 0; lin < n; ++lin) {
      if (inst.tau.at_lin(lin) == 0.0) continue;
      for (std::size_t i = 0; i < slots; ++i) key[i] = fams[i].parent[lin];
      groups[key].push_back(lin);
    }
  }

  // term(Q) = τ_Q Π_{i<m} (w_i)_Q^{s_i} · (w_m)_Q^{s_m - 1}
  std::vector<double> term(n, 0.0);
  for (std::size_t lin = 0; lin < n; ++lin) {
    const double tq = inst.tau.at_lin(lin);
    if (tq == 0.0) continue;
    double sscore = 0.0;
    for (std::size_t i = 0; i < mm; ++i) {
      const double e = (i + 1 == mm) ? pr.s[i] - 1.0 : pr.s[i];
      if (e != 0.0) sscore += e * (ints[i].log_integral_lin(lin) - g.log_measure_lin(lin));
    }
    term[lin] = tq * std::exp(sscore);
  }

  const LeafFn& wm = inst.weights[slots];
  std::vector<double> acc(g.leaf_count(), 0.0);
  double outer = 0.0;
  for (const auto& [key, nodes] : groups) {
    double lam_factor = 1.0;
    for (std::size_t i = 0; i < slots; ++i) {
      const double lv = inst.lambdas[i].at_lin(key[i]);
      lam_factor *= (lv > 0.0) ? std::pow(lv, 1.0 / alpha) : 0.0;
    }
    std::size_t lo = g.leaf_count(), hi = 0;
    for (std::size_t lin : nodes) {
      const auto [a, b] = g.leaf_range(cube_from_linear(lin));
      lo = std::min(lo, a);
      hi = std::max(hi, b);
      for (std::size_t x = a; x < b; ++x) acc[x] += term[lin];
    }
    if (lam_factor > 0.0) {
      double integral = 0.0;
      for (std::size_t x = lo; x < hi; ++x)
        if (acc[x] > 0.0) integral += std::pow(acc[x], 1.0 / alpha) * wm[x] * g.leaf_mass(x);
      outer += lam_factor * integral;
    }
    for (std::size_t x = lo; x < hi; ++x) acc[x] = 0.0;
  }
  IneqReport rep;
  rep.lhs = (outer > 0.0) ? std::pow(outer, alpha) : 0.0;

  CharExponents ce;
  ce.q.resize(mm);
  for (std::size_t i = 0; i < slots; ++i) ce.q[i] = pr.s[i] - 1.0 / pr.p[i];
  ce.q[slots] = pr.s[slots] - (1.0 - alpha);
  double rhs = carleson_norm(g, inst.tau) * muckenhoupt(g, inst.weights, ce);

  if (single_weight_rhs) {
    // Probe variant: product of one-weight characteristics instead of the
    // joint one.
    for (std::size_t i = 0; i < slots; ++i) {
      CharExponents single;
      single.q = {1.0 / pr.p[i]};
      rhs *= fujii_wilson(g, std::span<const LeafFn>(&inst.weights[i], 1), single);
    }
  } else {
    CharExponents fwce;
    fwce.q.assign(mm, 0.0);
    for (std::size_t i = 0; i < slots; ++i) fwce.q[i] = 1.0 / pr.p[i];
    rhs *= fujii_wilson(g, inst.weights, fwce);
  }
  for (std::size_t i = 0; i < slots; ++i) {
    const LeafFn mlam = seq_maximal(g, inst.lambdas[i]);
    rhs *= weighted_lp_norm(g, mlam, inst.weights[i], pr.p[i]);
  }
  rep.rhs = rhs;
  safe_ratio(rep);
  return rep;
}

IneqReport eval_convex(const Instance& inst, const IneqParams& pr) {
  const auto mm = static_cast<std::size_t>(pr.m);
  check_instance_weights(inst, pr.m);
  check_instance_lambdas(inst, mm);
  inst.tau.validate("sparse coefficient sequence");

  const Grid& g = inst.grid;
  const auto ints = weight_integrals(g, inst.weights);
  const std::size_t n = g.cube_count();

  IneqReport rep;
  double lhs = 0.0;
  for (std::size_t lin = 0; lin < n; ++lin) {
    const double tq = inst.tau.at_lin(lin);
    if (tq == 0.0) continue;
    double factor = tq * g.measure_lin(lin);
    for (std::size_t i = 0; i < mm && factor > 0.0; ++i) factor *= inst.lambdas[i].at_lin(lin);
    if (factor == 0.0) continue;
    double sscore = 0.0;
    for (std::size_t i = 0; i < mm; ++i)
      sscore += pr.s[i] * (ints[i].log_integral_lin(lin) - g.log_measure_lin(lin));
    lhs += factor * std::exp(sscore);
  }
  rep.lhs = lhs;

  CharExponents ce;
  ce.q.resize(mm);
  for (std::size_t i = 0; i < mm; ++i) ce.q[i] = pr.s[i] - 1.0 / pr.p[i];
  double rhs = carleson_norm(g, inst.tau) * muckenhoupt(g, inst.weights, ce);

  double fw_sum = 0.0;
  for (int j : pr.js) {
    CharExponents fwce;
    fwce.q.assign(mm, 0.0);
    for (std::size_t i = 0; i < mm; ++i)
      if (static_cast<int>(i) != j) fwce.q[i] = 1.0 / pr.p[i];
    fw_sum += fujii_wilson(inst.grid, inst.weights, fwce);
  }
  rhs *= fw_sum;

  std::vector<bool> strong(mm, false);
  for (int j : pr.js) strong[static_cast<std::size_t>(j)] = true;
  for (std::size_t i = 0; i < mm; ++i) {
    const LeafFn mlam = seq_maximal(g, inst.lambdas[i]);
    if (strong[i]) {
      rhs *= weighted_lp_norm(g, mlam, inst.weights[i], pr.p[i]);
    } else {
      rhs *= lorentz_norm(g, mlam, inst.weights[i], pr.p[i], 1.0);
    }
  }
  rep.rhs = rhs;
  safe_ratio(rep);
  return rep;
}

IneqReport eval_concave(const Instance& inst, const IneqParams& pr) {
  const auto mm = static_cast<std::size_t>(pr.m);
  const std::size_t slots = mm - 1;
  check_instance_weights(inst, pr.m);
  check_instance_lambdas(inst, slots);
  inst.tau.validate("sparse coefficient sequence");

  const Grid& g = inst.grid;
  const auto ints = weight_integrals(g, inst.weights);
  const std::size_t n = g.cube_count();
  const std::size_t leaf_off = g.leaf_count() - 1;

  double alpha = 0.0;
  for (double pi : pr.p) alpha += 1.0 / pi;

  // term(Q) = τ_Q Π_{i<m} λ_{i,Q} (w_i)_Q^{s_i}
  std::vector<double> term(n, 0.0);
  for (std::size_t lin = 0; lin < n; ++lin) {
    double factor = inst.tau.at_lin(lin);
    for (std::size_t i = 0; i < slots && factor > 0.0; ++i) factor *= inst.lambdas[i].at_lin(lin);
    if (factor == 0.0) continue;
    double sscore = 0.0;
    for (std::size_t i = 0; i < slots; ++i)
      sscore += pr.s[i] * (ints[i].log_integral_lin(lin) - g.log_measure_lin(lin));
    term[lin] = factor * std::exp(sscore);
  }

  const LeafFn& wm = inst.weights[slots];
  IneqReport rep;
  if (!pr.disjoint_ground) {
    std::vector<double> running(n);
    running[0] = term[0];
    for (std::size_t lin = 0; lin < leaf_off; ++lin) {
      running[2 * lin + 1] = running[lin] + term[2 * lin + 1];
      running[2 * lin + 2] = running[lin] + term[2 * lin + 2];
    }
    double integral = 0.0;
    for (std::size_t x = 0; x < g.leaf_count(); ++x) {
      const double v = running[leaf_off + x];
      if (v > 0.0) integral += std::pow(v, 1.0 / alpha) * wm[x] * g.leaf_mass(x);
    }
    rep.lhs = (integral > 0.0) ? std::pow(integral, alpha) : 0.0;
  } else {
    // Prescribed disjoint ground: on disjoint sets the outer power acts on
    // each piece separately, and fractional densities split the atoms.
    std::vector<double> piece(g.leaf_count(), 0.0);
    std::vector<double> stack(g.leaf_count(), 0.0);
    for (const auto& entry : inst.ground.entries) {
      g.require(entry.cube);
      const auto [lo, hi] = g.leaf_range(entry.cube);
      if (entry.density.size() != hi - lo)
        throw validation_error("ground entry for cube " + cube_to_string(entry.cube) +
                               " must carry one density per covered leaf");
      const double tv = term[cube_linear(entry.cube)];
      const double powered = (tv > 0.0) ? std::pow(tv, 1.0 / alpha) : 0.0;
      for (std::size_t x = lo; x < hi; ++x) {
        const double d = entry.density[x - lo];
        if (!(d >= 0.0) || !(d <= 1.0 + 1e-12))
          throw validation_error("ground densities must lie in [0, 1]");
        stack[x] += d;
        piece[x] += d * powered;
      }
    }
    for (std::size_t x = 0; x < g.leaf_count(); ++x)
      if (stack[x] > 1.0 + 1e-9)
        throw validation_error("ground pieces must be disjoint; leaf " + std::to_string(x) +
                               " is covered with total density " + std::to_string(stack[x]));
    double integral = 0.0;
    for (std::size_t x = 0; x < g.leaf_count(); ++x)
      if (piece[x] > 0.0) integral += piece[x] * wm[x] * g.leaf_mass(x);
    rep.lhs = (integral > 0.0) ? std::pow(integral, alpha) : 0.0;
  }

  CharExponents ce;
  ce.q.resize(mm);
  for (std::size_t i = 0; i < slots; ++i) ce.q[i] = pr.s[i] - 1.0 / pr.p[i];
  ce.q[slots] = alpha;
  double rhs = carleson_norm(g, inst.tau) * muckenhoupt(g, inst.weights, ce);
  CharExponents fwce;
  fwce.q.assign(mm, 0.0);
  for (std::size_t i = 0; i < slots; ++i) fwce.q[i] = 1.0 / pr.p[i];
  rhs *= fujii_wilson(g, inst.weights, fwce);
  for (std::size_t i = 0; i < slots; ++i) {
    const LeafFn mlam = seq_maximal(g, inst.lambdas[i]);
    rhs *= weighted_lp_norm(g, mlam, inst.weights[i], pr.p[i]);
  }
  rep.rhs = rhs;
  safe_ratio(rep);
  return rep;
}

IneqReport eval_frac_max_lorentz(const Instance& inst, const IneqParams& pr) {
  check_instance_functions(inst, 1);
  if (!inst.aux.strictly_positive())
    throw validation_error("the Lorentz maximal case needs a strictly positive measure nu");

  const double q = 1.0 / (1.0 / pr.lor_p - pr.lor_rho);
  const LeafFn mf = fractional_maximal_wrt(inst.grid, inst.functions[0], pr.lor_rho, inst.aux);

  IneqReport rep;
  rep.lhs = lorentz_norm_measure(mf.values(), inst.aux.values(), q, pr.lor_r);
  rep.rhs = lorentz_norm_measure(inst.functions[0].values(), inst.aux.values(), pr.lor_p, pr.lor_r);
  safe_ratio(rep);
  return rep;
}

}  // namespace

IneqReport evaluate_inequality(CaseId c, const Instance& inst, const IneqParams& params) {
  params.validate(c);
  switch (c) {
    case CaseId::MaxWeak:
      return eval_max(inst, params, true);
    case CaseId::MaxStrong:
      return eval_max(inst, params, false);
    case CaseId::BDual:
      return eval_b_dual(inst, params);
    case CaseId::ABelow:
      return eval_a_below(inst, params, false);
    case CaseId::ABelowWeakProbe:
      return eval_a_below(inst, params, true);
    case CaseId::FwAp:
      return eval_fw_ap(inst, params);
    case CaseId::SumLt1:
      return eval_sum_lt1(inst, params);
    case CaseId::Cov:
      return eval_cov(inst, params);
    case CaseId::Key:
      return eval_key(inst, params);
    case CaseId::CharStop:
      return eval_char_stop(inst, params, false);
    case CaseId::CharAltProbe:
      return eval_char_stop(inst, params, true);
    case CaseId::Convex:
      return eval_convex(inst, params);
    case CaseId::Concave:
      return eval_concave(inst, params);
    case CaseId::FracMaxLorentz:
      return eval_frac_max_lorentz(inst, params);
  }
  throw validation_error("unknown inequality case");
}

}  // namespace dyadic
