#include "dyadic/grid.hpp"

#include <cmath>
#include <charconv>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

constexpr int kMaxDepth = 22;

}  // namespace

std::size_t cube_count_for_depth(int depth) {
  return (std::size_t{2} << depth) - 1;
}

CubeId cube_from_linear(std::size_t lin) {
  int level = 0;
  while (((std::size_t{2} << level) - 1) <= lin) ++level;
  return CubeId{level, static_cast<std::uint64_t>(lin - ((std::size_t{1} << level) - 1))};
}

std::string cube_to_string(CubeId q) {
  return std::to_string(q.level) + ":" + std::to_string(q.index);
}

CubeId cube_from_string(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw validation_error("cube id must have the form level:index, got '" + std::string(text) + "'");
  CubeId q;
  const auto head = text.substr(0, colon);
  const auto tail = text.substr(colon + 1);
  auto r1 = std::from_chars(head.data(), head.data() + head.size(), q.level);
  auto r2 = std::from_chars(tail.data(), tail.data() + tail.size(), q.index);
  if (r1.ec != std::errc{} || r1.ptr != head.data() + head.size() ||
      r2.ec != std::errc{} || r2.ptr != tail.data() + tail.size())
    throw validation_error("cube id must have the form level:index, got '" + std::string(text) + "'");
  if (q.level < 0 || q.level > kMaxDepth || q.index >= (std::uint64_t{1} << q.level))
    throw validation_error("cube id '" + std::string(text) + "' does not name a node: index must be below 2^level");
  return q;
}

Grid::Grid(int depth, std::vector<double> leaf_masses) : depth_(depth), leaf_mass_(std::move(leaf_masses)) {
  if (depth < 0 || depth > kMaxDepth)
    throw validation_error("grid depth must lie in [0, " + std::to_string(kMaxDepth) + "], got " + std::to_string(depth));
  const std::size_t expect = std::size_t{1} << depth;
  if (leaf_mass_.size() != expect)
    throw validation_error("grid with depth " + std::to_string(depth) + " needs " + std::to_string(expect) +
                           " leaf masses, got " + std::to_string(leaf_mass_.size()));
  for (std::size_t i = 0; i < leaf_mass_.size(); ++i) {
    if (!(leaf_mass_[i] > 0.0) || !std::isfinite(leaf_mass_[i]))
      throw validation_error("leaf masses must be strictly positive and finite; leaf " + std::to_string(i) +
                             " has mass " + std::to_string(leaf_mass_[i]));
  }

  cube_mass_.resize(cube_count_for_depth(depth));
  const std::size_t leaf_off = (std::size_t{1} << depth) - 1;
  for (std::size_t i = 0; i < leaf_mass_.size(); ++i) cube_mass_[leaf_off + i] = leaf_mass_[i];
  for (std::size_t lin = leaf_off; lin-- > 0;)
    cube_mass_[lin] = cube_mass_[2 * lin + 1] + cube_mass_[2 * lin + 2];

  log_cube_mass_.resize(cube_mass_.size());
  for (std::size_t lin = 0; lin < cube_mass_.size(); ++lin) log_cube_mass_[lin] = std::log(cube_mass_[lin]);
}

void Grid::require(CubeId q) const {
  if (!contains(q))
    throw validation_error("cube " + cube_to_string(q) + " does not exist on a depth-" + std::to_string(depth_) + " grid");
}

double Grid::measure(CubeId q) const {
  require(q);
  return cube_mass_[cube_linear(q)];
}

double cube_measure(const Grid& g, CubeId q) { return g.measure(q); }

std::vector<CubeId> ancestors(const Grid& g, CubeId leaf) {
  g.require(leaf);
  if (!g.is_leaf(leaf))
    throw validation_error("ancestors expects a leaf node, got " + cube_to_string(leaf));
  std::vector<CubeId> chain(static_cast<std::size_t>(g.depth()) + 1);
  for (int l = 0; l <= g.depth(); ++l)
    chain[static_cast<std::size_t>(l)] = CubeId{l, leaf.index >> (g.depth() - l)};
  return chain;
}

LeafFn::LeafFn(std::vector<double> values) : v_(std::move(values)) {
  if (v_.empty()) throw validation_error("a leaf function needs at least one value");
  strictly_positive_ = true;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!(v_[i] >= 0.0) || !std::isfinite(v_[i]))
      throw validation_error("leaf function values must be finite and nonnegative; entry " + std::to_string(i) +
                             " is " + std::to_string(v_[i]));
    if (!(v_[i] > 0.0)) strictly_positive_ = false;
  }
}

LeafFn LeafFn::constant(std::size_t n, double c) {
  return LeafFn(std::vector<double>(n, c));
}

void LeafFn::set(std::size_t i, double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw validation_error("leaf function values must be finite and nonnegative");
  v_[i] = value;
  if (!(value > 0.0)) {
    strictly_positive_ = false;
  } else if (!strictly_positive_) {
    strictly_positive_ = true;
    for (double x : v_)
      if (!(x > 0.0)) { strictly_positive_ = false; break; }
  }
}

double average(const Grid& g, const LeafFn& f, CubeId q) {
  g.require(q);
  if (f.size() != g.leaf_count())
    throw validation_error("leaf function has " + std::to_string(f.size()) + " values but the grid has " +
                           std::to_string(g.leaf_count()) + " leaves");
  const auto [lo, hi] = g.leaf_range(q);
  double sum = 0.0;
  for (std::size_t i = lo; i < hi; ++i) sum += f[i] * g.leaf_mass(i);
  return sum / g.measure(q);
}

CubeIntegrals::CubeIntegrals(const Grid& g, const LeafFn& f) {
  if (f.size() != g.leaf_count())
    throw validation_error("leaf function has " + std::to_string(f.size()) + " values but the grid has " +
                           std::to_string(g.leaf_count()) + " leaves");
  build(g, f.values());
}

CubeIntegrals::CubeIntegrals(const Grid& g, const std::vector<double>& pointwise) {
  if (pointwise.size() != g.leaf_count())
    throw validation_error("pointwise data has " + std::to_string(pointwise.size()) + " values but the grid has " +
                           std::to_string(g.leaf_count()) + " leaves");
  build(g, pointwise);
}

void CubeIntegrals::build(const Grid& g, const std::vector<double>& pointwise) {
  integral_.resize(g.cube_count());
  const std::size_t leaf_off = g.leaf_count() - 1;
  for (std::size_t i = 0; i < g.leaf_count(); ++i) integral_[leaf_off + i] = pointwise[i] * g.leaf_mass(i);
  for (std::size_t lin = leaf_off; lin-- > 0;)
    integral_[lin] = integral_[2 * lin + 1] + integral_[2 * lin + 2];
  log_integral_.resize(integral_.size());
  for (std::size_t lin = 0; lin < integral_.size(); ++lin) log_integral_[lin] = std::log(integral_[lin]);
}

CubeSeq::CubeSeq(int depth, double fill) : depth_(depth) {
  if (depth < 0 || depth > kMaxDepth)
    throw validation_error("cube sequence depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
  v_.assign(cube_count_for_depth(depth), fill);
}

void CubeSeq::validate(const char* what) const {
  for (std::size_t lin = 0; lin < v_.size(); ++lin) {
    if (!(v_[lin] >= 0.0) || !std::isfinite(v_[lin]))
      throw validation_error(std::string(what) + " must be finite and nonnegative; cube " +
                             cube_to_string(cube_from_linear(lin)) + " carries " + std::to_string(v_[lin]));
  }
}

CubeSeq cube_averages(const Grid& g, const LeafFn& f) {
  CubeIntegrals ints(g, f);
  CubeSeq seq(g.depth());
  for (std::size_t lin = 0; lin < g.cube_count(); ++lin)
    seq.at_lin(lin) = ints.integral_lin(lin) / g.measure_lin(lin);
  return seq;
}

}  // namespace dyadic
