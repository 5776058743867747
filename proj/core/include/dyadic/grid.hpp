#ifndef DYADIC_GRID_HPP
#define DYADIC_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dyadic {

// A node of the full binary tree over the leaves: `level` counts from the
// root (level 0), `index` runs left to right within a level. The node at
// (l, k) covers leaves [k * 2^(D-l), (k+1) * 2^(D-l)) on a depth-D grid.
struct CubeId {
  int level = 0;
  std::uint64_t index = 0;
  friend bool operator==(const CubeId&, const CubeId&) = default;
};

inline CubeId root_cube() { return CubeId{0, 0}; }
inline CubeId parent_cube(CubeId q) { return CubeId{q.level - 1, q.index >> 1}; }
inline CubeId child_cube(CubeId q, int which) {
  return CubeId{q.level + 1, (q.index << 1) | static_cast<std::uint64_t>(which & 1)};
}

// Level-major linear layout: levels are stored contiguously, so the node
// (l, k) lives at offset (2^l - 1) + k and the full tree occupies
// 2^(depth+1) - 1 slots.
inline std::size_t cube_linear(CubeId q) {
  return ((std::size_t{1} << q.level) - 1) + static_cast<std::size_t>(q.index);
}
CubeId cube_from_linear(std::size_t lin);
std::size_t cube_count_for_depth(int depth);

// Serialized form "level:index", used by the JSON formats.
std::string cube_to_string(CubeId q);
CubeId cube_from_string(std::string_view text);

// Whether prospective ⊆ outer as dyadic cubes (identical ids included).
inline bool cube_contains(CubeId outer, CubeId inner) {
  return inner.level >= outer.level &&
         (inner.index >> (inner.level - outer.level)) == outer.index;
}

// A finite dyadic grid: a depth-D binary tree whose 2^D leaves carry strictly
// positive masses. The measure of a node is the sum of the leaf masses below
// it; all node measures are precomputed bottom-up at construction.
class Grid {
 public:
  Grid(int depth, std::vector<double> leaf_masses);

  int depth() const { return depth_; }
  std::size_t leaf_count() const { return leaf_mass_.size(); }
  std::size_t cube_count() const { return cube_mass_.size(); }

  bool contains(CubeId q) const {
    return q.level >= 0 && q.level <= depth_ &&
           q.index < (std::uint64_t{1} << q.level);
  }
  void require(CubeId q) const;

  // Leaves covered by q, as a half-open index range.
  std::pair<std::size_t, std::size_t> leaf_range(CubeId q) const {
    const int shift = depth_ - q.level;
    return {static_cast<std::size_t>(q.index) << shift,
            static_cast<std::size_t>(q.index + 1) << shift};
  }
  bool is_leaf(CubeId q) const { return q.level == depth_; }

  double leaf_mass(std::size_t leaf) const { return leaf_mass_[leaf]; }
  const std::vector<double>& leaf_masses() const { return leaf_mass_; }

  double measure(CubeId q) const;
  double measure_lin(std::size_t lin) const { return cube_mass_[lin]; }
  double log_measure_lin(std::size_t lin) const { return log_cube_mass_[lin]; }
  double total_mass() const { return cube_mass_[0]; }

 private:
  int depth_;
  std::vector<double> leaf_mass_;
  std::vector<double> cube_mass_;      // per linear id, summed bottom-up
  std::vector<double> log_cube_mass_;  // log of the above
};

double cube_measure(const Grid& g, CubeId q);

// Chain of nodes from the root down to the given leaf node, root first.
std::vector<CubeId> ancestors(const Grid& g, CubeId leaf);

// A nonnegative function on the leaves. Weights additionally require strict
// positivity, which is cached at construction and checked by consumers.
class LeafFn {
 public:
  explicit LeafFn(std::vector<double> values);
  static LeafFn constant(std::size_t n, double c);

  const std::vector<double>& values() const { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::size_t size() const { return v_.size(); }
  bool strictly_positive() const { return strictly_positive_; }

  // Replaces one value (used by the ratio search); revalidates the entry.
  void set(std::size_t i, double value);

 private:
  std::vector<double> v_;
  bool strictly_positive_;
};

// Average of f over q with respect to the grid measure.
double average(const Grid& g, const LeafFn& f, CubeId q);

// Integrals of f dμ over every node, accumulated bottom-up (pairwise tree
// sums: exact additivity structure and far better relative accuracy than
// prefix-sum differences). Logs are precomputed since nearly every consumer
// combines averages multiplicatively in log space.
class CubeIntegrals {
 public:
  CubeIntegrals(const Grid& g, const LeafFn& f);
  CubeIntegrals(const Grid& g, const std::vector<double>& pointwise);

  double integral_lin(std::size_t lin) const { return integral_[lin]; }
  double integral(CubeId q) const { return integral_[cube_linear(q)]; }
  double log_integral_lin(std::size_t lin) const { return log_integral_[lin]; }

 private:
  void build(const Grid& g, const std::vector<double>& pointwise);
  std::vector<double> integral_;
  std::vector<double> log_integral_;
};

// A nonnegative number attached to every node of a depth-D tree, stored
// densely in the level-major layout.
class CubeSeq {
 public:
  explicit CubeSeq(int depth, double fill = 0.0);

  int depth() const { return depth_; }
  std::size_t size() const { return v_.size(); }

  double at_lin(std::size_t lin) const { return v_[lin]; }
  double& at_lin(std::size_t lin) { return v_[lin]; }
  double at(CubeId q) const { return v_[cube_linear(q)]; }
  double& at(CubeId q) { return v_[cube_linear(q)]; }

  const std::vector<double>& values() const { return v_; }

  // Throws validation_error if any entry is negative or non-finite.
  void validate(const char* what) const;

 private:
  int depth_;
  std::vector<double> v_;
};

// The sequence Q ↦ (f)_Q of averages of f.
CubeSeq cube_averages(const Grid& g, const LeafFn& f);

}  // namespace dyadic

#endif
