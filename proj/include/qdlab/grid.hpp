#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace qdlab {

inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;

  double step() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
  double coord(int i) const { return n > 1 ? lo + step() * i : lo; }
  // nearest node index if within snap tolerance of a node and inside range
  std::optional<int> index_of(double x, double tol) const;
};

// Rectangular lattice in R^d, d <= 4. Flat indices are row-major with axis 0
// outermost, so ascending flat order is lexicographic node order.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<Axis> axes);

  // symmetric box [-radius, radius]^dim with n nodes per axis
  static Grid box(int dim, double radius, int n);

  std::size_t dim() const { return axes_.size(); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(std::size_t i) const { return axes_[i]; }
  std::size_t size() const { return size_; }

  std::vector<int> multi(std::size_t flat) const;
  std::size_t flat(const std::vector<int>& multi) const;
  std::vector<double> node(std::size_t flat) const;
  void node_into(std::size_t flat, std::vector<double>& out) const;
  std::optional<std::size_t> find_node(const std::vector<double>& coords, double tol) const;
  bool contains(const std::vector<double>& coords) const;
  double max_step() const;

  bool operator==(const Grid& o) const;

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 1;
};

// Extended-real function sampled on a grid. +inf marks "no value here";
// -inf is rejected, and at least one node must be finite.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Grid grid, std::vector<double> values);

  static GridFunction sample(const Grid& grid,
                             const std::function<double(const std::vector<double>&)>& fn);

  const Grid& grid() const { return grid_; }
  double at(std::size_t flat) const { return values_[flat]; }
  double& at(std::size_t flat) { return values_[flat]; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::size_t finite_count() const;

  void validate() const;  // throws on -inf or all-infinite data

 private:
  Grid grid_;
  std::vector<double> values_;
};

// <.,.> of two coordinate tuples (plain dot product; on an E x E* grid this
// is exactly the (E x E*, E* x E**) pairing when dual nodes are listed as
// (y*, y**)).
double coord_dot(const std::vector<double>& a, const std::vector<double>& b);

// q-form of an even-dimensional node: first half paired against second half
double coord_q(const std::vector<double>& c);

// (x, x*) -> (x*, x): coordinates of the canonical image L(node)
std::vector<double> coord_swap(const std::vector<double>& c);

// squared euclidean product norm of an even-dimensional node
double coord_sq(const std::vector<double>& c);

// r-form of an even-dimensional node under euclidean slot norms
double coord_r(const std::vector<double>& c);

}  // namespace qdlab
