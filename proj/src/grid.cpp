#include "qdlab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace qdlab {

std::optional<int> Axis::index_of(double x, double tol) const {
  if (n == 1) return (std::abs(x - lo) <= tol) ? std::optional<int>(0) : std::nullopt;
  double h = step();
  int i = static_cast<int>(std::lround((x - lo) / h));
  if (i < 0 || i >= n) return std::nullopt;
  if (std::abs(coord(i) - x) > tol) return std::nullopt;
  return i;
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 4)
    throw std::invalid_argument("Grid: dimension must be between 1 and 4");
  size_ = 1;
  for (const auto& a : axes_) {
    if (a.n < 1 || a.hi < a.lo) throw std::invalid_argument("Grid: malformed axis");
    size_ *= static_cast<std::size_t>(a.n);
  }
}

Grid Grid::box(int dim, double radius, int n) {
  std::vector<Axis> axes(dim, Axis{-radius, radius, n});
  return Grid(std::move(axes));
}

std::vector<int> Grid::multi(std::size_t flat) const {
  std::vector<int> m(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    m[k] = static_cast<int>(flat % axes_[k].n);
    flat /= axes_[k].n;
  }
  return m;
}

std::size_t Grid::flat(const std::vector<int>& multi) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) f = f * axes_[k].n + multi[k];
  return f;
}

std::vector<double> Grid::node(std::size_t flat) const {
  std::vector<double> c(axes_.size());
  node_into(flat, c);
  return c;
}

void Grid::node_into(std::size_t flat, std::vector<double>& out) const {
  out.resize(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    out[k] = axes_[k].coord(static_cast<int>(flat % axes_[k].n));
    flat /= axes_[k].n;
  }
}

std::optional<std::size_t> Grid::find_node(const std::vector<double>& coords, double tol) const {
  if (coords.size() != axes_.size()) return std::nullopt;
  std::size_t f = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    auto i = axes_[k].index_of(coords[k], tol);
    if (!i) return std::nullopt;
    f = f * axes_[k].n + static_cast<std::size_t>(*i);
  }
  return f;
}

bool Grid::contains(const std::vector<double>& coords) const {
  if (coords.size() != axes_.size()) return false;
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (coords[k] < axes_[k].lo - 1e-12 || coords[k] > axes_[k].hi + 1e-12) return false;
  return true;
}

double Grid::max_step() const {
  double h = 0.0;
  for (const auto& a : axes_) h = std::max(h, a.step());
  return h;
}

bool Grid::operator==(const Grid& o) const {
  if (axes_.size() != o.axes_.size()) return false;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (axes_[k].lo != o.axes_[k].lo || axes_[k].hi != o.axes_[k].hi ||
        axes_[k].n != o.axes_[k].n)
      return false;
  }
  return true;
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("GridFunction: value array does not match grid size");
  validate();
}

GridFunction GridFunction::sample(const Grid& grid,
                                  const std::function<double(const std::vector<double>&)>& fn) {
  std::vector<double> v(grid.size());
  std::vector<double> c;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node_into(i, c);
    v[i] = fn(c);
  }
  return GridFunction(grid, std::move(v));
}

std::size_t GridFunction::finite_count() const {
  std::size_t k = 0;
  for (double v : values_)
    if (std::isfinite(v)) ++k;
  return k;
}

void GridFunction::validate() const {
  std::size_t finite = 0;
  for (double v : values_) {
    if (std::isnan(v)) throw std::invalid_argument("GridFunction: NaN value");
    if (v == -kPlusInf)
      throw std::invalid_argument("GridFunction: -inf value (no lsc minorant)");
    if (std::isfinite(v)) ++finite;
  }
  if (finite == 0) throw std::invalid_argument("GridFunction: improper (no finite value)");
}

double coord_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double coord_q(const std::vector<double>& c) {
  std::size_t h = c.size() / 2;
  if (2 * h != c.size()) throw std::invalid_argument("coord_q: odd-dimensional node");
  double s = 0.0;
  for (std::size_t i = 0; i < h; ++i) s += c[i] * c[i + h];
  return s;
}

std::vector<double> coord_swap(const std::vector<double>& c) {
  std::size_t h = c.size() / 2;
  if (2 * h != c.size()) throw std::invalid_argument("coord_swap: odd-dimensional node");
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = c[i + h];
    out[i + h] = c[i];
  }
  return out;
}

double coord_sq(const std::vector<double>& c) {
  double s = 0.0;
  for (double v : c) s += v * v;
  return s;
}

double coord_r(const std::vector<double>& c) { return 0.5 * coord_sq(c) + coord_q(c); }

}  // namespace qdlab
