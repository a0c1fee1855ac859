#pragma once

#include <cstdint>
#include <optional>

#include "qdlab/grid.hpp"
#include "qdlab/spaces.hpp"

namespace qdlab {

// Discrete Legendre transform: f*(y) = max over finite grid nodes x of
// <x, y> - f(x), evaluated at every node of `dual`. Ties go to the
// lexicographically smallest node. Exact on the sampled lattice; the
// continuum conjugate of an L-Lipschitz function differs by at most L * h.
GridFunction conjugate(const GridFunction& f, const Grid& dual);

// Dual grid heuristic: per-axis slope box [-L_i, L_i] from the largest
// finite difference quotient, same node counts.
Grid default_dual_grid(const GridFunction& f);

// f = h** through a double transform. f <= h holds node-wise, and f* = h*
// exactly on the dual grid used for the round trip.
GridFunction biconjugate_envelope(const GridFunction& h,
                                  const std::optional<Grid>& dual = std::nullopt);

// f^@(a) = f*(L a) on an even-dimensional E x E* grid: the conjugate sup
// evaluated at the slot-swapped node.
GridFunction at_transform(const GridFunction& f);

// f_c(b) = f(b + c) - <b, Lc> - q(c), sampled on the translated lattice
// (axes shifted by -c) so every output node reads f at an input node.
GridFunction shift_by(const GridFunction& f, const PairedPoint& c);

// Point evaluation used for off-lattice queries: exact node lookup, else
// multilinear interpolation inside the hull (+inf if any corner is +inf),
// else +inf outside the grid.
double eval_extended(const GridFunction& f, const std::vector<double>& coords);

enum class EpisumFlag : std::uint8_t { Empty = 0, Interior = 1, Boundary = 2 };

struct EpisumResult {
  GridFunction value;
  // per node: Empty (no feasible translate / +inf), Interior (min attained
  // strictly inside the feasible window: the exact "episum with attainment"),
  // Boundary (min only at the clipped edge of the window)
  std::vector<EpisumFlag> flags;
  bool exact = false;  // every finite node attained Interior
};

// Partial episum over slot 1 (first half of the axes) or slot 2 (second
// half): slot 2 gives (f (+)_2 g)(x, y) = inf_eta [f(x, y - eta) + g(x, eta)].
// Both functions must share the grid, and the slot axes must be
// difference-closed (origin on the step lattice).
EpisumResult episum(const GridFunction& f, const GridFunction& g, int slot);

struct CoincidenceSet {
  Grid grid;
  std::vector<std::size_t> nodes;  // flat ids, ascending
  double tol = 0.0;
};

// Nodes where f = q within tol on an E x E* grid. Throws std::domain_error
// if f < q - tol anywhere (domination violation).
CoincidenceSet coincidence_set(const GridFunction& f, double tol);

struct RsSearchResult {
  std::vector<double> node;
  double value;  // p*(node)
};

// Searches the dual grid for x* with p*(x*) <= tol, given s <= p, s(0) > 0.
// Returns the best node found or nullopt.
std::optional<RsSearchResult> rslem_search(const GridFunction& p, const GridFunction& s,
                                           const Grid& dual, double tol);

}  // namespace qdlab
