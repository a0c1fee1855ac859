#include "qdlab/convexcalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdlab {

namespace {

double node_snap_tol(const Grid& g) { return std::max(1e-9 * (1.0 + g.max_step()), 1e-12); }

}  // namespace

GridFunction conjugate(const GridFunction& f, const Grid& dual) {
  if (dual.dim() != f.grid().dim())
    throw std::invalid_argument("conjugate: dual grid dimension mismatch");
  f.validate();
  const Grid& pg = f.grid();
  std::vector<double> out(dual.size(), -kPlusInf);
  std::vector<double> y, x;
  for (std::size_t j = 0; j < dual.size(); ++j) {
    dual.node_into(j, y);
    double best = -kPlusInf;
    for (std::size_t i = 0; i < pg.size(); ++i) {
      double fx = f.at(i);
      if (!std::isfinite(fx)) continue;
      pg.node_into(i, x);
      double v = coord_dot(x, y) - fx;
      if (v > best) best = v;
    }
    out[j] = best;
  }
  return GridFunction(dual, std::move(out));
}

Grid default_dual_grid(const GridFunction& f) {
  const Grid& g = f.grid();
  std::vector<Axis> axes;
  axes.reserve(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    double L = 0.0;
    double h = g.axis(k).step();
    if (h > 0) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto m = g.multi(i);
        if (m[k] + 1 >= g.axis(k).n) continue;
        auto m2 = m;
        m2[k] += 1;
        double a = f.at(i), b = f.at(g.flat(m2));
        if (std::isfinite(a) && std::isfinite(b)) L = std::max(L, std::abs(b - a) / h);
      }
    }
    if (L == 0.0) L = 1.0;
    axes.push_back(Axis{-L, L, g.axis(k).n});
  }
  return Grid(std::move(axes));
}

GridFunction biconjugate_envelope(const GridFunction& h, const std::optional<Grid>& dual) {
  Grid d = dual ? *dual : default_dual_grid(h);
  GridFunction hstar = conjugate(h, d);
  return conjugate(hstar, h.grid());
}

GridFunction at_transform(const GridFunction& f) {
  const Grid& g = f.grid();
  if (g.dim() % 2 != 0)
    throw std::invalid_argument("at_transform: grid must split into E x E* blocks");
  f.validate();
  std::vector<double> out(g.size());
  std::vector<double> a, b;
  for (std::size_t j = 0; j < g.size(); ++j) {
    g.node_into(j, a);
    std::vector<double> la = coord_swap(a);
    double best = -kPlusInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double fb = f.at(i);
      if (!std::isfinite(fb)) continue;
      g.node_into(i, b);
      double v = coord_dot(b, la) - fb;
      if (v > best) best = v;
    }
    out[j] = best;
  }
  return GridFunction(g, std::move(out));
}

GridFunction shift_by(const GridFunction& f, const PairedPoint& c) {
  const Grid& g = f.grid();
  if (g.dim() % 2 != 0)
    throw std::invalid_argument("shift_by: grid must split into E x E* blocks");
  std::size_t half = g.dim() / 2;
  std::vector<double> cc(g.dim());
  for (std::size_t i = 0; i < half; ++i) {
    cc[i] = c.x.entry(i);
    cc[i + half] = c.xstar.entry(i);
  }
  std::vector<double> lc = coord_swap(cc);
  double qc = coord_q(cc);
  std::vector<Axis> axes;
  for (std::size_t k = 0; k < g.dim(); ++k)
    axes.push_back(Axis{g.axis(k).lo - cc[k], g.axis(k).hi - cc[k], g.axis(k).n});
  Grid shifted(std::move(axes));
  std::vector<double> out(g.size());
  std::vector<double> bcoord;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = f.at(i);  // f(b + c): node i of g is exactly b + c
    if (std::isfinite(v)) {
      shifted.node_into(i, bcoord);
      v = v - coord_dot(bcoord, lc) - qc;
    }
    out[i] = v;
  }
  return GridFunction(shifted, std::move(out));
}

double eval_extended(const GridFunction& f, const std::vector<double>& coords) {
  const Grid& g = f.grid();
  if (coords.size() != g.dim()) throw std::invalid_argument("eval_extended: dimension mismatch");
  if (auto idx = g.find_node(coords, node_snap_tol(g))) return f.at(*idx);
  if (!g.contains(coords)) return kPlusInf;
  // multilinear interpolation over the enclosing cell
  std::vector<int> base(g.dim());
  std::vector<double> w(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    const Axis& a = g.axis(k);
    if (a.n == 1) {
      base[k] = 0;
      w[k] = 0.0;
      continue;
    }
    double t = (coords[k] - a.lo) / a.step();
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, a.n - 2);
    base[k] = i;
    w[k] = std::clamp(t - i, 0.0, 1.0);
  }
  double acc = 0.0;
  std::size_t corners = std::size_t(1) << g.dim();
  std::vector<int> m(g.dim());
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double weight = 1.0;
    for (std::size_t k = 0; k < g.dim(); ++k) {
      bool hiSide = (mask >> k) & 1u;
      if (g.axis(k).n == 1 && hiSide) {
        weight = 0.0;
        break;
      }
      m[k] = base[k] + (hiSide ? 1 : 0);
      weight *= hiSide ? w[k] : (1.0 - w[k]);
    }
    if (weight == 0.0) continue;
    double v = f.at(g.flat(m));
    if (!std::isfinite(v)) return kPlusInf;
    acc += weight * v;
  }
  return acc;
}

EpisumResult episum(const GridFunction& f, const GridFunction& g, int slot) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("episum: incompatible grids");
  const Grid& gr = f.grid();
  if (gr.dim() % 2 != 0)
    throw std::invalid_argument("episum: grid must split into E x E* blocks");
  if (slot != 1 && slot != 2) throw std::invalid_argument("episum: slot must be 1 or 2");
  std::size_t half = gr.dim() / 2;
  std::size_t b0 = (slot == 1) ? 0 : half;  // first axis of the split block
  // difference-closedness: node differences must land back on the lattice
  for (std::size_t k = b0; k < b0 + half; ++k) {
    const Axis& a = gr.axis(k);
    if (a.n > 1) {
      double ratio = a.lo / a.step();
      if (std::abs(ratio - std::lround(ratio)) > 1e-9)
        throw std::invalid_argument("episum: slot axes are not difference-closed");
    }
  }

  std::vector<double> out(gr.size(), kPlusInf);
  std::vector<EpisumFlag> flags(gr.size(), EpisumFlag::Empty);
  bool exact = true;

  // iterate over nodes; for each, scan the block sub-lattice of translates
  std::size_t blockCount = 1;
  for (std::size_t k = b0; k < b0 + half; ++k) blockCount *= gr.axis(k).n;

  std::vector<int> m, metaXm, gm;
  for (std::size_t i = 0; i < gr.size(); ++i) {
    m = gr.multi(i);
    double best = kPlusInf;
    bool bestBoundary = false;
    bool found = false;
    // eta runs over the block sub-lattice; y - eta must stay on the axes
    for (std::size_t e = 0; e < blockCount; ++e) {
      std::size_t rem = e;
      bool feasible = true;
      bool boundary = false;
      gm = m;
      metaXm = m;
      for (std::size_t k = b0 + half; k-- > b0;) {
        const Axis& a = gr.axis(k);
        int je = static_cast<int>(rem % a.n);
        rem /= a.n;
        // index of y - eta on the axis: iy - je + ilo where lo = ilo * step
        long ilo = std::lround(a.lo / (a.n > 1 ? a.step() : 1.0));
        long diffIdx = static_cast<long>(m[k]) - je - ilo;
        if (diffIdx < 0 || diffIdx >= a.n) {
          feasible = false;
          break;
        }
        gm[k] = je;
        metaXm[k] = static_cast<int>(diffIdx);
        // feasible window edge on this axis
        if (je == 0 || je == a.n - 1 || diffIdx == 0 || diffIdx == a.n - 1) boundary = true;
      }
      if (!feasible) continue;
      double fv = f.at(gr.flat(metaXm));
      if (!std::isfinite(fv)) continue;
      double gv = g.at(gr.flat(gm));
      if (!std::isfinite(gv)) continue;
      double v = fv + gv;
      found = true;
      if (v < best) {
        best = v;
        bestBoundary = boundary;
      }
    }
    out[i] = found ? best : kPlusInf;
    if (!found) {
      flags[i] = EpisumFlag::Empty;
    } else if (bestBoundary) {
      flags[i] = EpisumFlag::Boundary;
      exact = false;
    } else {
      flags[i] = EpisumFlag::Interior;
    }
  }
  EpisumResult res{GridFunction(gr, std::move(out)), std::move(flags), exact};
  return res;
}

CoincidenceSet coincidence_set(const GridFunction& f, double tol) {
  const Grid& g = f.grid();
  if (g.dim() % 2 != 0)
    throw std::invalid_argument("coincidence_set: grid must split into E x E* blocks");
  CoincidenceSet cs{g, {}, tol};
  std::vector<double> c;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = f.at(i);
    if (!std::isfinite(v)) continue;
    g.node_into(i, c);
    double gap = v - coord_q(c);
    if (gap < -tol)
      throw std::domain_error("coincidence_set: domination violation, f < q at a node");
    if (gap <= tol) cs.nodes.push_back(i);
  }
  return cs;
}

std::optional<RsSearchResult> rslem_search(const GridFunction& p, const GridFunction& s,
                                           const Grid& dual, double tol) {
  if (!(p.grid() == s.grid())) throw std::invalid_argument("rslem_search: incompatible grids");
  const Grid& g = p.grid();
  std::vector<double> origin(g.dim(), 0.0);
  auto oi = g.find_node(origin, node_snap_tol(g));
  if (!oi) throw std::invalid_argument("rslem_search: origin is not a grid node");
  if (!(s.at(*oi) > 0)) throw std::invalid_argument("rslem_search: s(0) <= 0");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (s.at(i) > p.at(i) + 1e-12)
      throw std::invalid_argument("rslem_search: s exceeds p at a node");
  GridFunction pstar = conjugate(p, dual);
  std::size_t bestIdx = 0;
  double best = kPlusInf;
  for (std::size_t j = 0; j < dual.size(); ++j) {
    if (pstar.at(j) < best) {
      best = pstar.at(j);
      bestIdx = j;
    }
  }
  if (best <= tol) return RsSearchResult{dual.node(bestIdx), best};
  return std::nullopt;
}

}  // namespace qdlab
