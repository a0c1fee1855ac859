#pragma once

#include <optional>
#include <utility>

#include "qdlab/seq.hpp"

namespace qdlab {

// The ambient pairing E x E*. A finite-dimensional space is R^n with the
// given norm (its dual carries the dual norm); `dim == nullopt` is the
// sequence space whose elements are FinTailSeq values (e.g. E = c0 with the
// sup norm, E* = l1, E** = linf).
struct PairedSpace {
  std::optional<int> dim;
  NormKind primal = NormKind::L2;

  static PairedSpace finite(int n, NormKind k = NormKind::L2) { return {n, k}; }
  static PairedSpace c0() { return {std::nullopt, NormKind::LInf}; }

  NormKind dual() const { return dual_norm(primal); }
  NormKind bidual() const { return dual_norm(dual()); }
  bool is_finite() const { return dim.has_value(); }
  bool compatible(const PairedSpace& o) const { return dim == o.dim && primal == o.primal; }
};

// b = (x, x*) in E x E*
struct PairedPoint {
  FinTailSeq x;
  FinTailSeq xstar;
  PairedSpace space;

  PairedPoint() = default;
  PairedPoint(FinTailSeq x_, FinTailSeq xstar_, PairedSpace sp);
  static PairedPoint finite(std::vector<double> x, std::vector<double> xstar,
                            NormKind k = NormKind::L2);

  PairedPoint operator-(const PairedPoint& o) const;
  PairedPoint operator+(const PairedPoint& o) const;
  PairedPoint scaled(double s) const;
};

// c* = (y*, y**) in E* x E**
struct DualPoint {
  FinTailSeq ystar;
  FinTailSeq ystarstar;
  PairedSpace space;

  DualPoint() = default;
  DualPoint(FinTailSeq ys, FinTailSeq yss, PairedSpace sp);
  static DualPoint finite(std::vector<double> ystar, std::vector<double> ystarstar,
                          NormKind k = NormKind::L2);

  DualPoint operator-(const DualPoint& o) const;
  DualPoint operator+(const DualPoint& o) const;
  DualPoint scaled(double s) const;
};

// <b, c*> = <x, y*> + <x*, y**>
double pairing(const PairedPoint& b, const DualPoint& cstar);

// q_L(b) = <x, x*>
double q_form(const PairedPoint& b);
// r_L(b) = |x|^2/2 + |x*|^2/2 + q_L(b)
double r_form(const PairedPoint& b);
std::pair<double, double> bilinear(const PairedPoint& b);

// L(x, x*) = (x*, x^) with x^ the canonical image of x in E**
DualPoint apply_L(const PairedPoint& b);

// dual-level forms on E* x E**
double q_dual(const DualPoint& c);
double r_dual(const DualPoint& c);
std::pair<double, double> dual_bilinear(const DualPoint& c);

// product norms sqrt(|x|_E^2 + |x*|_{E*}^2), sqrt(|y*|^2 + |y**|^2)
double point_norm(const PairedPoint& b);
double point_norm(const DualPoint& c);

}  // namespace qdlab
