#include "qdlab/spaces.hpp"

#include <cmath>
#include <stdexcept>

namespace qdlab {

namespace {

void check_slot(const FinTailSeq& v, const PairedSpace& sp, const char* what) {
  if (!sp.is_finite()) return;
  if (!v.finitely_supported() || v.prefix_size() > static_cast<std::size_t>(*sp.dim))
    throw std::invalid_argument(std::string(what) + ": entry does not fit the space dimension");
}

void check_same(const PairedSpace& a, const PairedSpace& b) {
  if (!a.compatible(b)) throw std::invalid_argument("paired space mismatch");
}

}  // namespace

PairedPoint::PairedPoint(FinTailSeq x_, FinTailSeq xstar_, PairedSpace sp)
    : x(std::move(x_)), xstar(std::move(xstar_)), space(sp) {
  check_slot(x, space, "PairedPoint.x");
  check_slot(xstar, space, "PairedPoint.xstar");
}

PairedPoint PairedPoint::finite(std::vector<double> x, std::vector<double> xstar, NormKind k) {
  if (x.size() != xstar.size())
    throw std::invalid_argument("PairedPoint: slot dimension mismatch");
  int n = static_cast<int>(x.size());
  return PairedPoint(FinTailSeq::from_dense(std::move(x)), FinTailSeq::from_dense(std::move(xstar)),
                     PairedSpace::finite(n, k));
}

PairedPoint PairedPoint::operator-(const PairedPoint& o) const {
  check_same(space, o.space);
  return PairedPoint(x - o.x, xstar - o.xstar, space);
}

PairedPoint PairedPoint::operator+(const PairedPoint& o) const {
  check_same(space, o.space);
  return PairedPoint(x + o.x, xstar + o.xstar, space);
}

PairedPoint PairedPoint::scaled(double s) const {
  return PairedPoint(x.scaled(s), xstar.scaled(s), space);
}

DualPoint::DualPoint(FinTailSeq ys, FinTailSeq yss, PairedSpace sp)
    : ystar(std::move(ys)), ystarstar(std::move(yss)), space(sp) {
  check_slot(ystar, space, "DualPoint.ystar");
  check_slot(ystarstar, space, "DualPoint.ystarstar");
}

DualPoint DualPoint::finite(std::vector<double> ystar, std::vector<double> ystarstar, NormKind k) {
  if (ystar.size() != ystarstar.size())
    throw std::invalid_argument("DualPoint: slot dimension mismatch");
  int n = static_cast<int>(ystar.size());
  return DualPoint(FinTailSeq::from_dense(std::move(ystar)),
                   FinTailSeq::from_dense(std::move(ystarstar)), PairedSpace::finite(n, k));
}

DualPoint DualPoint::operator-(const DualPoint& o) const {
  check_same(space, o.space);
  return DualPoint(ystar - o.ystar, ystarstar - o.ystarstar, space);
}

DualPoint DualPoint::operator+(const DualPoint& o) const {
  check_same(space, o.space);
  return DualPoint(ystar + o.ystar, ystarstar + o.ystarstar, space);
}

DualPoint DualPoint::scaled(double s) const {
  return DualPoint(ystar.scaled(s), ystarstar.scaled(s), space);
}

double pairing(const PairedPoint& b, const DualPoint& cstar) {
  check_same(b.space, cstar.space);
  return seq_pairing(b.x, cstar.ystar) + seq_pairing(b.xstar, cstar.ystarstar);
}

double q_form(const PairedPoint& b) { return seq_pairing(b.x, b.xstar); }

double r_form(const PairedPoint& b) {
  double nx = seq_norm(b.x, b.space.primal);
  double ns = seq_norm(b.xstar, b.space.dual());
  return 0.5 * nx * nx + 0.5 * ns * ns + q_form(b);
}

std::pair<double, double> bilinear(const PairedPoint& b) { return {q_form(b), r_form(b)}; }

DualPoint apply_L(const PairedPoint& b) { return DualPoint(b.xstar, b.x, b.space); }

double q_dual(const DualPoint& c) { return seq_pairing(c.ystar, c.ystarstar); }

double r_dual(const DualPoint& c) {
  double ns = seq_norm(c.ystar, c.space.dual());
  double nss = seq_norm(c.ystarstar, c.space.bidual());
  return 0.5 * ns * ns + 0.5 * nss * nss + q_dual(c);
}

std::pair<double, double> dual_bilinear(const DualPoint& c) { return {q_dual(c), r_dual(c)}; }

double point_norm(const PairedPoint& b) {
  double nx = seq_norm(b.x, b.space.primal);
  double ns = seq_norm(b.xstar, b.space.dual());
  return std::sqrt(nx * nx + ns * ns);
}

double point_norm(const DualPoint& c) {
  double ns = seq_norm(c.ystar, c.space.dual());
  double nss = seq_norm(c.ystarstar, c.space.bidual());
  return std::sqrt(ns * ns + nss * nss);
}

}  // namespace qdlab
