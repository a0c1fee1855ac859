#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "qdlab/rng.hpp"
#include "qdlab/spaces.hpp"

using namespace qdlab;

namespace {

PairedPoint random_point(Rng& rng, int n, double scale = 1.0) {
  return PairedPoint::finite(rng.vector(n, -scale, scale), rng.vector(n, -scale, scale));
}

DualPoint random_dual(Rng& rng, int n, double scale = 1.0) {
  return DualPoint::finite(rng.vector(n, -scale, scale), rng.vector(n, -scale, scale));
}

}  // namespace

TEST_CASE("pairing on R^1 and R^n") {
  auto b = PairedPoint::finite({1}, {2});
  auto c = DualPoint::finite({3}, {4});
  CHECK(pairing(b, c) == doctest::Approx(11.0).epsilon(1e-15));

  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    auto a = random_point(rng, 4);
    auto d = random_dual(rng, 4);
    double direct = 0.0;
    for (int i = 0; i < 4; ++i)
      direct += a.x.entry(i) * d.ystar.entry(i) + a.xstar.entry(i) * d.ystarstar.entry(i);
    CHECK(std::abs(pairing(a, d) - direct) <= 1e-14);
  }
}

TEST_CASE("pairing with structured tails is exact when one side has finite support") {
  // <e1 + e2, omega> with omega = (-1, 1, -1, ...)
  FinTailSeq u = FinTailSeq::unit(0) + FinTailSeq::unit(1);
  FinTailSeq omega = FinTailSeq::alternating(-1.0);
  CHECK(seq_pairing(u, omega) == 0.0);
  FinTailSeq ones = FinTailSeq::constant(1.0);
  CHECK(seq_pairing(u, ones) == 2.0);
  CHECK_THROWS_AS(seq_pairing(ones, omega), std::invalid_argument);
}

TEST_CASE("bilinear forms on R^1") {
  auto b = PairedPoint::finite({1}, {2});
  auto [q, r] = bilinear(b);
  CHECK(q == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("r-form equals half the squared sum in the euclidean case") {
  Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    auto b = random_point(rng, 5);
    double ss = 0.0;
    for (int i = 0; i < 5; ++i) {
      double s = b.x.entry(i) + b.xstar.entry(i);
      ss += s * s;
    }
    CHECK(std::abs(r_form(b) - 0.5 * ss) <= 1e-13);
  }
}

TEST_CASE("quadratic expansion of r on translated pairs") {
  // r_L((s,s*) - (x,x*)) = ((s + s* - x - x*)^2) / 2 on E = R
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) {
    double s = rng.uniform(-2, 2), ss = rng.uniform(-2, 2);
    double x = rng.uniform(-2, 2), xs = rng.uniform(-2, 2);
    auto d = PairedPoint::finite({s}, {ss}) - PairedPoint::finite({x}, {xs});
    double closed = 0.5 * (s + ss - x - xs) * (s + ss - x - xs);
    CHECK(std::abs(r_form(d) - closed) <= 1e-12);
  }
}

TEST_CASE("canonical map and its symmetry") {
  auto b = PairedPoint::finite({1, 0}, {0, 1});
  DualPoint Lb = apply_L(b);
  CHECK(Lb.ystar.entry(0) == 0.0);
  CHECK(Lb.ystar.entry(1) == 1.0);
  CHECK(Lb.ystarstar.entry(0) == 1.0);
  CHECK(Lb.ystarstar.entry(1) == 0.0);

  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    auto a = random_point(rng, 4);
    auto c = random_point(rng, 4);
    CHECK(std::abs(pairing(a, apply_L(c)) - pairing(c, apply_L(a))) <= 1e-13);
  }
}

TEST_CASE("dual forms agree with primal forms through L") {
  auto c = DualPoint::finite({3}, {4});
  auto [qd, rd] = dual_bilinear(c);
  CHECK(qd == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(rd == doctest::Approx(24.5).epsilon(1e-15));

  Rng rng(15);
  for (int k = 0; k < 1000; ++k) {
    auto b = random_point(rng, 3);
    auto Lb = apply_L(b);
    CHECK(std::abs(q_dual(Lb) - q_form(b)) <= 1e-13);
    CHECK(std::abs(r_dual(Lb) - r_form(b)) <= 1e-13);
  }
}

TEST_CASE("translation rule for the dual q-form") {
  // q~(c* + Lc) = q~(c*) + <c, c*> + q(c)
  Rng rng(16);
  for (int k = 0; k < 1000; ++k) {
    auto c = random_point(rng, 4);
    auto cs = random_dual(rng, 4);
    double lhs = q_dual(cs + apply_L(c));
    double rhs = q_dual(cs) + pairing(c, cs) + q_form(c);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("q-form parallelogram-type identity") {
  // q(b - c) = q(b) + q(c) - <b, Lc>
  Rng rng(17);
  for (int k = 0; k < 1000; ++k) {
    auto b = random_point(rng, 4);
    auto c = random_point(rng, 4);
    double lhs = q_form(b - c);
    double rhs = q_form(b) + q_form(c) - pairing(b, apply_L(c));
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("r bounds: 0 <= r <= squared norm") {
  Rng rng(18);
  for (int k = 0; k < 1000; ++k) {
    auto b = random_point(rng, 4, 3.0);
    double r = r_form(b);
    double n = point_norm(b);
    CHECK(r >= -1e-12);
    CHECK(r <= n * n + 1e-12);
  }
  // sequence-space case with mixed norms (sup norm against l1)
  auto x = FinTailSeq::from_dense({0.4, -0.4});
  auto xs = FinTailSeq::from_dense({0.3, 0.1, -0.2});
  PairedPoint b(x, xs, PairedSpace::c0());
  double r = r_form(b);
  double n = point_norm(b);
  CHECK(r >= 0.0);
  CHECK(r <= n * n);
}

TEST_CASE("cross-term bound for sums") {
  // r(b + d) <= r(b) + 2|b||d| + r(d) <= |b|^2 + 2|b||d| + r(d), and |Ld| = |d|
  Rng rng(19);
  for (int k = 0; k < 1000; ++k) {
    auto b = random_point(rng, 4, 2.0);
    auto d = random_point(rng, 4, 2.0);
    double nb = point_norm(b), nd = point_norm(d);
    double lhs = r_form(b + d);
    CHECK(lhs <= r_form(b) + 2 * nb * nd + r_form(d) + 1e-11);
    CHECK(r_form(b) + 2 * nb * nd + r_form(d) <= nb * nb + 2 * nb * nd + r_form(d) + 1e-11);
    CHECK(std::abs(point_norm(apply_L(d)) - nd) <= 1e-13);
  }
}

TEST_CASE("upper bound for the dual q-form along L-translates") {
  // q~(Lb + b*) <= r(b) + r~(b*)
  Rng rng(20);
  for (int k = 0; k < 1000; ++k) {
    auto b = random_point(rng, 4, 2.0);
    auto bs = random_dual(rng, 4, 2.0);
    CHECK(q_dual(apply_L(b) + bs) <= r_form(b) + r_dual(bs) + 1e-11);
  }
}

TEST_CASE("sequence norms") {
  CHECK(seq_norm(FinTailSeq::constant(1.0), NormKind::LInf) == 1.0);
  CHECK(seq_norm(FinTailSeq::alternating(-1.0), NormKind::LInf) == 1.0);
  CHECK(seq_norm(FinTailSeq::unit(0) + FinTailSeq::unit(1), NormKind::L1) == 2.0);
  CHECK(std::isinf(seq_norm(FinTailSeq::constant(2.0), NormKind::L1)));
  CHECK(std::isinf(seq_norm(FinTailSeq::alternating(1.0), NormKind::L2)));
  CHECK(seq_norm(FinTailSeq::from_dense({3, -4}), NormKind::L2) == doctest::Approx(5.0));
}

TEST_CASE("text form round-trips") {
  FinTailSeq a = FinTailSeq::from_dense({1.5, -2.25, 0.125});
  CHECK(FinTailSeq::parse(a.text()).approx_equal(a, 0.0));
  FinTailSeq b({0.5}, FinTailSeq::TailKind::Const, -3.0);
  CHECK(FinTailSeq::parse(b.text()).approx_equal(b, 0.0));
  FinTailSeq c({}, FinTailSeq::TailKind::Alt, 0.75);
  CHECK(FinTailSeq::parse(c.text()).approx_equal(c, 0.0));
  CHECK(FinTailSeq::parse("prefix=[];tail=zero").approx_equal(FinTailSeq::zero(), 0.0));
  CHECK_THROWS_AS(FinTailSeq::parse("prefix=[1;tail=zero"), std::invalid_argument);
  CHECK_THROWS_AS(FinTailSeq::parse("prefix=[];tail=ramp:1"), std::invalid_argument);
}

TEST_CASE("canonical form trims tail-compatible prefixes") {
  FinTailSeq a({0.0, 0.0}, FinTailSeq::TailKind::Zero, 0.0);
  CHECK(a.canonical().prefix_size() == 0);
  FinTailSeq b({2.0, 1.0, 1.0}, FinTailSeq::TailKind::Const, 1.0);
  CHECK(b.canonical().prefix_size() == 1);
  // (-1, 1, -1, ...) written with one materialized entry
  FinTailSeq c({-1.0}, FinTailSeq::TailKind::Alt, 1.0);
  FinTailSeq cc = c.canonical();
  CHECK(cc.prefix_size() == 0);
  CHECK(cc.tail_value() == -1.0);
  for (std::size_t i = 0; i < 6; ++i) CHECK(cc.entry(i) == c.entry(i));
}

TEST_CASE("structural errors") {
  auto b3 = PairedPoint::finite({1, 2, 3}, {0, 0, 1});
  auto c2 = DualPoint::finite({1, 2}, {0, 1});
  CHECK_THROWS_AS(pairing(b3, c2), std::invalid_argument);
  CHECK_THROWS_AS(PairedPoint::finite({1, 2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(FinTailSeq::constant(1.0) + FinTailSeq::alternating(1.0),
                  std::invalid_argument);
}
