#pragma once

#include <vector>

#include "qdlab/rng.hpp"
#include "qdlab/seq.hpp"

namespace qdlab::gallery {

// (T y*)_n = sum_{k >= n} y*_k for finitely supported y* (dual level,
// l1 -> linf with range inside the canonical copy of c0)
FinTailSeq tail_apply(const FinTailSeq& ystar);

// suffix sums t(x)_j = sum_{k >= j} x_k
FinTailSeq suffix_sums(const FinTailSeq& x);

// Element of the zero-sum domain K: finitely supported with sum 0 (within tol).
FinTailSeq make_skew_element(const FinTailSeq& x, double tol = 1e-12);
FinTailSeq random_zero_sum(Rng& rng, int n);

// (S x)_j = -t(x)_j - t(x)_{j+1} on K; <x, Sx> = 0
FinTailSeq skew_apply(const FinTailSeq& x);

struct SkewBound {
  double r;      // r((x, Sx) - (e1, 0)) under (sup, l1) slot norms
  double chain;  // (x1 - 1)^2 / 2 + 2 x1^2 - x1, which is >= 1/10
};
SkewBound skew_bound(const FinTailSeq& x);

struct TnotmaxWitness {
  double skewness;     // <x, Sx>
  double omega_pair;   // <Sx, omega> with omega = (-1, 1, -1, ...)
  double relation_q;   // q~(L(x, Sx) - (0, omega)): all three vanish on K
};
TnotmaxWitness tnotmax_witness(const FinTailSeq& x);

// (T x*)_j = tau_j + tau_{j+1} with tau the suffix sums (dual level)
FinTailSeq bs_apply(const FinTailSeq& xstar);

struct BsBound {
  double r;    // r~((x*, T x*) - (0, ones)) under (l1, sup) slot norms
  double rhs;  // 1/4 + (2 sigma - 1)^2 / 4 with sigma = sum x*, so r >= 1/4
};
BsBound bs_bound(const FinTailSeq& xstar);

struct BsTheta {
  bool member = false;   // (y*, y**) lies in the effective domain
  double mu = 0.0;       // defined by the membership equation when member
  double value = 0.0;    // theta at the point: mu^2 for members
  bool exact = false;    // certified globally, not just at the truncation
  bool unbounded = false;
  FinTailSeq attained;   // maximizing x* when member
  FinTailSeq direction;  // escape direction when not member
};

// theta of the pulled-back telescoping operator at (y*, y**), truncated to
// support N. Members have all entries of 2<y*,ones>*ones - T y* + y** equal
// to a common constant 2 mu; then the sup is mu^2, attained at x* = mu e1,
// independently of N >= 1. Off the domain the sup diverges along a zero-sum
// direction.
BsTheta bs_theta(const FinTailSeq& ystar, const FinTailSeq& ystarstar, int truncation = 64);

struct BsDivergence {
  double theta_scaled;    // theta at (lambda y*, lambda y**), which is 0
  double at_lower_bound;  // 2 lambda <y*, y**> = -2 lambda, a lower bound for
                          // the @-transform of theta at (y*, y**)
};
// Fixed witness pair y* = e1, y** = T e1 - 2 ones with <y*, y**> = -1.
BsDivergence bs_theta_divergence(double lambda, int truncation = 64);

// k*(2 mu ones) = mu^2 where k(y*) = <y*, ones>^2
double k_conjugate(double mu);

struct OffAxisReport {
  bool in_domain = false;  // z is a multiple of ones => finite conjugate
  double escape;           // largest scanned value of <x*, z> - k(x*)
  FinTailSeq direction;    // zero-sum direction with <d, z> != 0
};
// Evidence that z outside lin{ones} is outside dom k*: values along the
// separating direction grow without bound.
OffAxisReport k_conjugate_offaxis(const FinTailSeq& z, double scan_radius = 1e6);

}  // namespace qdlab::gallery
