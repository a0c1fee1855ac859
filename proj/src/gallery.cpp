#include "qdlab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdlab/spaces.hpp"

namespace qdlab::gallery {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite_support(const FinTailSeq& v, const char* who) {
  if (!v.finitely_supported())
    throw std::invalid_argument(std::string(who) + ": needs a finitely supported argument");
}

double seq_sum(const FinTailSeq& v) { return seq_pairing(v, FinTailSeq::constant(1.0)); }

}  // namespace

FinTailSeq suffix_sums(const FinTailSeq& x) {
  require_finite_support(x, "suffix_sums");
  std::size_t m = x.prefix_size();
  std::vector<double> t(m, 0.0);
  double acc = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    acc += x.entry(j);
    t[j] = acc;
  }
  return FinTailSeq::from_dense(std::move(t));
}

FinTailSeq tail_apply(const FinTailSeq& ystar) {
  require_finite_support(ystar, "tail_apply");
  return suffix_sums(ystar);
}

FinTailSeq make_skew_element(const FinTailSeq& x, double tol) {
  require_finite_support(x, "make_skew_element");
  double s = seq_sum(x);
  if (std::abs(s) > tol)
    throw std::invalid_argument("make_skew_element: entries do not sum to zero");
  return x;
}

FinTailSeq random_zero_sum(Rng& rng, int n) {
  std::vector<double> v = rng.vector(static_cast<std::size_t>(n), -1.0, 1.0);
  double mean = 0.0;
  for (double y : v) mean += y;
  mean /= n;
  for (double& y : v) y -= mean;
  double s = 0.0;
  for (double y : v) s += y;
  v.back() -= s;
  return FinTailSeq::from_dense(std::move(v));
}

FinTailSeq skew_apply(const FinTailSeq& x) {
  make_skew_element(x, 1e-9);
  FinTailSeq t = suffix_sums(x);
  std::size_t m = x.prefix_size();
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) out[j] = -t.entry(j) - t.entry(j + 1);
  return FinTailSeq::from_dense(std::move(out));
}

SkewBound skew_bound(const FinTailSeq& x) {
  FinTailSeq Sx = skew_apply(x);
  FinTailSeq dx = x - FinTailSeq::unit(0);
  double a = seq_norm(dx, NormKind::LInf);
  double b = seq_norm(Sx, NormKind::L1);
  double r = 0.5 * a * a + 0.5 * b * b + seq_pairing(dx, Sx);
  double x1 = x.entry(0);
  double chain = 0.5 * (x1 - 1.0) * (x1 - 1.0) + 2.0 * x1 * x1 - x1;
  return {r, chain};
}

TnotmaxWitness tnotmax_witness(const FinTailSeq& x) {
  FinTailSeq Sx = skew_apply(x);
  FinTailSeq omega = FinTailSeq::alternating(-1.0);
  double skewness = seq_pairing(x, Sx);
  double omega_pair = seq_pairing(Sx, omega);
  double relation_q = seq_pairing(Sx, x - omega);
  return {skewness, omega_pair, relation_q};
}

FinTailSeq bs_apply(const FinTailSeq& xstar) {
  require_finite_support(xstar, "bs_apply");
  FinTailSeq tau = suffix_sums(xstar);
  std::size_t m = xstar.prefix_size();
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) out[j] = tau.entry(j) + tau.entry(j + 1);
  return FinTailSeq::from_dense(std::move(out));
}

BsBound bs_bound(const FinTailSeq& xstar) {
  FinTailSeq Tx = bs_apply(xstar);
  FinTailSeq diff = Tx - FinTailSeq::constant(1.0);
  double a = seq_norm(xstar, NormKind::L1);
  double b = seq_norm(diff, NormKind::LInf);
  double r = 0.5 * a * a + 0.5 * b * b + seq_pairing(xstar, diff);
  double sigma = seq_sum(xstar);
  double rhs = 0.25 + 0.25 * (2.0 * sigma - 1.0) * (2.0 * sigma - 1.0);
  return {r, rhs};
}

BsTheta bs_theta(const FinTailSeq& ystar, const FinTailSeq& ystarstar, int truncation) {
  require_finite_support(ystar, "bs_theta");
  if (truncation < 1) throw std::invalid_argument("bs_theta: truncation must be >= 1");
  const double tol = 1e-9;
  double sigma = seq_sum(ystar);
  FinTailSeq Ty = bs_apply(ystar);
  // z_i = 2 sigma - (T y*)_i + y**_i; the sup over x* supported in [0, N)
  // of <x*, z> - (sum x*)^2 is finite iff z is constant on the window.
  auto z_at = [&](std::size_t i) { return 2.0 * sigma - Ty.entry(i) + ystarstar.entry(i); };
  std::size_t window = static_cast<std::size_t>(truncation);
  std::size_t structural =
      std::max(Ty.prefix_size(), ystarstar.prefix_size()) + 2;  // covers tail behaviour

  BsTheta res;
  // window analysis
  double zc = z_at(0);
  bool window_const = true;
  for (std::size_t i = 1; i < window; ++i)
    if (std::abs(z_at(i) - zc) > tol * (1.0 + std::abs(zc))) {
      window_const = false;
      break;
    }
  std::size_t dev_i = 0;
  if (!window_const) {
    double best_gap = -1.0;
    for (std::size_t i = 0; i + 1 < window; ++i) {
      double gap = std::abs(z_at(i) - z_at(i + 1));
      if (gap > best_gap) {
        best_gap = gap;
        dev_i = i;
      }
    }
  }
  // full analysis: constant beyond the window too?
  bool full_const = window_const;
  if (full_const) {
    if (ystarstar.tail_kind() == FinTailSeq::TailKind::Alt && ystarstar.tail_value() != 0.0)
      full_const = false;
    for (std::size_t i = window; full_const && i < structural; ++i)
      if (std::abs(z_at(i) - zc) > tol * (1.0 + std::abs(zc))) full_const = false;
  }

  if (!window_const) {
    res.member = false;
    res.unbounded = true;
    res.exact = true;  // the escape ray is feasible at this truncation
    res.value = kInf;
    res.direction = FinTailSeq::unit(dev_i) - FinTailSeq::unit(dev_i + 1);
    return res;
  }
  double mu = 0.5 * zc;
  res.member = full_const;
  res.mu = mu;
  res.exact = full_const;  // 2 mu s - s^2 <= mu^2 holds for every x* then
  res.attained = FinTailSeq::unit(0).scaled(mu);
  // honest sup value: the raw objective at the attained point
  FinTailSeq xs = res.attained;
  double raw = seq_pairing(ystar, bs_apply(xs)) + seq_pairing(xs, ystarstar);
  double s = seq_sum(xs);
  res.value = raw - s * s;
  return res;
}

BsDivergence bs_theta_divergence(double lambda, int truncation) {
  FinTailSeq ystar = FinTailSeq::unit(0);
  FinTailSeq ystarstar = bs_apply(ystar) - FinTailSeq::constant(2.0);
  BsTheta th = bs_theta(ystar.scaled(lambda), ystarstar.scaled(lambda), truncation);
  double pair = seq_pairing(ystar, ystarstar);
  return {th.value, 2.0 * lambda * pair};
}

double k_conjugate(double mu) {
  double t = mu;  // stationary point of 2 mu t - t^2
  return 2.0 * mu * t - t * t;
}

OffAxisReport k_conjugate_offaxis(const FinTailSeq& z, double scan_radius) {
  std::size_t structural = z.prefix_size() + 2;
  std::size_t dev_i = structural;
  double best_gap = 0.0;
  for (std::size_t i = 0; i + 1 < structural + 1; ++i) {
    double gap = std::abs(z.entry(i) - z.entry(i + 1));
    if (gap > best_gap) {
      best_gap = gap;
      dev_i = i;
    }
  }
  OffAxisReport rep;
  if (best_gap <= 1e-12 * (1.0 + std::abs(z.entry(0)))) {
    rep.in_domain = true;
    double mu = 0.5 * z.entry(0);
    rep.escape = mu * mu;
    return rep;
  }
  rep.in_domain = false;
  rep.direction = FinTailSeq::unit(dev_i) - FinTailSeq::unit(dev_i + 1);
  // k vanishes along zero-sum directions, so the conjugate objective grows
  // linearly: <lambda d, z> - k(lambda d) = lambda <d, z>
  double slope = std::abs(seq_pairing(rep.direction, z));
  rep.escape = scan_radius * slope;
  return rep;
}

}  // namespace qdlab::gallery
