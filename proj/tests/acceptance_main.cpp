// Acceptance gate: eleven desk-scale checks, one line of output each, with
// the measured quantity, the pinned tolerance, and the wall-clock budget.
// Exits nonzero if any line fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdlab/convexcalc.hpp"
#include "qdlab/gallery.hpp"
#include "qdlab/operators.hpp"
#include "qdlab/quasidensity.hpp"
#include "qdlab/rng.hpp"

using namespace qdlab;

namespace {

struct Gate {
  int failures = 0;

  void report(int id, bool pass, double seconds, double budget, const std::string& detail) {
    std::printf("[%2d] %s  %s  | %.3fs < %.0fs\n", id, pass && seconds < budget ? "PASS" : "FAIL",
                detail.c_str(), seconds, budget);
    if (!pass || seconds >= budget) ++failures;
  }
};

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

OperatorGraph anti_diagonal_cloud() {
  std::vector<PairedPoint> pts;
  Axis ax{-2, 2, 17};
  for (int i = 0; i < ax.n; ++i) pts.push_back(PairedPoint::finite({ax.coord(i)}, {-ax.coord(i)}));
  return OperatorGraph::cloud(std::move(pts));
}

Eigen::MatrixXd random_monotone(Rng& rng, int n) {
  Eigen::MatrixXd B(n, n), C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      B(i, j) = rng.uniform(-1, 1);
      C(i, j) = rng.uniform(-1, 1);
    }
  return B.transpose() * B + 0.5 * (C - C.transpose());
}

GridFunction phi_identity(const Grid& g) {
  return GridFunction::sample(g, [](const std::vector<double>& b) {
    double s = b[0] + b[1];
    return 0.25 * s * s;
  });
}

std::vector<Eigen::MatrixXd> g_certified;  // operators certified in criterion 3

// 1. Probe of the anti-diagonal line at (1,0) gives exactly 1/2, and the
//    one-slot closed form (s + s* - x - x*)^2 / 2 matches r_L.
void criterion1(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Certificate c = probe(anti_diagonal_cloud(), PairedPoint::finite({1}, {0}));
  double inf_err = std::abs(c.inf_estimate - 0.5);
  Rng rng(2026);
  double closed_err = 0.0;
  for (int k = 0; k < 10000; ++k) {
    double s = rng.uniform(-3, 3), ss = rng.uniform(-3, 3);
    double x = rng.uniform(-3, 3), xs = rng.uniform(-3, 3);
    double direct = r_form(PairedPoint::finite({s}, {ss}) - PairedPoint::finite({x}, {xs}));
    double closed = 0.5 * (s + ss - x - xs) * (s + ss - x - xs);
    closed_err = std::max(closed_err, std::abs(direct - closed));
  }
  bool pass = inf_err <= 1e-9 && c.verdict == QdVerdict::NotQuasidense && closed_err <= 1e-12;
  gate.report(1, pass, now_seconds(t0), 1.0,
              fmt("line probe inf=%.12f (err %.2e <= 1e-9), closed-form err %.2e <= 1e-12",
                  c.inf_estimate, inf_err, closed_err));
}

// 2. Bilinear identity suite on 10^4 random points of R^4 x R^4.
void criterion2(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(2027);
  double ident = 0.0;   // worst identity residual
  double slack = 0.0;   // worst inequality violation (should stay ~0)
  for (int k = 0; k < 10000; ++k) {
    auto b = PairedPoint::finite(rng.vector(4, -2, 2), rng.vector(4, -2, 2));
    auto c = PairedPoint::finite(rng.vector(4, -2, 2), rng.vector(4, -2, 2));
    auto cs = DualPoint::finite(rng.vector(4, -2, 2), rng.vector(4, -2, 2));
    ident = std::max(ident, std::abs(q_form(b - c) - (q_form(b) + q_form(c) -
                                                      pairing(b, apply_L(c)))));
    ident = std::max(ident, std::abs(q_dual(cs + apply_L(c)) -
                                     (q_dual(cs) + pairing(c, cs) + q_form(c))));
    ident = std::max(ident, std::abs(pairing(b, apply_L(c)) - pairing(c, apply_L(b))));
    slack = std::max(slack, q_dual(apply_L(b) + cs) - (r_form(b) + r_dual(cs)));
    double nb = point_norm(b), nc = point_norm(c);
    slack = std::max(slack, r_form(b + c) - (r_form(b) + 2 * nb * nc + r_form(c)));
  }
  bool pass = ident <= 1e-12 && slack <= 1e-12;
  gate.report(2, pass, now_seconds(t0), 1.0,
              fmt("identity residual %.2e <= 1e-12, inequality slack %.2e <= 1e-12", ident,
                  slack));
}

// 3. 100 random monotone linear maps (n <= 8), 100 probes each: the resolvent
//    least-squares value vanishes.
void criterion3(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(2028);
  double worst = 0.0;
  g_certified.clear();
  for (int op = 0; op < 100; ++op) {
    int n = 1 + static_cast<int>(rng.index(8));
    Eigen::MatrixXd M = random_monotone(rng, n);
    g_certified.push_back(M);
    for (int k = 0; k < 100; ++k) {
      auto c = PairedPoint::finite(rng.vector(n, -3, 3), rng.vector(n, -3, 3));
      worst = std::max(worst, minty_min(M, c).value);
    }
  }
  gate.report(3, worst <= 1e-10, now_seconds(t0), 5.0,
              fmt("10^4 resolvent solves, worst r value %.2e <= 1e-10", worst));
}

// 4. Skew gallery: difference basis images exact, skewness and omega pairing
//    vanish, and the probe floor 1/10 survives sampling and descent.
void criterion4(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  bool basis = true;
  for (int j = 0; j <= 50; ++j) {
    FinTailSeq img = gallery::skew_apply(FinTailSeq::unit(j) - FinTailSeq::unit(j + 1));
    basis = basis && img.approx_equal(FinTailSeq::unit(j) + FinTailSeq::unit(j + 1), 0.0);
  }
  Rng rng(2029);
  double wskew = 0.0, womega = 0.0, floor_gap = kPlusInf;
  for (int k = 0; k < 1000; ++k) {
    FinTailSeq x = gallery::random_zero_sum(rng, 64);
    gallery::TnotmaxWitness w = gallery::tnotmax_witness(x);
    wskew = std::max(wskew, std::abs(w.skewness));
    womega = std::max(womega, std::abs(w.omega_pair));
    floor_gap = std::min(floor_gap, gallery::skew_bound(x).r - 0.1);
  }
  Budget b;
  b.restarts = 8;
  Certificate desc = probe(OperatorGraph::builtin("skewq"),
                           PairedPoint(FinTailSeq::unit(0), FinTailSeq::zero(),
                                       PairedSpace::c0()),
                           1e-6, b);
  double desc_gap = desc.inf_estimate - 0.1;
  bool pass = basis && wskew <= 1e-12 && womega <= 1e-12 && floor_gap >= -1e-9 &&
              desc_gap >= -1e-9;
  gate.report(4, pass, now_seconds(t0), 10.0,
              fmt("basis %s, |<x,Sx>| %.2e, |<Sx,w**>| %.2e <= 1e-12, sample floor slack %.2e, "
                  "descent slack %.2e >= -1e-9",
                  basis ? "exact" : "BROKEN", wskew, womega, floor_gap, desc_gap));
}

// 5. Telescoping gallery: quadratic and cross identities exact, probe floor
//    1/4 + (2 sigma - 1)^2 / 4 never violated.
void criterion5(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(2030);
  FinTailSeq ones = FinTailSeq::constant(1.0);
  double ulem = 0.0, xylem = 0.0, floor_gap = kPlusInf, quarter_gap = kPlusInf;
  for (int k = 0; k < 10000; ++k) {
    FinTailSeq xs = FinTailSeq::from_dense(rng.vector(16, -2, 2));
    double sigma = seq_pairing(xs, ones);
    ulem = std::max(ulem, std::abs(seq_pairing(xs, gallery::bs_apply(xs)) - sigma * sigma));
    if (k < 1000) {
      FinTailSeq ys = FinTailSeq::from_dense(rng.vector(12, -2, 2));
      double sy = seq_pairing(ys, ones);
      double lhs = seq_pairing(ys, gallery::bs_apply(xs));
      double rhs = seq_pairing(xs, ones.scaled(2.0 * sy) - gallery::bs_apply(ys));
      xylem = std::max(xylem, std::abs(lhs - rhs));
      gallery::BsBound bb = gallery::bs_bound(xs);
      floor_gap = std::min(floor_gap, bb.r - bb.rhs);
      quarter_gap = std::min(quarter_gap, bb.r - 0.25);
    }
  }
  bool pass = ulem <= 1e-12 && xylem <= 1e-12 && floor_gap >= -1e-9 && quarter_gap >= -1e-9;
  gate.report(5, pass, now_seconds(t0), 10.0,
              fmt("square identity %.2e, cross identity %.2e <= 1e-12, bound slack %.2e, "
                  "quarter slack %.2e >= -1e-9",
                  ulem, xylem, floor_gap, quarter_gap));
}

// 6. Theta formula: members evaluate to mu^2 from N = 1 on, monotone in N,
//    never above mu^2; the scalar conjugate k* matches on integers.
void criterion6(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(2031);
  FinTailSeq ones = FinTailSeq::constant(1.0);
  double value_err = 0.0, overshoot = 0.0;
  bool monotone = true, members = true;
  for (int k = 0; k < 100; ++k) {
    FinTailSeq ys = FinTailSeq::from_dense(rng.vector(10, -1, 1));
    double sigma = seq_pairing(ys, ones);
    double mu = rng.uniform(-2, 2);
    FinTailSeq yss = ones.scaled(2.0 * mu - 2.0 * sigma) + gallery::bs_apply(ys);
    double prev = -kPlusInf;
    for (int N : {1, 2, 4, 8, 16, 32, 64}) {
      gallery::BsTheta th = gallery::bs_theta(ys, yss, N);
      members = members && th.member;
      monotone = monotone && th.value >= prev - 1e-12;
      overshoot = std::max(overshoot, th.value - mu * mu);
      prev = th.value;
    }
    value_err = std::max(value_err, std::abs(prev - mu * mu));
  }
  double kerr = 0.0;
  for (int m = -3; m <= 3; ++m)
    kerr = std::max(kerr, std::abs(gallery::k_conjugate(m) - double(m) * double(m)));
  bool pass = members && monotone && value_err <= 1e-9 && overshoot <= 1e-9 && kerr <= 1e-12;
  gate.report(6, pass, now_seconds(t0), 5.0,
              fmt("members %s, monotone %s, |theta - mu^2| %.2e <= 1e-9, overshoot %.2e, "
                  "k* err %.2e",
                  members ? "all" : "MISSING", monotone ? "yes" : "NO", value_err, overshoot,
                  kerr));
}

// 7. Grid biconjugates on 129-node lines: envelope below, conjugates equal
//    within the Lipschitz-times-step bound.
void criterion7(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(2032);
  Grid g({Axis{-4, 4, 129}});
  double below = 0.0, conj_err = 0.0, bound = kPlusInf;
  for (int trial = 0; trial < 10; ++trial) {
    double a = rng.uniform(0.3, 1.5), b = rng.uniform(-1, 1);
    GridFunction h = GridFunction::sample(g, [&](const std::vector<double>& x) {
      return 0.5 * a * (x[0] - b) * (x[0] - b);
    });
    h.at(rng.index(g.size())) += rng.uniform(0.5, 2.0);  // non-lsc style spike
    Grid dual = default_dual_grid(h);
    GridFunction f = biconjugate_envelope(h, dual);
    for (std::size_t i = 0; i < g.size(); ++i) below = std::max(below, f.at(i) - h.at(i));
    GridFunction fs = conjugate(f, dual);
    GridFunction hs = conjugate(h, dual);
    for (std::size_t i = 0; i < dual.size(); ++i)
      conj_err = std::max(conj_err, std::abs(fs.at(i) - hs.at(i)));
    double L = std::max(std::abs(dual.axis(0).lo), std::abs(dual.axis(0).hi));
    bound = std::min(bound, L * g.axis(0).step());
  }
  bool pass = below <= 1e-12 && conj_err <= bound;
  gate.report(7, pass, now_seconds(t0), 5.0,
              fmt("f - h max %.2e <= 1e-12, |f* - h*| max %.2e <= L*h = %.2e", below, conj_err,
                  bound));
}

// 8. Sum-theorem desk check: episum of two identity Fitzpatrick functions on
//    65 x 65 matches (2x + y)^2 / 8, and the @-transform coincides with the
//    doubled-identity graph within one grid step.
void criterion8(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Grid g = Grid::box(2, 4, 65);
  GridFunction f = phi_identity(g);
  EpisumResult w = episum(f, f, 2);
  double h = g.axis(1).step();
  double episum_err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto b = g.node(i);
    double closed = (2 * b[0] + b[1]) * (2 * b[0] + b[1]) / 8.0;
    episum_err = std::max(episum_err, std::abs(w.value.at(i) - closed));
  }
  // rounding the half-way minimizer eta = y/2 to the lattice costs at most
  // (1/2)(h/2)^2 per unit of eta-curvature; the two quadratic terms total 1
  double grid_tol = h * h / 8.0 + 1e-12;

  GridFunction wat = at_transform(w.value);
  CoincidenceSet cs = coincidence_set(wat, 0.02);
  const Axis& ax = g.axis(0);
  double off_line = 0.0;   // worst |x* - 2x| among interior found nodes
  int unmatched = 0;       // line nodes with no found node within one index step
  std::vector<std::vector<int>> found;
  for (std::size_t flat : cs.nodes) found.push_back(g.multi(flat));
  for (const auto& m : found) {
    // the windowed @-transform is sup-clipped on the outermost ring, where it
    // can touch q spuriously; only interior nodes witness the line
    if (m[0] == 0 || m[0] == ax.n - 1 || m[1] == 0 || m[1] == g.axis(1).n - 1) continue;
    double x = ax.coord(m[0]), xs = g.axis(1).coord(m[1]);
    off_line = std::max(off_line, std::abs(xs - 2.0 * x));
  }
  for (int i = 0; i < ax.n; ++i) {
    double t = ax.coord(i);
    auto j = g.axis(1).index_of(2.0 * t, 1e-9);
    if (!j) continue;  // 2t outside the box
    bool hit = false;
    for (const auto& m : found)
      hit = hit || (std::abs(m[0] - i) <= 1 && std::abs(m[1] - *j) <= 1);
    if (!hit) ++unmatched;
  }
  bool pass = episum_err <= grid_tol && off_line <= g.axis(1).step() + 1e-9 && unmatched == 0;
  gate.report(8, pass, now_seconds(t0), 10.0,
              fmt("episum err %.2e <= %.2e, interior coincidence off-line %.3f <= step %.3f, "
                  "unmatched line nodes %d",
                  episum_err, grid_tol, off_line, g.axis(1).step(), unmatched));
}

// 9. Primal iteration on the identity Fitzpatrick function: step bound
//    sqrt(10) eps_n, landing on the coincidence set, and the (17 + 8M) eps
//    certificate.
void criterion9(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Grid g = Grid::box(2, 4, 65);
  GridFunction f = phi_identity(g);
  bool all_ok = true;
  double worst_step_slack = kPlusInf, worst_land = 0.0, worst_cert = kPlusInf;
  for (auto c : {std::vector<double>{1, 0}, {0, 1}, {2, -1}}) {
    for (double eps : {0.5, 0.25, 0.125}) {
      IterateResult res = primal_iterate(f, c, eps);
      all_ok = all_ok && res.status == IterStatus::Converged && res.within_bound;
      for (std::size_t n = 1; n < res.steps.size(); ++n)
        worst_step_slack = std::min(worst_step_slack,
                                    std::sqrt(10.0) * res.steps[n].eps + 1e-9 -
                                        res.steps[n].step_norm);
      worst_land = std::max(worst_land,
                            std::abs(res.final_center[0] - res.final_center[1]));
      worst_cert = std::min(worst_cert, res.bound - res.final_r_to_probe);
    }
  }
  bool pass = all_ok && worst_step_slack >= 0.0 && worst_land <= 1e-9 && worst_cert >= 0.0;
  gate.report(9, pass, now_seconds(t0), 10.0,
              fmt("converged %s, step-bound slack %.2e >= 0, diagonal landing err %.2e <= 1e-9, "
                  "(17+8M)eps slack %.3f >= 0",
                  all_ok ? "9/9" : "NO", worst_step_slack == kPlusInf ? 0.0 : worst_step_slack,
                  worst_land, worst_cert));
}

// 10. Negative-infimum condition: quasidense operators from criterion 3 pass
//     at random duals; the anti-diagonal line passes NI yet fails the probe.
void criterion10(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(2033);
  int ni_failures = 0;
  double worst = -kPlusInf;
  for (const Eigen::MatrixXd& M : g_certified) {
    int n = static_cast<int>(M.rows());
    auto S = OperatorGraph::linear(M);
    for (int k = 0; k < 100; ++k) {
      NiReport rep = ni_check(S, DualPoint::finite(rng.vector(n, -2, 2), rng.vector(n, -2, 2)));
      if (!rep.pass) ++ni_failures;
      if (std::isfinite(rep.value)) worst = std::max(worst, rep.value);
    }
  }
  auto line = anti_diagonal_cloud();
  NiReport line_ni = ni_check(line, DualPoint::finite({0}, {1}));
  Certificate line_probe = probe(line, PairedPoint::finite({0}, {1}));
  bool separation = line_ni.pass && line_probe.verdict == QdVerdict::NotQuasidense &&
                    std::abs(line_probe.inf_estimate - 0.5) <= 1e-9;
  bool pass = ni_failures == 0 && separation;
  gate.report(10, pass, now_seconds(t0), 5.0,
              fmt("NI failures %d/10^4 (worst finite value %.2e), line: NI %s + probe %.3f "
                  "not-quasidense",
                  ni_failures, worst, line_ni.pass ? "pass" : "FAIL", line_probe.inf_estimate));
}

// 11. Extension membership: telescoping graph images are members, the pinned
//     dual point (e1, Te1) is a member, and the off-graph identity analogue
//     misses by exactly 1/4.
void criterion11(Gate& gate) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(2034);
  auto bs = OperatorGraph::builtin("bstele");
  bool members = true;
  double gap = 0.0;
  for (int k = 0; k < 100; ++k) {
    FinTailSeq xs = FinTailSeq::from_dense(rng.vector(8, -1, 1));
    DualPoint c(xs, gallery::bs_apply(xs), PairedSpace::c0());
    ExtMembership m = fitz_ext_membership(bs, c);
    members = members && m.verdict == Membership::Member;
    gap = std::max(gap, std::abs(m.theta - m.qdual));
  }
  FinTailSeq e1 = FinTailSeq::unit(0);
  ExtMembership pinned = fitz_ext_membership(bs, DualPoint(e1, gallery::bs_apply(e1),
                                                           PairedSpace::c0()));
  bool pinned_ok = pinned.verdict == Membership::Member &&
                   std::abs(pinned.theta - 1.0) <= 1e-9 && std::abs(pinned.qdual - 1.0) <= 1e-9;
  auto Id1 = OperatorGraph::linear(Eigen::MatrixXd::Identity(1, 1));
  ExtMembership off = fitz_ext_membership(Id1, DualPoint::finite({0}, {1}));
  double quarter_err = std::abs(off.theta - off.qdual - 0.25);
  bool pass = members && gap <= 1e-9 && pinned_ok &&
              off.verdict == Membership::NotMember && quarter_err <= 1e-9;
  gate.report(11, pass, now_seconds(t0), 5.0,
              fmt("graph members %s (|theta - q~| max %.2e <= 1e-9), (e1, Te1) %s, off-graph "
                  "gap err %.2e <= 1e-9",
                  members ? "100/100" : "MISSING", gap,
                  pinned_ok ? "member" : "NOT MEMBER", quarter_err));
}

}  // namespace

int main() {
  Gate gate;
  criterion1(gate);
  criterion2(gate);
  criterion3(gate);
  criterion4(gate);
  criterion5(gate);
  criterion6(gate);
  criterion7(gate);
  criterion8(gate);
  criterion9(gate);
  criterion10(gate);
  criterion11(gate);
  std::printf("%s: %d/11 criteria passed\n", gate.failures == 0 ? "ACCEPTED" : "REJECTED",
              11 - gate.failures);
  return gate.failures == 0 ? 0 : 1;
}
