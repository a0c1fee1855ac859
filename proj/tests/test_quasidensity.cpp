#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qdlab/gallery.hpp"
#include "qdlab/quasidensity.hpp"
#include "qdlab/rng.hpp"

using namespace qdlab;

namespace {

OperatorGraph anti_diagonal_cloud(double radius, int n) {
  std::vector<PairedPoint> pts;
  Axis ax{-radius, radius, n};
  for (int i = 0; i < n; ++i) {
    double t = ax.coord(i);
    pts.push_back(PairedPoint::finite({t}, {-t}));
  }
  return OperatorGraph::cloud(std::move(pts));
}

GridFunction phi_identity(const Grid& g) {
  return GridFunction::sample(g, [](const std::vector<double>& b) {
    double s = b[0] + b[1];
    return 0.25 * s * s;
  });
}

}  // namespace

TEST_CASE("probing the anti-diagonal line certifies the half gap") {
  // r((t, -t) - (1, 0)) = (t - t - 1)^2 / 2 = 1/2 for every t
  auto cloud = anti_diagonal_cloud(2.0, 17);
  Certificate c = probe(cloud, PairedPoint::finite({1}, {0}));
  CHECK(c.verdict == QdVerdict::NotQuasidense);
  CHECK(c.inf_estimate == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(c.lower_bound.has_value());
  CHECK(*c.lower_bound == doctest::Approx(0.5).epsilon(1e-12));

  auto line = OperatorGraph::linear(-Eigen::MatrixXd::Identity(1, 1));
  Certificate cl = probe(line, PairedPoint::finite({1}, {0}));
  CHECK(cl.verdict == QdVerdict::NotQuasidense);
  CHECK(cl.inf_estimate == doctest::Approx(0.5).epsilon(1e-9));
  REQUIRE(cl.lower_bound.has_value());
  CHECK(*cl.lower_bound == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("probing the identity map lands on the resolvent point") {
  auto Id = OperatorGraph::linear(Eigen::MatrixXd::Identity(1, 1));
  Certificate c = probe(Id, PairedPoint::finite({1}, {0}));
  CHECK(c.verdict == QdVerdict::QuasidenseEvidence);
  CHECK(c.inf_estimate <= 1e-10);
  REQUIRE(c.witness.has_value());
  CHECK(c.witness->x.entry(0) == doctest::Approx(0.5));
  CHECK(c.witness->xstar.entry(0) == doctest::Approx(0.5));
}

TEST_CASE("singleton clouds measure plain graph distance") {
  auto S = OperatorGraph::cloud({PairedPoint::finite({0}, {0})});
  Certificate hit = probe(S, PairedPoint::finite({0}, {0}));
  CHECK(hit.verdict == QdVerdict::QuasidenseEvidence);
  CHECK(hit.inf_estimate == 0.0);
  Certificate miss = probe(S, PairedPoint::finite({1}, {0}));
  CHECK(miss.verdict == QdVerdict::NotQuasidense);
  CHECK(miss.inf_estimate == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("random reflexive graphs always produce evidence") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + static_cast<int>(rng.index(4));
    Eigen::MatrixXd B(n, n), C(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        B(i, j) = rng.uniform(-1, 1);
        C(i, j) = rng.uniform(-1, 1);
      }
    auto S = OperatorGraph::linear(B.transpose() * B + 0.5 * (C - C.transpose()));
    for (int k = 0; k < 5; ++k) {
      Certificate c = probe(S, PairedPoint::finite(rng.vector(n, -3, 3), rng.vector(n, -3, 3)));
      CHECK(c.verdict == QdVerdict::QuasidenseEvidence);
      CHECK(c.inf_estimate <= 1e-10);
    }
  }
}

TEST_CASE("certificates keep the estimate above any certified lower bound") {
  Rng rng(52);
  auto cloud = anti_diagonal_cloud(2.0, 9);
  for (int k = 0; k < 30; ++k) {
    Certificate c = probe(cloud, PairedPoint::finite({rng.uniform(-2, 2)}, {rng.uniform(-2, 2)}));
    if (c.lower_bound) CHECK(c.inf_estimate >= *c.lower_bound - 1e-9);
    REQUIRE(c.probe_point.has_value());
    CHECK_FALSE(c.probe_dual.has_value());
  }
}

TEST_CASE("dual-level probes reach the rules behind pullbacks") {
  auto bs = OperatorGraph::builtin("bstele");
  Certificate c = probe(bs, DualPoint(FinTailSeq::zero(), FinTailSeq::constant(1.0),
                                      PairedSpace::c0()));
  CHECK(c.verdict == QdVerdict::NotQuasidense);
  REQUIRE(c.lower_bound.has_value());
  CHECK(*c.lower_bound == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c.inf_estimate >= 0.25 - 1e-9);
  REQUIRE(c.probe_dual.has_value());

  auto tail = OperatorGraph::builtin("tail");
  FinTailSeq e0 = FinTailSeq::unit(0);
  Certificate hit = probe(tail, DualPoint(e0, gallery::tail_apply(e0), PairedSpace::c0()));
  CHECK(hit.verdict == QdVerdict::QuasidenseEvidence);
  CHECK(hit.inf_estimate <= 1e-10);
}

TEST_CASE("more budget never worsens the skew probe estimate") {
  auto skew = OperatorGraph::builtin("skewq");
  PairedPoint c(FinTailSeq::unit(0), FinTailSeq::zero(), PairedSpace::c0());
  double prev = kPlusInf;
  for (int iters : {40, 120, 360}) {
    Budget b;
    b.iterations = iters;
    Certificate cert = probe(skew, c, 1e-6, b);
    CHECK(cert.inf_estimate <= prev + 1e-12);
    REQUIRE(cert.lower_bound.has_value());
    CHECK(*cert.lower_bound == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(cert.inf_estimate >= *cert.lower_bound - 1e-9);
    CHECK(cert.verdict == QdVerdict::NotQuasidense);
    prev = cert.inf_estimate;
  }
}

TEST_CASE("geometric tolerance schedule") {
  EpsSchedule s(0.5);
  CHECK(s.total() == 0.5);
  CHECK(s.at(0) == 0.5);
  CHECK(s.at(1) == 0.25);
  CHECK(s.at(3) == 0.0625);
  CHECK(s.partial_sum(40) == doctest::Approx(0.5).epsilon(1e-12));
  for (int n = 1; n < 20; ++n) CHECK(s.at(n) < s.at(n - 1));
  CHECK_THROWS_AS(EpsSchedule(0.0), std::invalid_argument);
  CHECK_THROWS_AS(EpsSchedule(3.0), std::invalid_argument);
  CHECK_THROWS_AS(EpsSchedule(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(s.at(-1), std::invalid_argument);
}

TEST_CASE("primal iteration on the identity Fitzpatrick function") {
  Grid g = Grid::box(2, 4, 65);
  GridFunction f = phi_identity(g);
  for (auto probe_pt : {std::vector<double>{1, 0}, {0, 1}, {2, -1}}) {
    for (double eps : {0.5, 0.25, 0.125}) {
      IterateResult res = primal_iterate(f, probe_pt, eps);
      CHECK(res.status == IterStatus::Converged);
      REQUIRE(res.final_center.size() == 2);
      // every probe contracts onto the diagonal node (1/2, 1/2)
      CHECK(std::abs(res.final_center[0] - 0.5) <= 1e-12);
      CHECK(std::abs(res.final_center[1] - 0.5) <= 1e-12);
      CHECK(res.final_gap <= 1e-9);
      CHECK(res.final_r_to_probe == 0.0);
      CHECK(res.within_bound);
      CHECK(res.bound == doctest::Approx((17 + 8 * res.big_m) * eps));
      EpsSchedule sched(eps);
      for (std::size_t n = 1; n < res.steps.size(); ++n)
        CHECK(res.steps[n].step_norm <= std::sqrt(10.0) * res.steps[n].eps + 1e-9);
    }
  }
}

TEST_CASE("primal iteration records a bounded move on a kinked instance") {
  // f = q + 0.05 |x - x*|: the probe has gap 0.05 but the node (0.5, 0.5)
  // scores 0, so the greedy pass moves immediately at stage 0
  Grid g = Grid::box(2, 2, 33);
  GridFunction f = GridFunction::sample(g, [](const std::vector<double>& b) {
    return b[0] * b[1] + 0.05 * std::abs(b[0] - b[1]);
  });
  IterateResult res = primal_iterate(f, {1, 0}, 0.5);
  CHECK(res.status == IterStatus::Converged);
  REQUIRE(res.steps.size() >= 1);
  const IterateStep& st = res.steps.front();
  CHECK(st.eps == doctest::Approx(0.5));
  CHECK(st.step_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(st.step_norm <= std::sqrt(10.0) * st.eps + 1e-9);
  CHECK(res.within_bound);
}

TEST_CASE("primal iteration aborts or freezes on degenerate inputs") {
  Grid g = Grid::box(2, 2, 17);
  GridFunction above = GridFunction::sample(
      g, [](const std::vector<double>& b) { return b[0] * b[1] + 1.0; });
  IterateResult bad = primal_iterate(above, {1, 0}, 0.5);
  CHECK(bad.status == IterStatus::AbortedHypothesis);

  GridFunction tight =
      GridFunction::sample(g, [](const std::vector<double>& b) { return b[0] * b[1]; });
  IterateResult still = primal_iterate(tight, {1, 0}, 0.5);
  CHECK(still.status == IterStatus::Converged);
  CHECK(still.steps.empty());
  CHECK(still.final_center[0] == 1.0);
  CHECK(still.final_center[1] == 0.0);

  CHECK_THROWS_AS(primal_iterate(GridFunction::sample(Grid({Axis{-1, 1, 5}}),
                                                      [](const std::vector<double>& x) {
                                                        return x[0] * x[0];
                                                      }),
                                 {1}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(primal_iterate(tight, {1, 0, 0}, 0.5), std::invalid_argument);
}

TEST_CASE("negative-infimum condition: closed form on the identity") {
  auto Id = OperatorGraph::linear(Eigen::MatrixXd::Identity(3, 3));
  Rng rng(53);
  for (int k = 0; k < 50; ++k) {
    auto u = rng.vector(3, -2, 2);
    auto v = rng.vector(3, -2, 2);
    NiReport rep = ni_check(Id, DualPoint::finite(u, v));
    CHECK(rep.pass);
    double dot = 0.0, s2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      dot += u[i] * v[i];
      double s = u[i] + v[i];
      s2 += s * s;
    }
    // min over a of q~(La - c*) = <y*, y**> - |y* + y**|^2 / 4 = -|y* - y**|^2 / 4
    CHECK(std::abs(rep.value - (dot - 0.25 * s2)) <= 1e-9);
  }
}

TEST_CASE("negative-infimum condition separates from quasidensity on the line") {
  auto line = OperatorGraph::linear(-Eigen::MatrixXd::Identity(1, 1));
  NiReport rep = ni_check(line, DualPoint::finite({0}, {1}));
  CHECK(rep.pass);  // indefinite quadratic escapes to -inf along the graph
  CHECK(rep.value <= 0.0);
  Certificate c = probe(line, PairedPoint::finite({0}, {1}));
  CHECK(c.verdict == QdVerdict::NotQuasidense);
  CHECK(c.inf_estimate == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("negative-infimum condition on clouds is exact enumeration") {
  auto S = OperatorGraph::cloud(
      {PairedPoint::finite({0}, {0}), PairedPoint::finite({1}, {1})});
  NiReport rep = ni_check(S, DualPoint::finite({1}, {1}));
  CHECK(rep.pass);
  CHECK(rep.value == doctest::Approx(0.0));
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->x.entry(0) == 1.0);

  CHECK_THROWS_AS(ni_check(OperatorGraph::seq_rule(SeqRuleKind::Tail),
                           DualPoint::finite({0}, {1})),
                  std::invalid_argument);
}

TEST_CASE("conjugate-side dual condition") {
  Grid g = Grid::box(2, 2, 17);
  GridFunction f = phi_identity(g);
  DualConditionReport ok = dual_condition_check(f);
  CHECK(ok.holds);
  CHECK(ok.worst >= -ok.tol);

  // Fitzpatrick function of the anti-diagonal line: 2|x* - x| + 4 on [-2,2]
  GridFunction bad = GridFunction::sample(g, [](const std::vector<double>& b) {
    return 2.0 * std::abs(b[1] - b[0]) + 4.0;
  });
  DualConditionReport no = dual_condition_check(bad, std::nullopt, Grid::box(2, 2, 17));
  CHECK_FALSE(no.holds);
  CHECK(no.worst <= -3.0 + 1e-9);  // worst slack -4 at the dual origin
  REQUIRE(no.worst_node.size() == 2);

  CHECK_THROWS_AS(dual_condition_check(GridFunction::sample(
                      Grid({Axis{-1, 1, 5}}),
                      [](const std::vector<double>& x) { return x[0] * x[0]; })),
                  std::invalid_argument);
}

TEST_CASE("verdict and status names") {
  CHECK(to_string(QdVerdict::QuasidenseEvidence) == "quasidense-evidence");
  CHECK(to_string(QdVerdict::NotQuasidense) == "not-quasidense");
  CHECK(to_string(QdVerdict::Indeterminate) == "indeterminate");
  CHECK(to_string(IterStatus::Converged) == "converged");
}
