#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdlab/grid.hpp"
#include "qdlab/operators.hpp"

namespace qdlab {

// A set A in E x E* is quasidense when inf over a in A of r((a - c)) vanishes
// for every probe c. One probe produces either supporting evidence (the inf
// estimate is ~0), a disproof (a certified positive lower bound on the inf),
// or nothing conclusive.
enum class QdVerdict { QuasidenseEvidence, NotQuasidense, Indeterminate };
std::string to_string(QdVerdict v);

struct Certificate {
  QdVerdict verdict = QdVerdict::Indeterminate;
  std::optional<PairedPoint> probe_point;  // echo of the probe c
  std::optional<DualPoint> probe_dual;     // echo of the dual-level probe c*
  double inf_estimate = 0.0;          // best r value found, clamped to >= 0
  std::optional<double> lower_bound;  // certified: the true inf is >= this
  std::string provenance;             // where the bound / estimate came from
  std::optional<PairedPoint> witness;    // graph point realizing the estimate
  std::optional<DualPoint> dual_witness; // same, for dual-level rules
  std::vector<std::string> trace;
};

// Probe at c in E x E* (primal-level operators: clouds, linear maps, the
// skew rule, pullbacks). Exact for clouds (enumeration) and linear maps
// (least-squares resolvent); convex descent otherwise.
Certificate probe(const OperatorGraph& S, const PairedPoint& c, double tol = 1e-6,
                  const Budget& budget = {});

// Probe at c* in E* x E** for the dual-level rules (tail, telescoping).
Certificate probe(const OperatorGraph& S, const DualPoint& cstar, double tol = 1e-6,
                  const Budget& budget = {});

// Geometric tolerance ladder eps_n = eps / 2^n used by the approximation
// iteration: positive, strictly decreasing, eps_1 <= 1, sum_{n>=1} = eps.
class EpsSchedule {
 public:
  explicit EpsSchedule(double eps);  // requires 0 < eps <= 2
  double total() const { return eps_; }
  double at(int n) const;  // eps / 2^n for n >= 0
  double partial_sum(int upto) const;  // sum of at(1..upto)

 private:
  double eps_;
};

enum class IterStatus {
  Converged,           // stationary with (f - q)(c_n) within tolerance
  AbortedHypothesis,   // no candidate scored below eps_{n+1}^2
  AbortedStationary,   // stationary but the gap stayed above tolerance
  Exhausted            // schedule ran below the floor without settling
};
std::string to_string(IterStatus s);

struct IterateStep {
  std::vector<double> center;  // c_{n+1} after the move
  double eps;                  // eps_n governing the step
  double score;                // (f - q)(c_{n+1}) + r(c_{n+1} - c_n)
  double step_norm;            // euclidean |c_{n+1} - c_n|
};

struct IterateResult {
  IterStatus status = IterStatus::Exhausted;
  std::string note;
  std::vector<IterateStep> steps;
  std::vector<double> final_center;
  double final_gap = 0.0;         // (f - q) at the final center
  double final_r_to_probe = 0.0;  // r(final - c_0)
  double big_m = 0.0;             // radius of the unit sublevel scan at c_0
  double bound = 0.0;             // (17 + 8 big_m) * eps
  bool within_bound = false;
};

// Approximation iteration for f >= q on a grid over E x E*: starting from the
// probe, repeatedly move the center to the best candidate d minimizing
// (f - q)(d) + r(d - c_n), demanding score <= eps_{n+1}^2 at stage n.
// Candidates are the finite grid nodes plus the current center itself.
IterateResult primal_iterate(const GridFunction& f, const std::vector<double>& probe,
                             double eps, double tol = 1e-9);

struct NiReport {
  bool pass = false;   // best value found is <= tol
  double value = 0.0;  // lowest q~(L a - c*) over inspected graph points
  std::string method;
  std::optional<PairedPoint> witness;
};

// Negative-infimum condition at c*: inf over graph points a of q~(L a - c*)
// must be <= 0. Exact for clouds; closed-form for linear maps and the skew
// rule; convex stationary solve for pullbacks.
NiReport ni_check(const OperatorGraph& S, const DualPoint& cstar, double tol = 1e-9,
                  const Budget& budget = {});

struct DualConditionReport {
  bool holds = false;
  double worst = 0.0;  // min of f* - q~ over the dual grid
  std::vector<double> worst_node;
  double tol = 0.0;
};

// Checks f* >= q~ on a dual grid (the conjugate-side quasidensity criterion).
// Default dual grid and tolerance are derived from f's grid geometry.
DualConditionReport dual_condition_check(const GridFunction& f,
                                         std::optional<double> tol = std::nullopt,
                                         std::optional<Grid> dual = std::nullopt);

}  // namespace qdlab
