#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdlab/spaces.hpp"

namespace qdlab {

// Search budget for sups over unbounded graphs and truncated sequence work.
struct Budget {
  double lattice_radius = 8.0;
  int lattice_nodes = 17;   // per axis
  int truncation = 64;      // sequence-space cutoff N
  int iterations = 200;     // descent/ascent steps
  int restarts = 8;
  std::uint64_t seed = 2026;
};

enum class SeqRuleKind { Tail, SkewQ, BsTele };

// A set-valued operator given by one of four representations:
//  - Cloud: a finite list of graph points (x, x*)
//  - Linear: x* = Mx on all of R^n (euclidean pairing)
//  - SeqRule: one of the built-in sequence-space rules; Tail and BsTele act
//    at the dual level (l1 -> linf), SkewQ at the primal level on the
//    zero-sum subspace of c0
//  - Pullback: the primal operator G^{-1} L^{-1} G(T) of a dual-level T
class OperatorGraph {
 public:
  struct Cloud {
    std::vector<PairedPoint> points;
  };
  struct Linear {
    Eigen::MatrixXd M;
  };
  struct SeqRule {
    SeqRuleKind kind;
  };
  struct Pullback {
    std::shared_ptr<const OperatorGraph> inner;
  };

  using Repr = std::variant<Cloud, Linear, SeqRule, Pullback>;

  OperatorGraph(Repr r, PairedSpace sp) : repr_(std::move(r)), space_(sp) {}

  static OperatorGraph cloud(std::vector<PairedPoint> pts);
  static OperatorGraph linear(Eigen::MatrixXd M, NormKind k = NormKind::L2);
  static OperatorGraph seq_rule(SeqRuleKind kind);
  static OperatorGraph pullback(OperatorGraph inner);
  // built-in names: "tail", "skewq", "bstele" (pullbacks of the dual rules
  // where the rule lives at the dual level)
  static OperatorGraph builtin(const std::string& name);

  const Repr& repr() const { return repr_; }
  const PairedSpace& space() const { return space_; }
  bool is_cloud() const { return std::holds_alternative<Cloud>(repr_); }
  bool is_linear() const { return std::holds_alternative<Linear>(repr_); }
  bool is_seq_rule() const { return std::holds_alternative<SeqRule>(repr_); }
  bool is_pullback() const { return std::holds_alternative<Pullback>(repr_); }

 private:
  Repr repr_;
  PairedSpace space_;
};

struct MonotoneReport {
  bool monotone = false;
  std::optional<bool> maximal;  // known only for some representations
  double worst = 0.0;           // most negative pairwise q value seen
  std::optional<std::pair<PairedPoint, PairedPoint>> witness;
};

// Pairwise q >= 0 over Cloud points; PSD symmetric part for Linear (with
// maximality from full domain).
MonotoneReport monotone_check(const OperatorGraph& S, double tol = 1e-12);

struct FitzValue {
  double value = 0.0;
  bool exact = false;      // sup certified (finite enumeration / stationary point)
  bool unbounded = false;  // +inf detected along a feasible direction
  std::optional<std::vector<double>> attained;  // maximizer when known (s for phi)
};

// phi_S(b) = sup over graph points (s, s*) of <s, x*> + <x, s*> - <s, s*>
FitzValue fitz_phi(const OperatorGraph& S, const PairedPoint& b, const Budget& budget = {});

// theta_S(c*) = sup over graph points of <s, y*> + <s*, y**> - <s, s*>
FitzValue fitz_theta(const OperatorGraph& S, const DualPoint& cstar, const Budget& budget = {});

// Membership of (x, x*) in the pullback graph: inner(x*) must equal the
// canonical image of x.
bool pullback_member(const OperatorGraph& S, const PairedPoint& b, double tol = 1e-9);

// Image of a dual-level rule or linear map applied to y* in E*.
FinTailSeq dual_apply(const OperatorGraph& T, const FinTailSeq& ystar);

// Dense matrix of a sequence rule on the first n coordinates. For SkewQ the
// columns are the images of the difference basis e^j - e^{j+1} of the
// zero-sum subspace (which are exactly e^j + e^{j+1}).
Eigen::MatrixXd seq_rule_matrix(SeqRuleKind kind, int n);

OperatorGraph op_sum(const OperatorGraph& S, const OperatorGraph& T);
OperatorGraph op_inverse(const OperatorGraph& S);

enum class Membership { Member, NotMember, Indeterminate };
std::string to_string(Membership m);

struct ExtMembership {
  Membership verdict = Membership::Indeterminate;
  double theta = 0.0;   // best lower bound for theta_S(c*)
  double qdual = 0.0;   // q~(c*)
  bool theta_exact = false;
};

// c* belongs to the dual coincidence set of theta_S iff theta_S(c*) = q~(c*).
// More budget can only grow the theta lower bound, so verdicts never flip
// from Member to NotMember as the budget tightens.
ExtMembership fitz_ext_membership(const OperatorGraph& S, const DualPoint& cstar,
                                  double tol = 1e-9, const Budget& budget = {});

struct MintyWitness {
  Eigen::VectorXd x;
  PairedPoint point;  // (x, Mx)
  double value;       // r((x, Mx) - c), zero up to solver residual
};

// Solves (I + M) x = y + y* for the probe c = (y, y*); the solution is the
// exact minimizer of r((x, Mx) - c) for monotone M under euclidean norms.
MintyWitness minty_min(const Eigen::MatrixXd& M, const PairedPoint& c);

}  // namespace qdlab
