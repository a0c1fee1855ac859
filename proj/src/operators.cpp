#include "qdlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdlab/gallery.hpp"
#include "qdlab/grid.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {

namespace {

Eigen::VectorXd to_vec(const FinTailSeq& s, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = s.entry(static_cast<std::size_t>(i));
  return v;
}

FinTailSeq to_seq(const Eigen::VectorXd& v) {
  return FinTailSeq::from_dense(std::vector<double>(v.data(), v.data() + v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

int space_dim(const PairedSpace& sp, const char* who) {
  if (!sp.is_finite()) throw std::invalid_argument(std::string(who) + ": finite space required");
  return *sp.dim;
}

}  // namespace

OperatorGraph OperatorGraph::cloud(std::vector<PairedPoint> pts) {
  if (pts.empty()) throw std::invalid_argument("OperatorGraph::cloud: empty point list");
  PairedSpace sp = pts.front().space;
  for (const auto& p : pts)
    if (!p.space.compatible(sp))
      throw std::invalid_argument("OperatorGraph::cloud: mixed spaces");
  return OperatorGraph(Cloud{std::move(pts)}, sp);
}

OperatorGraph OperatorGraph::linear(Eigen::MatrixXd M, NormKind k) {
  if (M.rows() != M.cols()) throw std::invalid_argument("OperatorGraph::linear: square matrix required");
  int n = static_cast<int>(M.rows());
  return OperatorGraph(Linear{std::move(M)}, PairedSpace::finite(n, k));
}

OperatorGraph OperatorGraph::seq_rule(SeqRuleKind kind) {
  return OperatorGraph(SeqRule{kind}, PairedSpace::c0());
}

OperatorGraph OperatorGraph::pullback(OperatorGraph inner) {
  if (inner.is_pullback()) throw std::invalid_argument("pullback: cannot nest pullbacks");
  if (inner.is_seq_rule() && std::get<SeqRule>(inner.repr()).kind == SeqRuleKind::SkewQ)
    throw std::invalid_argument("pullback: the skew rule is already a primal operator");
  PairedSpace sp = inner.space();
  return OperatorGraph(Pullback{std::make_shared<OperatorGraph>(std::move(inner))}, sp);
}

OperatorGraph OperatorGraph::builtin(const std::string& name) {
  if (name == "tail") return pullback(seq_rule(SeqRuleKind::Tail));
  if (name == "skewq") return seq_rule(SeqRuleKind::SkewQ);
  if (name == "bstele") return pullback(seq_rule(SeqRuleKind::BsTele));
  throw std::invalid_argument("unknown builtin operator '" + name + "'");
}

MonotoneReport monotone_check(const OperatorGraph& S, double tol) {
  MonotoneReport rep;
  if (S.is_cloud()) {
    const auto& pts = std::get<OperatorGraph::Cloud>(S.repr()).points;
    rep.monotone = true;
    rep.worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double q = q_form(pts[i] - pts[j]);
        if (q < rep.worst) {
          rep.worst = q;
          rep.witness = {pts[i], pts[j]};
        }
      }
    }
    if (rep.worst < -tol) rep.monotone = false;
    // maximality is only decided in the linear full-domain case; a finite
    // cloud gets no verdict
    return rep;
  }
  if (S.is_linear()) {
    const auto& M = std::get<OperatorGraph::Linear>(S.repr()).M;
    Eigen::MatrixXd P = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    double lmin = es.eigenvalues().minCoeff();
    rep.worst = std::min(0.0, lmin);
    rep.monotone = lmin >= -tol;
    // monotone + full domain + linear => maximal
    rep.maximal = rep.monotone;
    if (!rep.monotone) {
      Eigen::VectorXd v = es.eigenvectors().col(0);
      Eigen::VectorXd zero = Eigen::VectorXd::Zero(M.rows());
      rep.witness = {PairedPoint::finite(to_std(v), to_std(Eigen::VectorXd(M * v))),
                     PairedPoint::finite(to_std(zero), to_std(zero))};
    }
    return rep;
  }
  if (S.is_seq_rule()) {
    SeqRuleKind kind = std::get<OperatorGraph::SeqRule>(S.repr()).kind;
    // structural: skew pairs have q = <x - y, S(x - y)> = 0, the tail and
    // telescoping quadratic forms are nonnegative squares
    Rng rng(99);
    rep.monotone = true;
    rep.worst = 0.0;
    for (int k = 0; k < 64; ++k) {
      double q;
      if (kind == SeqRuleKind::SkewQ) {
        FinTailSeq d = gallery::random_zero_sum(rng, 16);
        q = seq_pairing(d, gallery::skew_apply(d));
      } else {
        FinTailSeq d = FinTailSeq::from_dense(rng.vector(16, -1.0, 1.0));
        FinTailSeq img =
            (kind == SeqRuleKind::Tail) ? gallery::tail_apply(d) : gallery::bs_apply(d);
        q = seq_pairing(d, img);
      }
      rep.worst = std::min(rep.worst, q);
    }
    rep.monotone = rep.worst >= -tol;
    // sampling says nothing about maximality; leave it open
    return rep;
  }
  const auto& inner = *std::get<OperatorGraph::Pullback>(S.repr()).inner;
  rep = monotone_check(inner, tol);  // q is preserved through the pullback
  rep.maximal.reset();
  return rep;
}

namespace {

// sup of <s, v> - s' P s over R^n for symmetric PSD P (the quadratic part of
// a linear graph sup). Returns the stationary value, +inf along a feasible
// escape ray, or flags the indefinite case as unbounded too.
FitzValue quadratic_sup(const Eigen::MatrixXd& P, const Eigen::VectorXd& v) {
  FitzValue out;
  int n = static_cast<int>(v.size());
  double scale = 1.0 + v.lpNorm<Eigen::Infinity>() + P.lpNorm<Eigen::Infinity>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    out.value = kPlusInf;
    out.unbounded = true;
    out.exact = true;
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(P);
  Eigen::VectorXd sbar = cod.solve(0.5 * v);
  Eigen::VectorXd resid = P * sbar - 0.5 * v;
  if (resid.norm() > 1e-9 * scale) {
    // v has a component in the kernel of P: the sup escapes along it
    out.value = kPlusInf;
    out.unbounded = true;
    out.exact = true;
    return out;
  }
  out.value = 0.5 * v.dot(sbar);
  out.exact = true;
  out.attained = std::vector<double>(sbar.data(), sbar.data() + n);
  return out;
}

// sup over the truncated graph of a dual-level rule T of
// <x*, c> - <T x*, x*>, with A the dense matrix of T on the truncation.
FitzValue quadratic_graph_sup(const Eigen::MatrixXd& A, const Eigen::VectorXd& c) {
  Eigen::MatrixXd H = 0.5 * (A + A.transpose());
  return quadratic_sup(H, c);
}

FitzValue cloud_sup(const std::vector<PairedPoint>& pts, const PairedPoint& b) {
  FitzValue out;
  out.value = -kPlusInf;
  DualPoint Lb = apply_L(b);
  for (const auto& s : pts) {
    double v = pairing(s, Lb) - q_form(s);
    if (v > out.value) {
      out.value = v;
      std::vector<double> at;
      for (std::size_t i = 0; i < s.x.prefix_size(); ++i) at.push_back(s.x.entry(i));
      out.attained = std::move(at);
    }
  }
  out.exact = true;
  return out;
}

FitzValue cloud_sup_dual(const std::vector<PairedPoint>& pts, const DualPoint& cstar) {
  FitzValue out;
  out.value = -kPlusInf;
  for (const auto& s : pts) {
    double v = pairing(s, cstar) - q_form(s);
    if (v > out.value) {
      out.value = v;
      std::vector<double> at;
      for (std::size_t i = 0; i < s.x.prefix_size(); ++i) at.push_back(s.x.entry(i));
      out.attained = std::move(at);
    }
  }
  out.exact = true;
  return out;
}

FitzValue skew_theta(const DualPoint& cstar, const Budget& budget) {
  // objective over the graph is linear in s on the zero-sum subspace:
  // l(s) = <s, y*> + <S s, y**>; sup is 0 if l vanishes on the truncation,
  // +inf as soon as a basis direction gives l != 0
  FitzValue out;
  int n = budget.truncation;
  double best = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    FinTailSeq d = FinTailSeq::unit(j) - FinTailSeq::unit(j + 1);
    double l = seq_pairing(d, cstar.ystar) + seq_pairing(gallery::skew_apply(d), cstar.ystarstar);
    best = std::max(best, std::abs(l));
  }
  if (best > 1e-12) {
    out.value = kPlusInf;
    out.unbounded = true;
    out.exact = true;  // a feasible ray certifies the divergence
    return out;
  }
  out.value = 0.0;
  out.exact = false;  // vanishing on the truncation does not certify globally
  return out;
}

FitzValue pullback_theta(const OperatorGraph& inner, const DualPoint& cstar,
                         const Budget& budget) {
  if (inner.is_linear()) {
    const auto& T = std::get<OperatorGraph::Linear>(inner.repr()).M;
    int n = static_cast<int>(T.rows());
    Eigen::VectorXd c = T.transpose() * to_vec(cstar.ystar, n) + to_vec(cstar.ystarstar, n);
    FitzValue out = quadratic_graph_sup(T, c);
    return out;
  }
  SeqRuleKind kind = std::get<OperatorGraph::SeqRule>(inner.repr()).kind;
  if (kind == SeqRuleKind::BsTele) {
    gallery::BsTheta bt =
        gallery::bs_theta(cstar.ystar, cstar.ystarstar, budget.truncation);
    FitzValue out;
    out.value = bt.value;
    out.exact = bt.exact;
    out.unbounded = bt.unbounded;
    if (bt.member) {
      std::vector<double> at;
      for (std::size_t i = 0; i < bt.attained.prefix_size(); ++i) at.push_back(bt.attained.entry(i));
      out.attained = std::move(at);
    }
    return out;
  }
  if (kind != SeqRuleKind::Tail)
    throw std::invalid_argument("fitz_theta: unsupported inner rule");
  if (!cstar.ystar.finitely_supported())
    throw std::invalid_argument("fitz_theta: y* must be finitely supported");
  int n = std::max<int>(budget.truncation,
                        static_cast<int>(std::max(cstar.ystar.prefix_size(),
                                                  cstar.ystarstar.prefix_size())) + 2);
  Eigen::MatrixXd A = seq_rule_matrix(SeqRuleKind::Tail, n);
  Eigen::VectorXd c = A.transpose() * to_vec(cstar.ystar, n) + to_vec(cstar.ystarstar, n);
  FitzValue out = quadratic_graph_sup(A, c);
  // finite stationary values are exact only within the truncation
  if (!out.unbounded) out.exact = false;
  return out;
}

}  // namespace

FitzValue fitz_theta(const OperatorGraph& S, const DualPoint& cstar, const Budget& budget) {
  if (S.is_cloud()) return cloud_sup_dual(std::get<OperatorGraph::Cloud>(S.repr()).points, cstar);
  if (S.is_linear()) {
    // reflexive identification: theta(y*, y**) = phi(y**, y*)
    const auto& M = std::get<OperatorGraph::Linear>(S.repr()).M;
    int n = space_dim(S.space(), "fitz_theta");
    Eigen::VectorXd v = to_vec(cstar.ystar, n) + M.transpose() * to_vec(cstar.ystarstar, n);
    Eigen::MatrixXd P = 0.5 * (M + M.transpose());
    return quadratic_sup(P, v);
  }
  if (S.is_seq_rule()) {
    SeqRuleKind kind = std::get<OperatorGraph::SeqRule>(S.repr()).kind;
    if (kind == SeqRuleKind::SkewQ) return skew_theta(cstar, budget);
    throw std::invalid_argument(
        "fitz_theta: wrap dual-level rules in a pullback to probe their theta");
  }
  return pullback_theta(*std::get<OperatorGraph::Pullback>(S.repr()).inner, cstar, budget);
}

FitzValue fitz_phi(const OperatorGraph& S, const PairedPoint& b, const Budget& budget) {
  if (S.is_cloud()) return cloud_sup(std::get<OperatorGraph::Cloud>(S.repr()).points, b);
  // phi = theta composed with L for every representation here
  return fitz_theta(S, apply_L(b), budget);
}

Eigen::MatrixXd seq_rule_matrix(SeqRuleKind kind, int n) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    FinTailSeq col;
    switch (kind) {
      case SeqRuleKind::Tail: col = gallery::tail_apply(FinTailSeq::unit(i)); break;
      case SeqRuleKind::BsTele: col = gallery::bs_apply(FinTailSeq::unit(i)); break;
      case SeqRuleKind::SkewQ:
        col = gallery::skew_apply(FinTailSeq::unit(i) - FinTailSeq::unit(i + 1));
        break;
    }
    for (int r = 0; r < n; ++r) A(r, i) = col.entry(static_cast<std::size_t>(r));
  }
  return A;
}

FinTailSeq dual_apply(const OperatorGraph& T, const FinTailSeq& ystar) {
  if (T.is_linear()) {
    const auto& M = std::get<OperatorGraph::Linear>(T.repr()).M;
    int n = static_cast<int>(M.rows());
    return to_seq(Eigen::VectorXd(M * to_vec(ystar, n)));
  }
  if (T.is_seq_rule()) {
    switch (std::get<OperatorGraph::SeqRule>(T.repr()).kind) {
      case SeqRuleKind::Tail: return gallery::tail_apply(ystar);
      case SeqRuleKind::BsTele: return gallery::bs_apply(ystar);
      case SeqRuleKind::SkewQ:
        throw std::invalid_argument("dual_apply: the skew rule acts at the primal level");
    }
  }
  throw std::invalid_argument("dual_apply: needs a single-valued dual-level representation");
}

bool pullback_member(const OperatorGraph& S, const PairedPoint& b, double tol) {
  if (!S.is_pullback()) throw std::invalid_argument("pullback_member: not a pullback operator");
  const auto& inner = *std::get<OperatorGraph::Pullback>(S.repr()).inner;
  FinTailSeq img = dual_apply(inner, b.xstar);
  return img.approx_equal(b.x, tol);
}

OperatorGraph op_sum(const OperatorGraph& S, const OperatorGraph& T) {
  if (S.is_linear() && T.is_linear()) {
    const auto& A = std::get<OperatorGraph::Linear>(S.repr()).M;
    const auto& B = std::get<OperatorGraph::Linear>(T.repr()).M;
    if (A.rows() != B.rows()) throw std::invalid_argument("op_sum: dimension mismatch");
    return OperatorGraph::linear(A + B, S.space().primal);
  }
  if (S.is_cloud() && T.is_cloud()) {
    const auto& ps = std::get<OperatorGraph::Cloud>(S.repr()).points;
    const auto& pt = std::get<OperatorGraph::Cloud>(T.repr()).points;
    std::vector<PairedPoint> out;
    for (const auto& a : ps)
      for (const auto& b : pt)
        if (a.x.approx_equal(b.x, 0.0))
          out.push_back(PairedPoint(a.x, a.xstar + b.xstar, a.space));
    if (out.empty()) throw std::invalid_argument("op_sum: clouds share no first coordinates");
    return OperatorGraph::cloud(std::move(out));
  }
  throw std::invalid_argument("op_sum: unsupported representation mix");
}

OperatorGraph op_inverse(const OperatorGraph& S) {
  if (S.is_linear()) {
    const auto& M = std::get<OperatorGraph::Linear>(S.repr()).M;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw std::invalid_argument("op_inverse: singular linear operator");
    return OperatorGraph::linear(lu.inverse(), dual_norm(S.space().primal));
  }
  if (S.is_cloud()) {
    const auto& ps = std::get<OperatorGraph::Cloud>(S.repr()).points;
    std::vector<PairedPoint> out;
    PairedSpace sp{S.space().dim, S.space().dual()};
    for (const auto& a : ps) out.push_back(PairedPoint(a.xstar, a.x, sp));
    return OperatorGraph::cloud(std::move(out));
  }
  throw std::invalid_argument("op_inverse: unsupported representation");
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::Member: return "member";
    case Membership::NotMember: return "not-member";
    case Membership::Indeterminate: return "indeterminate";
  }
  return "?";
}

ExtMembership fitz_ext_membership(const OperatorGraph& S, const DualPoint& cstar, double tol,
                                  const Budget& budget) {
  ExtMembership out;
  FitzValue th = fitz_theta(S, cstar, budget);
  out.theta = th.value;
  out.qdual = q_dual(cstar);
  out.theta_exact = th.exact;
  if (th.value > out.qdual + tol) {
    // even a lower bound above q~ rules membership out
    out.verdict = Membership::NotMember;
  } else if (th.exact && std::abs(th.value - out.qdual) <= tol) {
    out.verdict = Membership::Member;
  } else if (th.exact && th.value < out.qdual - tol) {
    out.verdict = Membership::NotMember;
  } else {
    out.verdict = Membership::Indeterminate;
  }
  return out;
}

MintyWitness minty_min(const Eigen::MatrixXd& M, const PairedPoint& c) {
  int n = space_dim(c.space, "minty_min");
  if (M.rows() != n) throw std::invalid_argument("minty_min: dimension mismatch");
  if (c.space.primal != NormKind::L2)
    throw std::invalid_argument("minty_min: euclidean pairing required");
  Eigen::VectorXd rhs = to_vec(c.x, n) + to_vec(c.xstar, n);
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n) + M;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(R);
  Eigen::VectorXd x = lu.solve(rhs);
  Eigen::VectorXd resid = R * x - rhs;
  double scale = 1.0 + rhs.norm();
  if (resid.norm() > 1e-6 * scale)
    throw std::domain_error("minty_min: resolvent system is singular (operator not monotone?)");
  MintyWitness w{x, PairedPoint::finite(to_std(x), to_std(Eigen::VectorXd(M * x))),
                 0.5 * resid.squaredNorm()};
  return w;
}

}  // namespace qdlab
