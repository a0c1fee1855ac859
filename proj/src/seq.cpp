#include "qdlab/seq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qdlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

NormKind dual_norm(NormKind k) {
  switch (k) {
    case NormKind::L1: return NormKind::LInf;
    case NormKind::LInf: return NormKind::L1;
    case NormKind::L2: return NormKind::L2;
  }
  throw std::logic_error("bad NormKind");
}

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::LInf: return "linf";
  }
  throw std::logic_error("bad NormKind");
}

FinTailSeq::FinTailSeq(std::vector<double> prefix, TailKind tail, double tail_value)
    : prefix_(std::move(prefix)), tail_(tail), tail_value_(tail_value) {
  if (tail_ == TailKind::Zero) tail_value_ = 0.0;
  if (tail_value_ == 0.0) tail_ = TailKind::Zero;
}

FinTailSeq FinTailSeq::unit(std::size_t i) {
  std::vector<double> p(i + 1, 0.0);
  p[i] = 1.0;
  return FinTailSeq(std::move(p));
}

FinTailSeq FinTailSeq::constant(double v) { return FinTailSeq({}, TailKind::Const, v); }

FinTailSeq FinTailSeq::alternating(double v) { return FinTailSeq({}, TailKind::Alt, v); }

FinTailSeq FinTailSeq::from_dense(std::vector<double> v) { return FinTailSeq(std::move(v)); }

double FinTailSeq::entry(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  switch (tail_) {
    case TailKind::Zero: return 0.0;
    case TailKind::Const: return tail_value_;
    case TailKind::Alt: return ((i - prefix_.size()) % 2 == 0) ? tail_value_ : -tail_value_;
  }
  throw std::logic_error("bad TailKind");
}

bool FinTailSeq::finitely_supported() const { return tail_ == TailKind::Zero; }

std::vector<double> FinTailSeq::dense(std::size_t n) const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = entry(i);
  return out;
}

namespace {

// Combines tails of two sequences aligned at a common prefix length.
// alpha*u + beta*v restricted to indices >= p.
FinTailSeq::TailKind combine_tails(FinTailSeq::TailKind a, double av, FinTailSeq::TailKind b,
                                   double bv, double* out_value) {
  using TK = FinTailSeq::TailKind;
  if (a == TK::Zero) {
    *out_value = bv;
    return b;
  }
  if (b == TK::Zero) {
    *out_value = av;
    return a;
  }
  if (a == b) {
    *out_value = av + bv;
    return (*out_value == 0.0) ? TK::Zero : a;
  }
  throw std::invalid_argument("FinTailSeq: Const and Alt tails do not combine");
}

}  // namespace

FinTailSeq FinTailSeq::operator+(const FinTailSeq& o) const {
  std::size_t p = std::max(prefix_.size(), o.prefix_.size());
  std::vector<double> pre(p);
  for (std::size_t i = 0; i < p; ++i) pre[i] = entry(i) + o.entry(i);
  // Align tail phases: re-anchor each Alt tail at index p.
  double av = tail_value_, bv = o.tail_value_;
  if (tail_ == TailKind::Alt && (p - prefix_.size()) % 2 == 1) av = -av;
  if (o.tail_ == TailKind::Alt && (p - o.prefix_.size()) % 2 == 1) bv = -bv;
  double tv = 0.0;
  TailKind tk = combine_tails(tail_, av, o.tail_, bv, &tv);
  return FinTailSeq(std::move(pre), tk, tv);
}

FinTailSeq FinTailSeq::operator-(const FinTailSeq& o) const { return *this + o.scaled(-1.0); }

FinTailSeq FinTailSeq::operator-() const { return scaled(-1.0); }

FinTailSeq FinTailSeq::scaled(double s) const {
  std::vector<double> pre(prefix_);
  for (auto& x : pre) x *= s;
  return FinTailSeq(std::move(pre), tail_, tail_value_ * s);
}

FinTailSeq FinTailSeq::canonical() const {
  FinTailSeq r(*this);
  while (!r.prefix_.empty()) {
    double last = r.prefix_.back();
    if (r.tail_ == TailKind::Zero) {
      if (last != 0.0) break;
      r.prefix_.pop_back();
    } else if (r.tail_ == TailKind::Const) {
      if (last != r.tail_value_) break;
      r.prefix_.pop_back();
    } else {
      // Absorbing `last` requires the tail to read (last, -last, ...) from
      // one slot earlier, i.e. current first tail entry == -last.
      if (r.tail_value_ != -last || last == 0.0) break;
      r.prefix_.pop_back();
      r.tail_value_ = last;
    }
  }
  if (r.prefix_.empty() && r.tail_value_ == 0.0) r.tail_ = TailKind::Zero;
  return r;
}

bool FinTailSeq::approx_equal(const FinTailSeq& o, double tol) const {
  FinTailSeq d = *this - o;  // throws if tails incompatible
  std::size_t p = d.prefix_.size();
  for (std::size_t i = 0; i < p; ++i)
    if (std::abs(d.prefix_[i]) > tol) return false;
  return std::abs(d.tail_value_) <= tol;
}

std::string FinTailSeq::text() const {
  std::string s = "prefix=[";
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(prefix_[i]);
  }
  s += "];tail=";
  switch (tail_) {
    case TailKind::Zero: s += "zero"; break;
    case TailKind::Const: s += "const:" + fmt_double(tail_value_); break;
    case TailKind::Alt: s += "alt:" + fmt_double(tail_value_); break;
  }
  return s;
}

FinTailSeq FinTailSeq::parse(const std::string& text) {
  auto fail = [&]() -> FinTailSeq {
    throw std::invalid_argument("FinTailSeq: cannot parse '" + text + "'");
  };
  const std::string pk = "prefix=[";
  if (text.rfind(pk, 0) != 0) return fail();
  std::size_t close = text.find(']', pk.size());
  if (close == std::string::npos) return fail();
  std::vector<double> prefix;
  std::string body = text.substr(pk.size(), close - pk.size());
  if (!body.empty()) {
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) return fail();
      prefix.push_back(v);
    }
  }
  const std::string tk = "];tail=";
  if (text.compare(close, tk.size(), tk) != 0) return fail();
  std::string tail = text.substr(close + tk.size());
  if (tail == "zero") return FinTailSeq(std::move(prefix));
  auto colon = tail.find(':');
  if (colon == std::string::npos) return fail();
  std::string kind = tail.substr(0, colon);
  double v = std::stod(tail.substr(colon + 1));
  if (kind == "const") return FinTailSeq(std::move(prefix), TailKind::Const, v);
  if (kind == "alt") return FinTailSeq(std::move(prefix), TailKind::Alt, v);
  return fail();
}

double seq_pairing(const FinTailSeq& u, const FinTailSeq& v) {
  if (!u.finitely_supported() && !v.finitely_supported())
    throw std::invalid_argument("seq_pairing: non-summable tail combination");
  std::size_t n = std::max(u.prefix_size(), v.prefix_size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += u.entry(i) * v.entry(i);
  return s;
}

double seq_norm(const FinTailSeq& v, NormKind kind) {
  switch (kind) {
    case NormKind::LInf: {
      double m = std::abs(v.tail_value());
      for (double x : v.prefix()) m = std::max(m, std::abs(x));
      return m;
    }
    case NormKind::L1: {
      if (!v.finitely_supported()) return kInf;
      double s = 0.0;
      for (double x : v.prefix()) s += std::abs(x);
      return s;
    }
    case NormKind::L2: {
      if (!v.finitely_supported()) return kInf;
      double s = 0.0;
      for (double x : v.prefix()) s += x * x;
      return std::sqrt(s);
    }
  }
  throw std::logic_error("bad NormKind");
}

}  // namespace qdlab
