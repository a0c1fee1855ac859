#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qdlab {

enum class NormKind { L1, L2, LInf };

NormKind dual_norm(NormKind k);
std::string to_string(NormKind k);

// A real sequence with an explicit finite prefix followed by a structured
// tail: all zeros, a constant value, or an alternating +/- value (the first
// tail slot carries the stored sign). Closed under addition, subtraction and
// scaling as long as the result stays in the family; mixing a nonzero Const
// tail with a nonzero Alt tail is rejected.
class FinTailSeq {
 public:
  enum class TailKind { Zero, Const, Alt };

  FinTailSeq() = default;
  FinTailSeq(std::vector<double> prefix, TailKind tail = TailKind::Zero,
             double tail_value = 0.0);

  static FinTailSeq zero() { return FinTailSeq(); }
  // e^i, zero-based index
  static FinTailSeq unit(std::size_t i);
  static FinTailSeq constant(double v);     // (v, v, v, ...)
  static FinTailSeq alternating(double v);  // (v, -v, v, -v, ...)
  static FinTailSeq from_dense(std::vector<double> v);

  TailKind tail_kind() const { return tail_; }
  double tail_value() const { return tail_value_; }
  const std::vector<double>& prefix() const { return prefix_; }

  // entry at zero-based index, tail-aware
  double entry(std::size_t i) const;
  std::size_t prefix_size() const { return prefix_.size(); }
  bool finitely_supported() const;
  // first n entries, materialized
  std::vector<double> dense(std::size_t n) const;

  FinTailSeq operator+(const FinTailSeq& o) const;
  FinTailSeq operator-(const FinTailSeq& o) const;
  FinTailSeq operator-() const;
  FinTailSeq scaled(double s) const;

  // drops prefix entries already described by the tail
  FinTailSeq canonical() const;
  bool approx_equal(const FinTailSeq& o, double tol) const;

  // `prefix=[a1,...,ak];tail=zero|const:v|alt:v`
  std::string text() const;
  static FinTailSeq parse(const std::string& text);

 private:
  std::vector<double> prefix_;
  TailKind tail_ = TailKind::Zero;
  double tail_value_ = 0.0;
};

// Exact bilinear pairing sum_i u_i v_i. Requires at least one Zero tail
// (otherwise the series need not converge); throws std::invalid_argument.
double seq_pairing(const FinTailSeq& u, const FinTailSeq& v);

// Norm of the sequence; the L1/L2 norm of a non-Zero tail is +infinity.
double seq_norm(const FinTailSeq& v, NormKind kind);

}  // namespace qdlab
