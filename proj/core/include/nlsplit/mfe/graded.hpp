#pragma once

// Graded sequences v = (v_{j,p}^k): one PolySeq per grade p = 1..P.
// Products truncate at a maximal grade, so the graded operators below are
// finite sums.

#include <vector>

#include "nlsplit/mfe/mode_seq.hpp"
#include "nlsplit/splitting.hpp"

namespace nlsplit::mfe {

class GradedSeq {
 public:
  GradedSeq(int K, int max_grade);

  int cutoff() const { return K_; }
  int max_grade() const { return static_cast<int>(g_.size()); }
  const PolySeq& grade(int p) const { return g_.at(p - 1); }
  PolySeq& grade(int p) { return g_.at(p - 1); }

  /// Copy holding only grades <= p (and max_grade() == p).
  GradedSeq truncated(int p) const;

  GradedSeq& operator+=(const GradedSeq& o);

 private:
  int K_;
  std::vector<PolySeq> g_;
};

/// (x * y)_p = sum_{p1 + p2 = p} x_{p1} * y_{p2}, for p <= max_grade.
GradedSeq graded_conv(const GradedSeq& x, const GradedSeq& y, int max_grade);
GradedSeq graded_bar(const GradedSeq& x);
GradedSeq graded_phi_A(const GradedSeq& x, double alpha);

/// (Phi_B^alpha - 1)(v) up to grade max_grade: the m >= 1 part of the series
/// v * sum_m (-i alpha)^m / m! (v * bar v)^m.
GradedSeq graded_phi_B_minus_id(const GradedSeq& v, double alpha, int max_grade);

/// Phi_B^alpha(v) up to grade max_grade.
GradedSeq graded_phi_B(const GradedSeq& v, double alpha, int max_grade);

/// F(v) of the telescoping identity
///   Phi_A^{a1 h} o Phi_B^{b1 h} o ... o Phi_A^{as h} o Phi_B^{bs h} = Phi_A^h + F,
/// returned for grades 1..target_p. Grade p of the output reads only grades
/// <= p - 2 of v; inputs above target_p - 2 are ignored. Throws
/// ValidationError when v has fewer than target_p - 2 grades.
GradedSeq op_F(const GradedSeq& v, const SplittingScheme& scheme, double h, int target_p);

}  // namespace nlsplit::mfe
