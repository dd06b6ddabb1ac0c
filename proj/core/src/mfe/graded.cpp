#include "nlsplit/mfe/graded.hpp"

#include <fmt/format.h>

namespace nlsplit::mfe {

GradedSeq::GradedSeq(int K, int max_grade) : K_(K), g_(std::max(0, max_grade), PolySeq(K)) {}

GradedSeq GradedSeq::truncated(int p) const {
  GradedSeq out(K_, p);
  for (int q = 1; q <= std::min(p, max_grade()); ++q) out.grade(q) = grade(q);
  return out;
}

GradedSeq& GradedSeq::operator+=(const GradedSeq& o) {
  for (int q = 1; q <= std::min(max_grade(), o.max_grade()); ++q) grade(q) += o.grade(q);
  return *this;
}

GradedSeq graded_conv(const GradedSeq& x, const GradedSeq& y, int max_grade) {
  GradedSeq out(x.cutoff(), max_grade);
  for (int p1 = 1; p1 <= x.max_grade(); ++p1) {
    if (x.grade(p1).empty()) continue;
    for (int p2 = 1; p2 <= y.max_grade() && p1 + p2 <= max_grade; ++p2) {
      if (y.grade(p2).empty()) continue;
      out.grade(p1 + p2) += conv(x.grade(p1), y.grade(p2));
    }
  }
  return out;
}

GradedSeq graded_bar(const GradedSeq& x) {
  GradedSeq out(x.cutoff(), x.max_grade());
  for (int p = 1; p <= x.max_grade(); ++p) out.grade(p) = bar(x.grade(p));
  return out;
}

GradedSeq graded_phi_A(const GradedSeq& x, double alpha) {
  GradedSeq out(x.cutoff(), x.max_grade());
  for (int p = 1; p <= x.max_grade(); ++p) out.grade(p) = phi_A(x.grade(p), alpha);
  return out;
}

GradedSeq graded_phi_B_minus_id(const GradedSeq& v, double alpha, int max_grade) {
  GradedSeq out(v.cutoff(), max_grade);
  if (alpha == 0.0 || max_grade < 3) return out;
  // Every factor has grade >= 1, so W = v * bar(v) starts at grade 2 and the
  // m-th power of W at grade 2m; v * W^m then starts at grade 2m + 1.
  const GradedSeq w = graded_conv(v, graded_bar(v), max_grade - 1);
  GradedSeq power = w;  // (-i alpha)^m W^m / m!
  for (int p = 1; p <= power.max_grade(); ++p) power.grade(p) *= Complex(0.0, -alpha);
  GradedSeq series = power;
  for (int m = 2; 2 * m + 1 <= max_grade; ++m) {
    power = graded_conv(power, w, max_grade - 1);
    for (int p = 1; p <= power.max_grade(); ++p) power.grade(p) *= Complex(0.0, -alpha / m);
    series += power;
  }
  return graded_conv(v, series, max_grade);
}

GradedSeq graded_phi_B(const GradedSeq& v, double alpha, int max_grade) {
  GradedSeq out = graded_phi_B_minus_id(v, alpha, max_grade);
  for (int p = 1; p <= std::min(max_grade, v.max_grade()); ++p) out.grade(p) += v.grade(p);
  return out;
}

GradedSeq op_F(const GradedSeq& v, const SplittingScheme& scheme, double h, int target_p) {
  const int K = v.cutoff();
  GradedSeq out(K, target_p);
  if (target_p < 3) return out;
  const int inner = target_p - 2;
  if (v.max_grade() < inner)
    throw ValidationError(fmt::format("op_F: grade {} requested but only {} input grades available",
                                      target_p, v.max_grade()));

  const int s = scheme.stages();
  std::vector<double> a_prefix(s + 1, 0.0);
  for (int r = 1; r <= s; ++r) a_prefix[r] = a_prefix[r - 1] + scheme.a[r - 1];

  // J_s = v, J_{r-1} = Phi_A^{a_r h} Phi_B^{b_r h} J_r, all truncated at
  // grade target_p - 2, which is exactly what grades <= target_p of the
  // (Phi_B - 1) terms can see.
  GradedSeq J = v.truncated(inner);
  for (int r = s; r >= 1; --r) {
    const double beta = scheme.b[r - 1] * h;
    if (beta != 0.0) {
      GradedSeq delta = graded_phi_B_minus_id(J, beta, target_p);
      out += graded_phi_A(delta, a_prefix[r] * h);
      if (r > 1) J += delta.truncated(inner);
    }
    if (r > 1) J = graded_phi_A(J, scheme.a[r - 1] * h);
  }
  return out;
}

}  // namespace nlsplit::mfe
