#include "nlsplit/mfe/mode_seq.hpp"

#include <cmath>
#include <fmt/format.h>

namespace nlsplit::mfe {

double norm_sigma_sq(const ModeSeq& x, double sigma) {
  double total = 0.0;
  int current_j = 0;
  double row = 0.0;
  bool have_row = false;
  auto flush = [&] {
    if (have_row) total += std::pow(bracket_sq(current_j), sigma) * row * row;
  };
  for (const auto& [key, v] : x.entries()) {
    if (!have_row || key.first != current_j) {
      flush();
      current_j = key.first;
      row = 0.0;
      have_row = true;
    }
    row += std::abs(v);
  }
  flush();
  return total;
}

double norm_sigma(const ModeSeq& x, double sigma) { return std::sqrt(norm_sigma_sq(x, sigma)); }

ModeSeq rescale_Lambda(const ModeSeq& x) {
  ModeSeq out = x;
  for (auto& [key, v] : out.entries()) {
    const double j = key.first;
    v *= bracket(static_cast<double>(key.second) - j * j);
  }
  return out;
}

ModeSeq rescale_Kop(const ModeSeq& x) {
  ModeSeq out = x;
  for (auto& [key, v] : out.entries()) v *= bracket(static_cast<double>(key.second));
  return out;
}

ModeSeq phi_B_series(const ModeSeq& x, double alpha, const SeriesOptions& opt) {
  if (alpha == 0.0 || x.empty()) return x;
  const ModeSeq w = conv(x, bar(x));
  ModeSeq sum = x;
  ModeSeq term = x;
  for (int m = 1; m <= opt.max_terms; ++m) {
    term = conv(term, w);
    term *= Complex(0.0, -alpha / m);
    sum += term;
    const double t = norm_sigma(term, 1.0);
    if (t < opt.relative_tolerance * norm_sigma(sum, 1.0)) return sum;
  }
  throw NumericalError(
      fmt::format("phi_B_series: no convergence after {} terms (alpha = {})", opt.max_terms, alpha));
}

double almost_invariant(const ModeSeq& x, Precision p) {
  Accumulator acc(p);
  for (const auto& [key, v] : x.entries()) acc += (static_cast<double>(key.second) + 1.0) * std::norm(v);
  return acc.value();
}

std::pair<double, double> conserved_E_check(const ModeSeq& x, double alpha, FlowKind flow) {
  const ModeSeq y = flow == FlowKind::A ? phi_A(x, alpha) : phi_B_series(x, alpha);
  return {almost_invariant(x, Precision::compensated), almost_invariant(y, Precision::compensated)};
}

ModeSeq evaluate(const PolySeq& z, double tau) {
  ModeSeq out(z.cutoff());
  for (const auto& [key, poly] : z.entries()) out.set(key.first, key.second, poly(tau));
  return out;
}

ModeVector collapse(const ModeSeq& x, long double t) {
  ModeVector out(x.cutoff());
  for (const auto& [key, v] : x.entries()) out[key.first] += v * phase_minus(key.second, t);
  return out;
}

}  // namespace nlsplit::mfe
