#include "nlsplit/mfe/tau_polynomial.hpp"

#include <algorithm>

namespace nlsplit::mfe {

TauPolynomial::TauPolynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }

TauPolynomial TauPolynomial::constant(Complex c) { return TauPolynomial({c}); }

void TauPolynomial::trim() {
  while (!c_.empty() && c_.back() == Complex(0.0, 0.0)) c_.pop_back();
}

Complex TauPolynomial::coefficient(int d) const {
  return d >= 0 && d < static_cast<int>(c_.size()) ? c_[d] : Complex(0.0, 0.0);
}

Complex TauPolynomial::operator()(double tau) const {
  Complex acc(0.0, 0.0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * tau + *it;
  return acc;
}

TauPolynomial TauPolynomial::derivative(int order) const {
  std::vector<Complex> out;
  for (int d = order; d < static_cast<int>(c_.size()); ++d) {
    double f = 1.0;
    for (int q = 0; q < order; ++q) f *= d - q;
    out.push_back(f * c_[d]);
  }
  return TauPolynomial(std::move(out));
}

TauPolynomial TauPolynomial::antiderivative(Complex c0) const {
  std::vector<Complex> out(c_.size() + 1);
  out[0] = c0;
  for (std::size_t d = 0; d < c_.size(); ++d) out[d + 1] = c_[d] / static_cast<double>(d + 1);
  return TauPolynomial(std::move(out));
}

TauPolynomial TauPolynomial::conj() const {
  std::vector<Complex> out(c_.size());
  std::transform(c_.begin(), c_.end(), out.begin(), [](Complex z) { return std::conj(z); });
  return TauPolynomial(std::move(out));
}

TauPolynomial& TauPolynomial::operator+=(const TauPolynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t d = 0; d < o.c_.size(); ++d) c_[d] += o.c_[d];
  trim();
  return *this;
}

TauPolynomial& TauPolynomial::operator-=(const TauPolynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t d = 0; d < o.c_.size(); ++d) c_[d] -= o.c_[d];
  trim();
  return *this;
}

TauPolynomial& TauPolynomial::operator*=(Complex s) {
  for (auto& z : c_) z *= s;
  trim();
  return *this;
}

TauPolynomial operator*(const TauPolynomial& a, const TauPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return TauPolynomial(std::move(out));
}

}  // namespace nlsplit::mfe
