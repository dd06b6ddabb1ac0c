#pragma once

#include <span>
#include <vector>

#include "nlsplit/common.hpp"

namespace nlsplit::mfe {

// Dense polynomial in the slow time, coefficients in ascending powers.
// The zero polynomial has no coefficients and degree -1.
class TauPolynomial {
 public:
  TauPolynomial() = default;
  explicit TauPolynomial(std::vector<Complex> coeffs);
  static TauPolynomial constant(Complex c);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  std::span<const Complex> coefficients() const { return c_; }
  Complex coefficient(int d) const;

  Complex operator()(double tau) const;

  TauPolynomial derivative(int order = 1) const;
  /// Antiderivative with value `c0` at tau = 0.
  TauPolynomial antiderivative(Complex c0) const;
  TauPolynomial conj() const;

  TauPolynomial& operator+=(const TauPolynomial& o);
  TauPolynomial& operator-=(const TauPolynomial& o);
  TauPolynomial& operator*=(Complex s);

  friend TauPolynomial operator+(TauPolynomial a, const TauPolynomial& b) { return a += b; }
  friend TauPolynomial operator-(TauPolynomial a, const TauPolynomial& b) { return a -= b; }
  friend TauPolynomial operator*(Complex s, TauPolynomial a) { return a *= s; }
  friend TauPolynomial operator*(const TauPolynomial& a, const TauPolynomial& b);
  friend bool operator==(const TauPolynomial&, const TauPolynomial&) = default;

 private:
  void trim();
  std::vector<Complex> c_;
};

inline TauPolynomial conj_value(const TauPolynomial& p) { return p.conj(); }
inline Complex conj_value(Complex c) { return std::conj(c); }
inline bool is_zero_value(const TauPolynomial& p) { return p.is_zero(); }
inline bool is_zero_value(Complex c) { return c == Complex(0.0, 0.0); }

}  // namespace nlsplit::mfe
