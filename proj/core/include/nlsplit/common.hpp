#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nlsplit {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Thrown when inputs violate a documented precondition (inconsistent scheme,
// CFL restriction, malformed configuration). Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a computation produces non-finite values or a guarded quantity
// (small divisor, series convergence) leaves its admissible range. Maps to
// CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Squared Japanese bracket <j>^2 = j^2 + 1.
inline double bracket_sq(double j) { return j * j + 1.0; }

/// Japanese bracket <j> = sqrt(j^2 + 1).
double bracket(double j);

/// z e^{i arg}. The rotation is carried out in extended precision and
/// rounded once, so repeated rotation by a fixed angle does not drift in
/// modulus (a rounded double phase factor has |c| != 1 by up to an ulp).
Complex rotate(Complex z, long double arg);

// Extended-precision e^{i arg} for reuse across many rotations.
struct Phase {
  long double re = 1.0L;
  long double im = 0.0L;
  static Phase of(long double arg);
  Complex apply(Complex z) const {
    const long double zr = z.real(), zi = z.imag();
    return {static_cast<double>(zr * re - zi * im), static_cast<double>(zr * im + zi * re)};
  }
};

/// e^{-i k t} with the argument k*t reduced modulo 2*pi in extended precision.
Complex phase_minus(long long k, long double t);

std::string version();

}  // namespace nlsplit
