#include "nlsplit/summation.hpp"

#include <cmath>
#include <string>

#include "nlsplit/common.hpp"

namespace nlsplit {

Precision parse_precision(std::string_view name) {
  if (name == "plain") return Precision::plain;
  if (name == "compensated") return Precision::compensated;
  throw ValidationError("unknown precision mode '" + std::string(name) +
                        "' (expected plain or compensated)");
}

std::string_view to_string(Precision p) {
  return p == Precision::plain ? "plain" : "compensated";
}

double bracket(double j) { return std::sqrt(j * j + 1.0); }

Phase Phase::of(long double arg) { return {std::cos(arg), std::sin(arg)}; }

Complex rotate(Complex z, long double arg) { return Phase::of(arg).apply(z); }

Complex phase_minus(long long k, long double t) {
  constexpr long double two_pi = 6.283185307179586476925286766559005768L;
  long double arg = std::fmod(static_cast<long double>(k) * t, two_pi);
  return {static_cast<double>(std::cos(arg)), static_cast<double>(-std::sin(arg))};
}

std::string version() {
#ifdef NLSPLIT_VERSION
  return NLSPLIT_VERSION;
#else
  return "unknown";
#endif
}

}  // namespace nlsplit
