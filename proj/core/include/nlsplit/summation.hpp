#pragma once

#include <string_view>

namespace nlsplit {

enum class Precision { plain, compensated };

Precision parse_precision(std::string_view name);
std::string_view to_string(Precision p);

// Sum accumulator. In compensated mode every addition is an error-free
// TwoSum and the low-order parts are carried separately (double-double
// style), which keeps ~32 significant digits for sums of many terms.
class Accumulator {
 public:
  explicit Accumulator(Precision p = Precision::plain) : precision_(p) {}

  void add(double x) {
    if (precision_ == Precision::plain) {
      hi_ += x;
      return;
    }
    const double s = hi_ + x;
    const double bp = s - hi_;
    const double err = (hi_ - (s - bp)) + (x - bp);
    hi_ = s;
    lo_ += err;
  }

  Accumulator& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return hi_ + lo_; }

 private:
  Precision precision_;
  double hi_ = 0.0;
  double lo_ = 0.0;
};

}  // namespace nlsplit
