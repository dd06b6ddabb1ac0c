#include <cmath>
#include <vector>

#include "nlsplit/fft.hpp"
#include "nlsplit/mfe/modulation.hpp"

namespace nlsplit::mfe {

int collocation_length(int K, int N) {
  const long long half = 13LL * N * K * K;
  int L = 1;
  while (L < 2 * half + 2) L *= 2;
  return L;
}

// Storage: row slot(j) (x direction, 2K rows), column (-k) mod L (t
// direction). The backward 2-D transform then yields
//   eta(x_m, t_n) = sum_{j,k} v_j^k e^{i j x_m} e^{-i k t_n}.
ModeSeq compose_collocated(const ModeSeq& v, const SplittingScheme& scheme, double h, int L) {
  const int K = v.cutoff();
  const int rows = 2 * K;
  std::vector<Complex> data(static_cast<std::size_t>(rows) * L);
  for (const auto& [key, value] : v.entries()) {
    const long long k = key.second;
    if (2 * std::llabs(k) >= L) throw ValidationError("compose_collocated: L too small for input");
    const long long col = ((-k) % L + L) % L;
    data[static_cast<std::size_t>(ModeVector::slot(key.first, K)) * L + col] += value;
  }

  const double scale = 1.0 / (static_cast<double>(rows) * L);
  for (int r = scheme.stages() - 1; r >= 0; --r) {
    const double beta = scheme.b[r] * h;
    if (beta != 0.0) {
      fft::backward_2d(data, rows, L);
      for (Complex& z : data) {
        z = rotate(z, -static_cast<long double>(beta) * std::norm(z));
      }
      fft::forward_2d(data, rows, L);
      for (Complex& z : data) z *= scale;
    }
    const double alpha = scheme.a[r] * h;
    if (alpha != 0.0) {
      for (int i = 0; i < rows; ++i) {
        const long double j = ModeVector::mode_of_slot(i, K);
        const Phase ph = Phase::of(-j * j * alpha);
        for (int c = 0; c < L; ++c) {
          Complex& z = data[static_cast<std::size_t>(i) * L + c];
          z = ph.apply(z);
        }
      }
    }
  }

  ModeSeq out(K);
  for (int i = 0; i < rows; ++i) {
    const int j = ModeVector::mode_of_slot(i, K);
    for (int c = 0; c < L; ++c) {
      const long long q = c < L / 2 ? c : c - L;
      out.set(j, -q, data[static_cast<std::size_t>(i) * L + c]);
    }
  }
  return out;
}

}  // namespace nlsplit::mfe
