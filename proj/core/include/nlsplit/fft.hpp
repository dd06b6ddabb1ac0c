#pragma once

#include <span>

#include "nlsplit/common.hpp"

// Unnormalized in-place complex DFTs. Plans are created once per shape and
// shared; executing them is thread-safe.
//
//   forward:  X_k = sum_m x_m e^{-2 pi i k m / n}
//   backward: x_m = sum_k X_k e^{+2 pi i k m / n}
namespace nlsplit::fft {

void forward(std::span<Complex> data);
void backward(std::span<Complex> data);

// Extended-precision variants, used where round-trip bias matters.
using ComplexExt = std::complex<long double>;
void forward(std::span<ComplexExt> data);
void backward(std::span<ComplexExt> data);

// Row-major rows x cols array.
void forward_2d(std::span<Complex> data, int rows, int cols);
void backward_2d(std::span<Complex> data, int rows, int cols);

}  // namespace nlsplit::fft
