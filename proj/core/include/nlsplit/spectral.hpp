#pragma once

// Trigonometric polynomials of degree K on the 2*pi-periodic torus.
//
// A ModeVector holds the 2K coefficients u_j, j in {-K, ..., K-1}, in standard
// DFT order: slot i = j for j >= 0 and slot i = j + 2K for j < 0. Mode -K is
// the unpaired "extra" mode and lives in slot K.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlsplit/common.hpp"
#include "nlsplit/summation.hpp"

namespace nlsplit {

class ModeVector {
 public:
  explicit ModeVector(int K);
  // `dft_ordered` must have length 2K; entries must be finite.
  ModeVector(int K, std::vector<Complex> dft_ordered);

  static ModeVector single_mode(int K, int j, Complex value);

  int cutoff() const { return K_; }
  int size() const { return 2 * K_; }
  int min_mode() const { return -K_; }
  int max_mode() const { return K_ - 1; }

  static int slot(int j, int K) { return j >= 0 ? j : j + 2 * K; }
  static int mode_of_slot(int i, int K) { return i < K ? i : i - 2 * K; }
  // Representative of j modulo 2K inside {-K, ..., K-1}.
  static int wrap(long long j, int K);

  Complex operator[](int j) const { return coeffs_[slot(j, K_)]; }
  Complex& operator[](int j) { return coeffs_[slot(j, K_)]; }

  std::span<const Complex> dft_order() const { return coeffs_; }
  std::span<Complex> dft_order() { return coeffs_; }

  bool all_finite() const;

  ModeVector& operator+=(const ModeVector& other);
  ModeVector& operator-=(const ModeVector& other);
  ModeVector& operator*=(Complex c);

  friend ModeVector operator+(ModeVector a, const ModeVector& b) { return a += b; }
  friend ModeVector operator-(ModeVector a, const ModeVector& b) { return a -= b; }
  friend ModeVector operator*(Complex c, ModeVector a) { return a *= c; }
  friend bool operator==(const ModeVector&, const ModeVector&) = default;

 private:
  int K_;
  std::vector<Complex> coeffs_;
};

// Samples at x_m = 2*pi*m/M, m = 0..M-1.
class GridVector {
 public:
  explicit GridVector(std::vector<Complex> values) : values_(std::move(values)) {}
  explicit GridVector(int M) : values_(static_cast<std::size_t>(M)) {}

  int size() const { return static_cast<int>(values_.size()); }
  Complex operator[](int m) const { return values_[m]; }
  Complex& operator[](int m) { return values_[m]; }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }

 private:
  std::vector<Complex> values_;
};

/// Evaluates u on M >= 2K equispaced points. Throws ValidationError if M < 2K.
GridVector modes_to_grid(const ModeVector& u, int M);
GridVector modes_to_grid(const ModeVector& u);

/// Trigonometric interpolation Q^K of 2K samples; frequencies alias mod 2K.
ModeVector grid_to_modes(const GridVector& v, int K);

/// sum_j <j>^2 |u_j|^2.
double h1_norm_sq(const ModeVector& u, Precision p = Precision::plain);
double h1_norm(const ModeVector& u);

/// sum_j |u_j|^2.
double mass(const ModeVector& u, Precision p = Precision::plain);

/// (1/2K) sum_m |u(x_m)|^2 on the 2K grid. Equal to mass(u) by Parseval.
double grid_mass(const ModeVector& u);

/// E(u) = (1/2pi) int |u_x|^2 + (1/4pi) int |u|^4. The quadratic part is
/// evaluated in mode space, the quartic part by the trapezoidal rule on 4K
/// points, which is exact because |u|^4 has bandwidth 4K-2.
double energy(const ModeVector& u, Precision p = Precision::plain);

/// Quartic part (1/4pi) int |u|^4 alone.
double quartic_energy(const ModeVector& u, Precision p = Precision::plain);

struct ModeTerm {
  int j;
  Complex value;
};

// Initial profile g before normalization. Either a named profile or an
// explicit list of modes.
struct InitialProfile {
  std::string name = "default";
  std::vector<ModeTerm> modes;  // used when name == "explicit"
  std::uint64_t seed = 0;       // used when name == "random"

  static InitialProfile named(std::string n, std::uint64_t seed = 0);
  static InitialProfile explicit_modes(std::vector<ModeTerm> m);
};

/// Modes of the profile before normalization, truncated to the modes in 𝒦.
ModeVector profile_modes(int K, const InitialProfile& profile);

/// psi0 = eps * Q^K(g) / ||Q^K(g)||_1, so that ||psi0||_1 = eps.
///
/// Named profiles:
///   default     (2+i) e^{ix}/<1> + e^{-2ix}/<2> + 0.5 e^{3ix}/<3>
///   plane_wave  e^{ix}
///   random      modes |j| <= 3 with standard normal real/imaginary parts
ModeVector make_initial(int K, double eps, const InitialProfile& profile);

}  // namespace nlsplit
