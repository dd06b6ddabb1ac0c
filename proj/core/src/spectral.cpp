#include "nlsplit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nlsplit/fft.hpp"

namespace nlsplit {

ModeVector::ModeVector(int K) : K_(K) {
  if (K < 1) throw ValidationError("ModeVector: cutoff K must be >= 1");
  coeffs_.assign(static_cast<std::size_t>(2 * K), Complex{});
}

ModeVector::ModeVector(int K, std::vector<Complex> dft_ordered)
    : K_(K), coeffs_(std::move(dft_ordered)) {
  if (K < 1) throw ValidationError("ModeVector: cutoff K must be >= 1");
  if (coeffs_.size() != static_cast<std::size_t>(2 * K))
    throw ValidationError("ModeVector: expected " + std::to_string(2 * K) +
                          " coefficients, got " + std::to_string(coeffs_.size()));
  if (!all_finite()) throw NumericalError("ModeVector: non-finite coefficient");
}

ModeVector ModeVector::single_mode(int K, int j, Complex value) {
  ModeVector u(K);
  if (j < -K || j >= K) throw ValidationError("single_mode: mode outside {-K,...,K-1}");
  u[j] = value;
  return u;
}

int ModeVector::wrap(long long j, int K) {
  const long long n = 2LL * K;
  long long r = ((j + K) % n + n) % n;
  return static_cast<int>(r - K);
}

bool ModeVector::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

ModeVector& ModeVector::operator+=(const ModeVector& other) {
  if (other.K_ != K_) throw ValidationError("ModeVector: cutoff mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

ModeVector& ModeVector::operator-=(const ModeVector& other) {
  if (other.K_ != K_) throw ValidationError("ModeVector: cutoff mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

ModeVector& ModeVector::operator*=(Complex c) {
  for (auto& x : coeffs_) x *= c;
  return *this;
}

GridVector modes_to_grid(const ModeVector& u, int M) {
  const int K = u.cutoff();
  if (M < 2 * K)
    throw ValidationError("modes_to_grid: M = " + std::to_string(M) + " < 2K = " +
                          std::to_string(2 * K) + " loses information");
  std::vector<Complex> buf(static_cast<std::size_t>(M));
  for (int j = -K; j < K; ++j) buf[j >= 0 ? j : j + M] = u[j];
  fft::backward(buf);
  return GridVector(std::move(buf));
}

GridVector modes_to_grid(const ModeVector& u) { return modes_to_grid(u, u.size()); }

ModeVector grid_to_modes(const GridVector& v, int K) {
  if (v.size() != 2 * K)
    throw ValidationError("grid_to_modes: expected 2K = " + std::to_string(2 * K) +
                          " samples, got " + std::to_string(v.size()));
  std::vector<Complex> buf(v.values().begin(), v.values().end());
  fft::forward(buf);
  const double scale = 1.0 / (2.0 * K);
  for (auto& c : buf) c *= scale;
  return ModeVector(K, std::move(buf));
}

double h1_norm_sq(const ModeVector& u, Precision p) {
  Accumulator acc(p);
  for (int j = u.min_mode(); j <= u.max_mode(); ++j) acc += bracket_sq(j) * std::norm(u[j]);
  return acc.value();
}

double h1_norm(const ModeVector& u) { return std::sqrt(h1_norm_sq(u)); }

double mass(const ModeVector& u, Precision p) {
  Accumulator acc(p);
  for (Complex c : u.dft_order()) acc += std::norm(c);
  return acc.value();
}

double grid_mass(const ModeVector& u) {
  const GridVector g = modes_to_grid(u);
  double s = 0.0;
  for (Complex c : g.values()) s += std::norm(c);
  return s / g.size();
}

double quartic_energy(const ModeVector& u, Precision p) {
  const int M = 4 * u.cutoff();
  const GridVector g = modes_to_grid(u, M);
  Accumulator acc(p);
  for (Complex c : g.values()) {
    const double r = std::norm(c);
    acc += r * r;
  }
  // (1/4pi) int |u|^4 dx = (1/2) * mean |u|^4
  return 0.5 * acc.value() / M;
}

double energy(const ModeVector& u, Precision p) {
  Accumulator acc(p);
  for (int j = u.min_mode(); j <= u.max_mode(); ++j)
    acc += static_cast<double>(j) * j * std::norm(u[j]);
  acc += quartic_energy(u, p);
  return acc.value();
}

InitialProfile InitialProfile::named(std::string n, std::uint64_t seed) {
  InitialProfile p;
  p.name = std::move(n);
  p.seed = seed;
  return p;
}

InitialProfile InitialProfile::explicit_modes(std::vector<ModeTerm> m) {
  InitialProfile p;
  p.name = "explicit";
  p.modes = std::move(m);
  return p;
}

ModeVector profile_modes(int K, const InitialProfile& profile) {
  ModeVector g(K);
  auto put = [&](int j, Complex c) {
    if (j >= -K && j < K) g[j] += c;
  };
  if (profile.name == "default") {
    put(1, Complex(2.0, 1.0) / bracket(1));
    put(-2, Complex(1.0, 0.0) / bracket(2));
    put(3, Complex(0.5, 0.0) / bracket(3));
  } else if (profile.name == "plane_wave") {
    put(1, 1.0);
  } else if (profile.name == "random") {
    std::mt19937_64 rng(profile.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = -3; j <= 3; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      put(j, Complex(re, im));
    }
  } else if (profile.name == "explicit") {
    for (const auto& term : profile.modes) put(term.j, term.value);
  } else {
    throw ValidationError("unknown initial profile '" + profile.name + "'");
  }
  return g;
}

ModeVector make_initial(int K, double eps, const InitialProfile& profile) {
  if (!(eps > 0.0)) throw ValidationError("make_initial: eps must be positive");
  ModeVector g = profile_modes(K, profile);
  const double norm = h1_norm(g);
  if (norm == 0.0) throw ValidationError("make_initial: profile has no modes inside {-K,...,K-1}");
  g *= Complex(eps / norm, 0.0);
  return g;
}

}  // namespace nlsplit
