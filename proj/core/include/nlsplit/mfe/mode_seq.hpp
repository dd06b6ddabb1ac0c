#pragma once

// Sparse sequences indexed by (j, k), j in {-K, ..., K-1}, k in Z.
//
// Seq<Complex> (ModeSeq) holds numbers, Seq<TauPolynomial> (PolySeq) holds
// modulation polynomials. Absent entries are zero. Iteration order is the
// lexicographic order of (j, k), which keeps every reduction deterministic.

#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>
#include <utility>

#include "nlsplit/mfe/tau_polynomial.hpp"
#include "nlsplit/spectral.hpp"

namespace nlsplit::mfe {

using SeqKey = std::pair<int, long long>;

template <class T>
class Seq {
 public:
  using Map = std::map<SeqKey, T>;

  explicit Seq(int K = 1) : K_(K) {}

  int cutoff() const { return K_; }
  bool empty() const { return m_.empty(); }
  std::size_t size() const { return m_.size(); }
  const Map& entries() const { return m_; }
  Map& entries() { return m_; }

  T at(int j, long long k) const {
    auto it = m_.find({j, k});
    return it == m_.end() ? T{} : it->second;
  }

  void set(int j, long long k, T v) {
    if (is_zero_value(v))
      m_.erase({j, k});
    else
      m_[{j, k}] = std::move(v);
  }

  void add(int j, long long k, const T& v) {
    if (is_zero_value(v)) return;
    auto [it, inserted] = m_.try_emplace({j, k}, v);
    if (!inserted) it->second += v;
  }

  long long max_abs_k() const {
    long long m = 0;
    for (const auto& [key, v] : m_) m = std::max(m, key.second < 0 ? -key.second : key.second);
    return m;
  }

  Seq& operator+=(const Seq& o) {
    for (const auto& [key, v] : o.m_) add(key.first, key.second, v);
    return *this;
  }
  Seq& operator-=(const Seq& o) {
    for (const auto& [key, v] : o.m_) add(key.first, key.second, Complex(-1.0, 0.0) * v);
    return *this;
  }
  Seq& operator*=(Complex s) {
    for (auto& [key, v] : m_) v = s * v;
    return *this;
  }

  friend Seq operator+(Seq a, const Seq& b) { return a += b; }
  friend Seq operator-(Seq a, const Seq& b) { return a -= b; }
  friend Seq operator*(Complex s, Seq a) { return a *= s; }

 private:
  int K_;
  Map m_;
};

using ModeSeq = Seq<Complex>;
using PolySeq = Seq<TauPolynomial>;

/// (x * y)_j^k = sum over j1 + j2 = j (mod 2K), k1 + k2 = k of x_{j1}^{k1} y_{j2}^{k2}.
template <class T>
Seq<T> conv(const Seq<T>& x, const Seq<T>& y) {
  const int K = x.cutoff();
  if (y.cutoff() != K) throw ValidationError("conv: cutoff mismatch");
  Seq<T> out(K);
  for (const auto& [kx, vx] : x.entries())
    for (const auto& [ky, vy] : y.entries())
      out.add(ModeVector::wrap(static_cast<long long>(kx.first) + ky.first, K), kx.second + ky.second,
              vx * vy);
  return out;
}

/// bar(x)_j^k = conj(x_{-j}^{-k}); the index -(-K) = K is identified with -K.
template <class T>
Seq<T> bar(const Seq<T>& x) {
  const int K = x.cutoff();
  Seq<T> out(K);
  for (const auto& [key, v] : x.entries())
    out.set(ModeVector::wrap(-static_cast<long long>(key.first), K), -key.second, conj_value(v));
  return out;
}

/// Phi_A^alpha: entry-wise e^{-i j^2 alpha}.
template <class T>
Seq<T> phi_A(const Seq<T>& x, double alpha) {
  if (alpha == 0.0) return x;
  Seq<T> out = x;
  for (auto& [key, v] : out.entries()) {
    const long double arg = -static_cast<long double>(key.first) * key.first * alpha;
    if constexpr (std::is_same_v<T, Complex>)
      v = rotate(v, arg);
    else
      v = Complex(static_cast<double>(std::cos(arg)), static_cast<double>(std::sin(arg))) * v;
  }
  return out;
}

/// ||x||_sigma^2 = sum_j <j>^{2 sigma} (sum_k |x_j^k|)^2.
double norm_sigma_sq(const ModeSeq& x, double sigma);
double norm_sigma(const ModeSeq& x, double sigma);

/// (Lambda x)_j^k = <k - j^2> x_j^k.
ModeSeq rescale_Lambda(const ModeSeq& x);
/// (K x)_j^k = <k> x_j^k.
ModeSeq rescale_Kop(const ModeSeq& x);

struct SeriesOptions {
  double relative_tolerance = 1e-16;
  int max_terms = 200;
};

/// Phi_B^alpha on sequences by its power series, summed until the
/// ||.||_1 contribution of a term drops below the relative tolerance.
/// Throws NumericalError when the series has not converged after max_terms.
ModeSeq phi_B_series(const ModeSeq& x, double alpha, const SeriesOptions& opt = {});

/// E(v) = sum_{j,k} (k + 1) |v_j^k|^2.
double almost_invariant(const ModeSeq& x, Precision p = Precision::plain);

enum class FlowKind { A, B };

/// E(x) and E(Phi^alpha(x)) for the chosen flow.
std::pair<double, double> conserved_E_check(const ModeSeq& x, double alpha, FlowKind flow);

/// Evaluates every polynomial entry at tau.
ModeSeq evaluate(const PolySeq& z, double tau);

/// sum_k x_j^k e^{-i k t} for each j.
ModeVector collapse(const ModeSeq& x, long double t);

}  // namespace nlsplit::mfe
