#include "nlsplit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "nlsplit/fft.hpp"

namespace nlsplit {

double SplittingScheme::max_abs_b() const {
  double m = 0.0;
  for (double x : b) m = std::max(m, std::abs(x));
  return m;
}

SchemeCheck validate_scheme(const SplittingScheme& scheme) {
  SchemeCheck check;
  if (scheme.a.empty() || scheme.a.size() != scheme.b.size()) {
    check.message = fmt::format("scheme '{}': a and b must be non-empty and of equal length "
                                "(got {} and {})",
                                scheme.name, scheme.a.size(), scheme.b.size());
    return check;
  }
  for (double x : scheme.a) check.sum_a += x;
  for (double x : scheme.b) check.sum_b += x;
  const bool finite =
      std::all_of(scheme.a.begin(), scheme.a.end(), [](double x) { return std::isfinite(x); }) &&
      std::all_of(scheme.b.begin(), scheme.b.end(), [](double x) { return std::isfinite(x); });
  if (!finite) {
    check.message = fmt::format("scheme '{}': non-finite coefficient", scheme.name);
    return check;
  }
  if (scheme.declared_order < 1) {
    check.message = fmt::format("scheme '{}': declared_order must be >= 1", scheme.name);
    return check;
  }
  constexpr double tol = 1e-12;
  check.ok = std::abs(check.sum_a - 1.0) <= tol && std::abs(check.sum_b - 1.0) <= tol;
  check.message = fmt::format("scheme '{}': sum(a) = {:.17g}, sum(b) = {:.17g}{}", scheme.name,
                              check.sum_a, check.sum_b,
                              check.ok ? "" : " (inconsistent: both sums must equal 1)");
  return check;
}

CflCheck validate_cfl(const StepParams& p) {
  CflCheck check;
  check.product = (p.N + 1) * p.h * static_cast<double>(p.K) * p.K;
  if (!(p.h > 0.0) || p.K < 1 || p.N < 2) {
    check.message = fmt::format("invalid step parameters: need h > 0, K >= 1, N >= 2 "
                                "(h = {}, K = {}, N = {})",
                                p.h, p.K, p.N);
    return check;
  }
  if (!(p.c0 > 0.0) || !(p.c0 < kTwoPi)) {
    check.message = fmt::format("c0 must be < 2π and positive (c0 = {})", p.c0);
    return check;
  }
  check.ok = check.product <= p.c0;
  check.message = fmt::format("(N+1)hK^2 = {:.6g} {} c0 = {}", check.product,
                              check.ok ? "<=" : ">", p.c0);
  return check;
}

double max_cfl_step(int K, int N, double c0) {
  return c0 / ((N + 1) * static_cast<double>(K) * K);
}

ModeVector flow_A(const ModeVector& u, double alpha) {
  ModeVector out = u;
  if (alpha == 0.0) return out;
  for (int j = u.min_mode(); j <= u.max_mode(); ++j) {
    out[j] = rotate(out[j], -static_cast<long double>(j) * j * alpha);
  }
  return out;
}

namespace {

// Whole B substep in extended precision, rounded to double once at the end.
// A double-precision FFT round trip is not exactly unitary and its bias
// accumulates linearly in the mass over long runs.
void nonlinear_substep(std::span<Complex> coeffs, double alpha, std::vector<fft::ComplexExt>& buf) {
  buf.assign(coeffs.begin(), coeffs.end());
  fft::backward(std::span<fft::ComplexExt>(buf));
  const long double a = alpha;
  for (auto& v : buf) {
    const long double th = -a * std::norm(v);
    v *= fft::ComplexExt(cosl(th), sinl(th));
  }
  fft::forward(std::span<fft::ComplexExt>(buf));
  const long double scale = 1.0L / static_cast<long double>(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    coeffs[i] = Complex(static_cast<double>(buf[i].real() * scale), static_cast<double>(buf[i].imag() * scale));
  }
}

}  // namespace

ModeVector flow_B(const ModeVector& u, double alpha) {
  if (alpha == 0.0) return u;
  ModeVector out = u;
  std::vector<fft::ComplexExt> buf;
  nonlinear_substep(out.dft_order(), alpha, buf);
  return out;
}

ModeVector step(const ModeVector& u, const SplittingScheme& scheme, double h) {
  ModeVector v = u;
  for (int r = scheme.stages() - 1; r >= 0; --r) {
    v = flow_B(v, scheme.b[r] * h);
    v = flow_A(v, scheme.a[r] * h);
  }
  return v;
}

Stepper::Stepper(const SplittingScheme& scheme, double h, int K)
    : scheme_(scheme), h_(h), K_(K), grid_(static_cast<std::size_t>(2 * K)) {
  linear_phase_.resize(scheme.a.size());
  for (std::size_t r = 0; r < scheme.a.size(); ++r) {
    if (scheme.a[r] == 0.0) continue;
    auto& ph = linear_phase_[r];
    ph.resize(static_cast<std::size_t>(2 * K));
    for (int i = 0; i < 2 * K; ++i) {
      const long double j = ModeVector::mode_of_slot(i, K);
      ph[i] = Phase::of(-j * j * scheme.a[r] * h);
    }
  }
}

void Stepper::apply_B(ModeVector& u, double alpha) {
  nonlinear_substep(u.dft_order(), alpha, grid_);
}

void Stepper::advance(ModeVector& u) {
  for (int r = scheme_.stages() - 1; r >= 0; --r) {
    if (scheme_.b[r] != 0.0) apply_B(u, scheme_.b[r] * h_);
    if (scheme_.a[r] != 0.0) {
      auto coeffs = u.dft_order();
      const auto& ph = linear_phase_[r];
      for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = ph[i].apply(coeffs[i]);
    }
  }
}

ObservableRecord observe(const ModeVector& u, long long n, double h, Precision p) {
  ObservableRecord rec;
  rec.step = n;
  rec.t = static_cast<double>(static_cast<long double>(n) * h);
  rec.mass = mass(u, p);
  rec.h1_sq = h1_norm_sq(u, p);
  rec.energy = energy(u, p);
  return rec;
}

Trajectory integrate(const ModeVector& u0, const SplittingScheme& scheme,
                     const StepParams& params, long long n_steps,
                     const IntegrateOptions& options) {
  if (n_steps < 0) throw ValidationError("integrate: n_steps must be >= 0");
  if (params.K != u0.cutoff())
    throw ValidationError("integrate: StepParams.K does not match the state cutoff");
  const SchemeCheck sc = validate_scheme(scheme);
  if (!sc.ok) throw ValidationError(sc.message);

  Trajectory traj;
  const CflCheck cfl = validate_cfl(params);
  if (!cfl.ok) {
    if (!options.demote_cfl) throw ValidationError("CFL violation: " + cfl.message);
    traj.warnings.push_back("CFL violation demoted to warning: " + cfl.message);
  }

  const long long stride = std::max<long long>(1, options.record_stride);
  std::vector<long long> snaps = options.snapshot_steps;
  std::sort(snaps.begin(), snaps.end());
  auto next_snap = snaps.begin();

  ModeVector u = u0;
  Stepper stepper(scheme, params.h, u0.cutoff());
  auto visit = [&](long long n) {
    if (n % stride == 0 || n == n_steps)
      traj.records.push_back(observe(u, n, params.h, options.precision));
    while (next_snap != snaps.end() && *next_snap <= n) {
      if (*next_snap == n) traj.snapshots.emplace(n, u);
      ++next_snap;
    }
    if (options.observer) options.observer(n, u);
  };

  visit(0);
  for (long long n = 1; n <= n_steps; ++n) {
    stepper.advance(u);
    if (!u.all_finite())
      throw NumericalError(fmt::format("integrate: non-finite state at step {}", n));
    visit(n);
  }
  traj.final_state = std::move(u);
  return traj;
}

}  // namespace nlsplit
