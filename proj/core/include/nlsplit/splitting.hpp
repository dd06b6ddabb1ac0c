#pragma once

// Splitting integrators
//
//   psi^{n+1} = phi_A^{a_1 h} o phi_B^{b_1 h} o ... o phi_A^{a_s h} o phi_B^{b_s h} (psi^n)
//
// for i psi_t = -psi_xx + Q^K(|psi|^2 psi). Composition is read as function
// composition: phi_B^{b_s h} acts first and phi_A^{a_1 h} acts last.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlsplit/spectral.hpp"

namespace nlsplit {

struct SplittingScheme {
  std::string name;
  std::vector<double> a;
  std::vector<double> b;
  int declared_order = 1;

  int stages() const { return static_cast<int>(a.size()); }
  double max_abs_b() const;
};

struct SchemeCheck {
  bool ok = false;
  double sum_a = 0.0;
  double sum_b = 0.0;
  std::string message;
};

// Consistency: sum a_r = sum b_r = 1 within 1e-12, finite real coefficients,
// equal stage counts.
SchemeCheck validate_scheme(const SplittingScheme& scheme);

struct StepParams {
  double h = 0.0;
  int K = 1;
  int N = 2;
  double c0 = 6.0;
};

struct CflCheck {
  bool ok = false;
  double product = 0.0;  // (N+1) h K^2
  std::string message;
};

// (N+1) h K^2 <= c0 < 2 pi, plus the basic ranges of StepParams.
CflCheck validate_cfl(const StepParams& params);

// Largest h allowed by the CFL restriction: c0 / ((N+1) K^2).
double max_cfl_step(int K, int N, double c0);

/// (phi_A^alpha u)_j = e^{-i j^2 alpha} u_j.
ModeVector flow_A(const ModeVector& u, double alpha);

/// phi_B^alpha u = Q^K(e^{-i alpha |u|^2} u), evaluated on the 2K grid.
ModeVector flow_B(const ModeVector& u, double alpha);

/// One full composed step.
ModeVector step(const ModeVector& u, const SplittingScheme& scheme, double h);

// Reusable stepper for a fixed (scheme, h, K): caches the linear phases and
// a grid buffer.
class Stepper {
 public:
  Stepper(const SplittingScheme& scheme, double h, int K);

  void advance(ModeVector& u);
  const SplittingScheme& scheme() const { return scheme_; }
  double h() const { return h_; }

 private:
  void apply_B(ModeVector& u, double alpha);

  SplittingScheme scheme_;
  double h_;
  int K_;
  std::vector<std::vector<Phase>> linear_phase_;  // per stage, DFT order
  std::vector<std::complex<long double>> grid_;
};

struct ObservableRecord {
  long long step = 0;
  double t = 0.0;
  double mass = 0.0;
  double h1_sq = 0.0;
  double energy = 0.0;
};

struct IntegrateOptions {
  bool demote_cfl = false;
  Precision precision = Precision::plain;
  long long record_stride = 1;        // the last step is always recorded
  std::vector<long long> snapshot_steps;
  // Called after every step (and once for n = 0) with the current state.
  std::function<void(long long, const ModeVector&)> observer;
};

struct Trajectory {
  std::vector<ObservableRecord> records;
  ModeVector final_state{1};
  std::map<long long, ModeVector> snapshots;
  std::vector<std::string> warnings;
};

ObservableRecord observe(const ModeVector& u, long long n, double h, Precision p);

/// Runs n_steps steps. Throws ValidationError for an inconsistent scheme or
/// (unless demoted) a CFL violation, and NumericalError with the step index
/// on the first non-finite state.
Trajectory integrate(const ModeVector& u0, const SplittingScheme& scheme,
                     const StepParams& params, long long n_steps,
                     const IntegrateOptions& options = {});

// Scheme registry ----------------------------------------------------------

/// Lie-Trotter and Strang (both variants), Yoshida and Suzuki order 4 and
/// the Blanes-Moan order-4 six-stage method.
std::vector<SplittingScheme> builtin_schemes();

std::optional<SplittingScheme> find_builtin_scheme(const std::string& name);

/// Built-in by name, or a JSON scheme file when `name_or_path` ends in .json.
SplittingScheme resolve_scheme(const std::string& name_or_path);

SplittingScheme load_scheme_file(const std::string& path);
std::string scheme_to_json(const SplittingScheme& scheme);
SplittingScheme scheme_from_json(const std::string& text);

// Composition of a symmetric second-order base step with sub-step weights
// `weights`, expanded into (a, b) form using Strang variant 1 as the base.
SplittingScheme compose_strang(std::string name, const std::vector<double>& weights,
                               int declared_order);

}  // namespace nlsplit
