#pragma once

// Scaling experiments: energy drift vs eps, order studies vs h, the
// modulated-Fourier-expansion validation suite and the interface study.
// Every experiment runs independent parameter points (one per eps or per
// (scheme, h)) on up to `jobs` threads and merges them in key order, so
// reports do not depend on the thread count.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsplit/fit.hpp"
#include "nlsplit/splitting.hpp"

namespace nlsplit {

struct ExperimentConfig {
  std::string scheme = "strang_1";
  std::vector<std::string> schemes;  // order study; empty means all built-ins
  int K = 16;
  int N = 2;
  double c0 = 6.0;
  std::vector<double> epsilons = {0.1, 0.05, 0.025};
  std::string h_rule = "cfl_max";  // cfl_max | explicit
  std::optional<double> h;
  std::vector<double> h_list = {0.02, 0.01, 0.005, 0.0025};
  // drift: eps^-1 min(10, eps^-1); inverse_eps: eps^-1; theorem: eps^(1-N);
  // fixed: final_time
  std::string horizon_rule = "drift";
  double final_time = 10.0;
  long long step_budget = 4'000'000;
  InitialProfile profile;
  Precision precision = Precision::plain;
  bool demote_cfl = false;
  int jobs = 1;
  long long max_series_rows = 2000;
  double residual_cap = 0.5;
};

void validate_config(const ExperimentConfig& cfg);

/// Step size for one eps under the configured h rule.
double resolve_step(const ExperimentConfig& cfg);

/// Horizon in time for one eps under the configured horizon rule (before the
/// step budget is applied).
double resolve_horizon(const ExperimentConfig& cfg, double eps);

struct SeriesRow {
  double t = 0.0;
  double mass = 0.0;
  double h1_sq = 0.0;
  double energy = 0.0;
  double e_dev_scaled = 0.0;
  double h1_dev_scaled = 0.0;
};

struct Series {
  std::string label;
  double epsilon = 0.0;
  double h = 0.0;
  std::vector<SeriesRow> rows;
};

struct FitEntry {
  std::string name;
  std::string x_label;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<FitResult> fit;
  std::string error;  // why no fit was produced
  std::optional<double> target;
  std::optional<double> lower;  // acceptance window on the slope
  std::optional<double> upper;
  bool gated = true;

  /// True when a fit exists, its residual is within the cap and the slope
  /// lies inside [lower, upper].
  bool accepted(double residual_cap) const;
};

struct ExperimentReport {
  std::string kind;
  std::string version;
  nlohmann::json config;
  nlohmann::json points = nlohmann::json::array();
  std::vector<Series> series;
  std::vector<FitEntry> fits;
  std::vector<std::string> warnings;
  int numerical_failures = 0;

  const FitEntry* find_fit(const std::string& name) const;
};

struct MfeMetrics {
  double h = 0.0;
  long long n_hat = 0;             // round(1 / (eps h))
  std::size_t entries = 0;         // stored polynomials
  double reconstruct_error = 0.0;  // ||psi~(0) - psi^0||_1
  double defect_over_h = 0.0;      // max over samples of ||d||_1 / h
  double defect_K = 0.0;           // max over samples of ||K d||_1
  double approx_error = 0.0;       // ||psi^n^ - psi~(t_n^)||_1
  double invariant_step = 0.0;     // max_n |E(t_{n+1}) - E(t_n)| / h
  double invariant_vs_h1 = 0.0;    // max_n |E(t_n) - ||psi^n||_1^2|
  double mass_rel_dev = 0.0;
};

MfeMetrics measure_mfe(const ModeVector& psi0, double eps, const SplittingScheme& scheme,
                       const ExperimentConfig& cfg);

struct InterfaceMetrics {
  double h = 0.0;
  long long n_hat = 0;
  double t_interface = 0.0;
  double interface_norm = 0.0;   // ||psi^n^||_1
  bool norm_within_bound = true;  // ||psi^n^||_1 <= 2 eps
  double invariant_jump = 0.0;   // |E(t_n^) - E^(t_n^)|
  double z_jump = 0.0;           // ||z(eps t_n^) - z^(eps t_n^)||_1
  // Same two quantities when restarting from psi~(t_n^) instead of psi^n^.
  double invariant_jump_reconstructed = 0.0;
  double z_jump_reconstructed = 0.0;
};

InterfaceMetrics measure_interface(const ModeVector& psi0, double eps,
                                   const SplittingScheme& scheme, const ExperimentConfig& cfg);

/// Max over t <= horizon of eps^-2 |E(psi^n) - E(psi^0)| and of
/// eps^-2 | ||psi^n||_1^2 - ||psi^0||_1^2 |, slope-fitted against eps.
ExperimentReport drift_experiment(const ExperimentConfig& cfg);

/// Final-time H1 error against a reference computed with the highest-order
/// scheme at h_min / 16, and max energy deviation (compensated sums), both
/// slope-fitted against h. Uses epsilons[0] and final_time.
ExperimentReport order_study(const ExperimentConfig& cfg);

/// Defect, approximation error and almost-invariant checks on t <= 1/eps.
ExperimentReport mfe_validation(const ExperimentConfig& cfg);

/// Restart of the expansion at t = n^ h, n^ = round(1/(eps h)).
ExperimentReport interface_study(const ExperimentConfig& cfg);

}  // namespace nlsplit
