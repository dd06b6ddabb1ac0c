#include "nlsplit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "nlsplit/mfe/modulation.hpp"
#include "nlsplit/report.hpp"

namespace nlsplit {

namespace {

using nlohmann::json;

template <class F>
void run_jobs(std::size_t n, int jobs, F&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

FitEntry make_fit(std::string name, std::string x_label, std::vector<double> x, std::vector<double> y,
                  std::optional<double> target, std::optional<double> lower,
                  std::optional<double> upper, bool gated) {
  FitEntry f;
  f.name = std::move(name);
  f.x_label = std::move(x_label);
  f.x = std::move(x);
  f.y = std::move(y);
  f.target = target;
  f.lower = lower;
  f.upper = upper;
  f.gated = gated;
  try {
    f.fit = fit_slope(f.x, f.y);
  } catch (const ValidationError& e) {
    f.error = e.what();
  }
  return f;
}

ExperimentReport new_report(std::string kind, const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.kind = std::move(kind);
  r.version = version();
  r.config = config_to_json(cfg);
  return r;
}

std::string eps_label(double eps) { return fmt::format("eps_{:g}", eps); }

double rel(double dev, double ref) { return ref != 0.0 ? dev / std::abs(ref) : dev; }

}  // namespace

bool FitEntry::accepted(double residual_cap) const {
  if (!fit) return false;
  if (!(fit->residual <= residual_cap)) return false;
  if (lower && fit->slope < *lower) return false;
  if (upper && fit->slope > *upper) return false;
  return true;
}

const FitEntry* ExperimentReport::find_fit(const std::string& name) const {
  for (const auto& f : fits)
    if (f.name == name) return &f;
  return nullptr;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.K < 1) throw ValidationError("K must be >= 1");
  if (cfg.N < 2) throw ValidationError("N must be >= 2");
  if (!(cfg.c0 > 0.0) || !(cfg.c0 < kTwoPi))
    throw ValidationError(fmt::format("c0 must be < 2π and positive (c0 = {})", cfg.c0));
  if (cfg.epsilons.empty()) throw ValidationError("epsilons must not be empty");
  for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0.0)) throw ValidationError("epsilons must be positive");
    if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
      throw ValidationError("epsilons must be strictly decreasing");
  }
  if (cfg.h_rule != "cfl_max" && cfg.h_rule != "explicit")
    throw ValidationError(fmt::format("unknown h_rule '{}' (expected cfl_max or explicit)", cfg.h_rule));
  if (cfg.h_rule == "explicit" && !(cfg.h && *cfg.h > 0.0))
    throw ValidationError("h_rule 'explicit' needs a positive h");
  if (cfg.horizon_rule != "drift" && cfg.horizon_rule != "inverse_eps" &&
      cfg.horizon_rule != "theorem" && cfg.horizon_rule != "fixed")
    throw ValidationError(fmt::format(
        "unknown horizon_rule '{}' (expected drift, inverse_eps, theorem or fixed)", cfg.horizon_rule));
  if (!(cfg.final_time > 0.0)) throw ValidationError("final_time must be positive");
  if (cfg.step_budget < 1) throw ValidationError("step_budget must be >= 1");
  if (cfg.jobs < 1) throw ValidationError("jobs must be >= 1");
  for (double h : cfg.h_list)
    if (!(h > 0.0)) throw ValidationError("h_list entries must be positive");
}

double resolve_step(const ExperimentConfig& cfg) {
  if (cfg.h_rule == "explicit") return *cfg.h;
  return max_cfl_step(cfg.K, cfg.N, cfg.c0);
}

double resolve_horizon(const ExperimentConfig& cfg, double eps) {
  if (cfg.horizon_rule == "drift") return std::min(10.0, 1.0 / eps) / eps;
  if (cfg.horizon_rule == "inverse_eps") return 1.0 / eps;
  if (cfg.horizon_rule == "theorem") return std::pow(eps, 1 - cfg.N);
  return cfg.final_time;
}

// --- drift ---------------------------------------------------------------

ExperimentReport drift_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SplittingScheme scheme = resolve_scheme(cfg.scheme);
  if (auto sc = validate_scheme(scheme); !sc.ok) throw ValidationError(sc.message);
  const double h = resolve_step(cfg);
  const CflCheck cfl = validate_cfl({h, cfg.K, cfg.N, cfg.c0});
  if (!cfl.ok && !cfg.demote_cfl) throw ValidationError("CFL violation: " + cfl.message);

  ExperimentReport report = new_report("drift", cfg);
  if (!cfl.ok) report.warnings.push_back("CFL violation demoted to warning: " + cfl.message);

  const std::size_t n = cfg.epsilons.size();
  std::vector<json> points(n);
  std::vector<Series> series(n);
  std::vector<double> e_max(n, 0.0), h1_max(n, 0.0);
  std::vector<bool> failed(n, false);

  run_jobs(n, cfg.jobs, [&](std::size_t i) {
    const double eps = cfg.epsilons[i];
    const double horizon = resolve_horizon(cfg, eps);
    long long steps = std::llround(horizon / h);
    const bool capped = steps > cfg.step_budget;
    if (capped) steps = cfg.step_budget;

    const ModeVector psi0 = make_initial(cfg.K, eps, cfg.profile);
    const double E0 = energy(psi0, cfg.precision);
    const double H0 = h1_norm_sq(psi0, cfg.precision);
    const double M0 = mass(psi0, cfg.precision);
    const double scale = 1.0 / (eps * eps);
    double emax = 0.0, hmax = 0.0, mdev = 0.0;

    IntegrateOptions opt;
    opt.demote_cfl = true;  // already checked above
    opt.precision = cfg.precision;
    opt.record_stride = std::max<long long>(1, steps / std::max<long long>(1, cfg.max_series_rows));
    opt.observer = [&](long long, const ModeVector& u) {
      emax = std::max(emax, scale * std::abs(energy(u, cfg.precision) - E0));
      hmax = std::max(hmax, scale * std::abs(h1_norm_sq(u, cfg.precision) - H0));
      mdev = std::max(mdev, rel(std::abs(mass(u, cfg.precision) - M0), M0));
    };

    json p;
    p["epsilon"] = eps;
    p["h"] = h;
    p["steps"] = steps;
    p["horizon"] = horizon;
    p["achieved_horizon"] = static_cast<double>(steps) * h;
    p["capped"] = capped;
    Series s;
    s.label = eps_label(eps);
    s.epsilon = eps;
    s.h = h;
    try {
      Trajectory traj = integrate(psi0, scheme, {h, cfg.K, cfg.N, cfg.c0}, steps, opt);
      for (const auto& r : traj.records)
        s.rows.push_back({r.t, r.mass, r.h1_sq, r.energy, scale * std::abs(r.energy - E0),
                          scale * std::abs(r.h1_sq - H0)});
    } catch (const NumericalError& e) {
      p["error"] = e.what();
      failed[i] = true;
    }
    p["max_e_dev_scaled"] = emax;
    p["max_h1_dev_scaled"] = hmax;
    p["max_mass_rel_dev"] = mdev;
    points[i] = std::move(p);
    series[i] = std::move(s);
    e_max[i] = emax;
    h1_max[i] = hmax;
  });

  std::vector<double> xs, ye, yh;
  for (std::size_t i = 0; i < n; ++i) {
    report.points.push_back(points[i]);
    report.series.push_back(std::move(series[i]));
    if (failed[i]) {
      ++report.numerical_failures;
      continue;
    }
    xs.push_back(cfg.epsilons[i]);
    ye.push_back(e_max[i]);
    yh.push_back(h1_max[i]);
    if (points[i]["capped"].get<bool>())
      report.warnings.push_back(fmt::format("eps = {}: horizon capped by the step budget", cfg.epsilons[i]));
  }
  report.fits.push_back(make_fit("energy_deviation", "epsilon", xs, ye, 1.0, 0.7, 1.5, true));
  report.fits.push_back(make_fit("h1_deviation", "epsilon", xs, yh, 1.0, 0.7, 1.5, true));
  return report;
}

// --- order study ---------------------------------------------------------

ExperimentReport order_study(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.h_list.size() < 2) throw ValidationError("order study needs at least two step sizes");
  std::vector<SplittingScheme> schemes;
  if (cfg.schemes.empty())
    schemes = builtin_schemes();
  else
    for (const auto& s : cfg.schemes) schemes.push_back(resolve_scheme(s));
  for (const auto& s : schemes)
    if (auto sc = validate_scheme(s); !sc.ok) throw ValidationError(sc.message);

  ExperimentReport report = new_report("order", cfg);
  const double eps = cfg.epsilons.front();
  const double T = cfg.final_time;
  const ModeVector psi0 = make_initial(cfg.K, eps, cfg.profile);

  const SplittingScheme* ref_scheme = &schemes.front();
  for (const auto& s : schemes)
    if (s.declared_order > ref_scheme->declared_order) ref_scheme = &s;
  const double h_min = *std::min_element(cfg.h_list.begin(), cfg.h_list.end());
  const long long ref_steps = std::llround(T / (h_min / 16.0));
  const double h_ref = T / static_cast<double>(ref_steps);
  IntegrateOptions ref_opt;
  ref_opt.demote_cfl = true;
  ref_opt.record_stride = ref_steps;
  const ModeVector ref =
      integrate(psi0, *ref_scheme, {h_ref, cfg.K, cfg.N, cfg.c0}, ref_steps, ref_opt).final_state;

  for (double h : cfg.h_list)
    if (auto c = validate_cfl({h, cfg.K, cfg.N, cfg.c0}); !c.ok)
      report.warnings.push_back(fmt::format("h = {}: {} (CFL not required for convergence runs)", h, c.message));

  const std::size_t nh = cfg.h_list.size();
  const std::size_t jobs_total = schemes.size() * nh;
  std::vector<json> points(jobs_total);
  std::vector<double> err(jobs_total), edev(jobs_total), heff(jobs_total);
  run_jobs(jobs_total, cfg.jobs, [&](std::size_t idx) {
    const auto& scheme = schemes[idx / nh];
    const double h_req = cfg.h_list[idx % nh];
    const long long steps = std::llround(T / h_req);
    const double h = T / static_cast<double>(steps);
    const double E0 = energy(psi0, Precision::compensated);
    double emax = 0.0;
    IntegrateOptions opt;
    opt.demote_cfl = true;
    opt.record_stride = steps;
    opt.observer = [&](long long, const ModeVector& u) {
      emax = std::max(emax, std::abs(energy(u, Precision::compensated) - E0));
    };
    const ModeVector u = integrate(psi0, scheme, {h, cfg.K, cfg.N, cfg.c0}, steps, opt).final_state;
    err[idx] = h1_norm(u - ref);
    edev[idx] = emax;
    heff[idx] = h;
    points[idx] = json{{"scheme", scheme.name}, {"h", h},          {"steps", steps},
                       {"h1_error", err[idx]}, {"max_energy_dev", emax}};
  });

  report.points = json::array();
  for (auto& p : points) report.points.push_back(std::move(p));
  for (std::size_t si = 0; si < schemes.size(); ++si) {
    std::vector<double> xs(heff.begin() + si * nh, heff.begin() + (si + 1) * nh);
    std::vector<double> ys(err.begin() + si * nh, err.begin() + (si + 1) * nh);
    std::vector<double> ye(edev.begin() + si * nh, edev.begin() + (si + 1) * nh);
    const double order = schemes[si].declared_order;
    report.fits.push_back(make_fit(schemes[si].name + "/solution_error", "h", xs, ys, order,
                                   order - 0.25, order + 0.25, true));
    report.fits.push_back(
        make_fit(schemes[si].name + "/energy_error", "h", xs, ye, order, std::nullopt, std::nullopt, false));
  }
  report.points.push_back(json{{"reference_scheme", ref_scheme->name},
                               {"reference_h", h_ref},
                               {"reference_steps", ref_steps},
                               {"epsilon", eps},
                               {"final_time", T}});
  return report;
}

// --- MFE validation ------------------------------------------------------

namespace {

mfe::ModulationTable build_for(const ModeVector& psi0, double eps, const SplittingScheme& scheme,
                               double h, const ExperimentConfig& cfg) {
  mfe::BuildOptions bo;
  bo.c0 = cfg.c0;
  bo.demote_cfl = cfg.demote_cfl;
  return mfe::build_modulation(psi0, eps, cfg.N, scheme, h, bo);
}

}  // namespace

MfeMetrics measure_mfe(const ModeVector& psi0, double eps, const SplittingScheme& scheme,
                       const ExperimentConfig& cfg) {
  MfeMetrics m;
  m.h = resolve_step(cfg);
  const double h = m.h;
  const mfe::ModulationTable T = build_for(psi0, eps, scheme, h, cfg);
  m.entries = T.entry_count();
  m.reconstruct_error = h1_norm(mfe::reconstruct(T, 0.0) - psi0);
  m.n_hat = std::max<long long>(1, std::llround(1.0 / (eps * h)));
  const long long nh = m.n_hat;
  const std::vector<long long> samples = {0, nh / 4, nh / 2, 3 * nh / 4, nh - 1};

  const double M0 = mass(psi0, cfg.precision);
  double prev_E = 0.0;
  IntegrateOptions opt;
  opt.demote_cfl = true;
  opt.precision = cfg.precision;
  opt.record_stride = nh;
  opt.observer = [&](long long n, const ModeVector& u) {
    const double t = static_cast<double>(n) * h;
    const double E = mfe::almost_invariant(T, t, cfg.precision);
    m.invariant_vs_h1 = std::max(m.invariant_vs_h1, std::abs(E - h1_norm_sq(u, cfg.precision)));
    if (n > 0) m.invariant_step = std::max(m.invariant_step, std::abs(E - prev_E) / h);
    prev_E = E;
    m.mass_rel_dev = std::max(m.mass_rel_dev, rel(std::abs(mass(u, cfg.precision) - M0), M0));
    if (std::find(samples.begin(), samples.end(), n) != samples.end()) {
      const mfe::ModeSeq d = mfe::defect_residual(T, eps * t);
      m.defect_over_h = std::max(m.defect_over_h, mfe::norm_sigma(d, 1.0) / h);
      m.defect_K = std::max(m.defect_K, mfe::norm_sigma(mfe::rescale_Kop(d), 1.0));
    }
    if (n == nh) m.approx_error = h1_norm(u - mfe::reconstruct(T, t));
  };
  integrate(psi0, scheme, {h, cfg.K, cfg.N, cfg.c0}, nh, opt);
  return m;
}

ExperimentReport mfe_validation(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SplittingScheme scheme = resolve_scheme(cfg.scheme);
  ExperimentReport report = new_report("mfe", cfg);
  const std::size_t n = cfg.epsilons.size();
  std::vector<MfeMetrics> metrics(n);
  std::vector<std::string> errors(n);
  run_jobs(n, cfg.jobs, [&](std::size_t i) {
    const double eps = cfg.epsilons[i];
    try {
      metrics[i] = measure_mfe(make_initial(cfg.K, eps, cfg.profile), eps, scheme, cfg);
    } catch (const NumericalError& e) {
      errors[i] = e.what();
    }
  });

  std::vector<double> xs, d1, dk, ap, st, iv;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = metrics[i];
    json p{{"epsilon", cfg.epsilons[i]},
           {"h", m.h},
           {"n_hat", m.n_hat},
           {"entries", m.entries},
           {"reconstruct_error", m.reconstruct_error},
           {"defect_over_h", m.defect_over_h},
           {"defect_K", m.defect_K},
           {"approx_error", m.approx_error},
           {"invariant_step_over_h", m.invariant_step},
           {"invariant_vs_h1", m.invariant_vs_h1},
           {"max_mass_rel_dev", m.mass_rel_dev}};
    if (!errors[i].empty()) {
      p["error"] = errors[i];
      ++report.numerical_failures;
    } else {
      xs.push_back(cfg.epsilons[i]);
      d1.push_back(m.defect_over_h);
      dk.push_back(m.defect_K);
      ap.push_back(m.approx_error);
      st.push_back(m.invariant_step);
      iv.push_back(m.invariant_vs_h1);
    }
    report.points.push_back(std::move(p));
  }
  const double N = cfg.N;
  report.fits.push_back(make_fit("defect_norm_over_h", "epsilon", xs, d1, N + 1, N + 0.6, N + 1.4, true));
  report.fits.push_back(make_fit("defect_K_norm", "epsilon", xs, dk, N + 1, N + 0.6, N + 1.4, true));
  report.fits.push_back(make_fit("approximation_error", "epsilon", xs, ap, N, N - 0.4, N + 0.4, true));
  report.fits.push_back(make_fit("invariant_step_over_h", "epsilon", xs, st, N + 2, N + 1.6, N + 2.4, true));
  report.fits.push_back(make_fit("invariant_vs_h1", "epsilon", xs, iv, 3.0, 2.6, 3.4, true));
  return report;
}

// --- interface -----------------------------------------------------------

InterfaceMetrics measure_interface(const ModeVector& psi0, double eps, const SplittingScheme& scheme,
                                   const ExperimentConfig& cfg) {
  InterfaceMetrics m;
  m.h = resolve_step(cfg);
  const double h = m.h;
  const mfe::ModulationTable T0 = build_for(psi0, eps, scheme, h, cfg);
  m.n_hat = std::max<long long>(1, std::llround(1.0 / (eps * h)));
  m.t_interface = static_cast<double>(m.n_hat) * h;
  IntegrateOptions opt;
  opt.demote_cfl = true;
  opt.record_stride = m.n_hat;
  const ModeVector psi_hat = integrate(psi0, scheme, {h, cfg.K, cfg.N, cfg.c0}, m.n_hat, opt).final_state;

  mfe::BuildOptions bo;
  bo.c0 = cfg.c0;
  bo.demote_cfl = cfg.demote_cfl;
  const double tI = m.t_interface;
  const double tau = eps * tI;
  const double E0 = mfe::almost_invariant(T0, tI, cfg.precision);
  const mfe::ModeSeq z0 = mfe::z_absolute(T0, tau);

  mfe::RestartInfo info;
  const mfe::ModulationTable T1 = mfe::restart(T0, psi_hat, tI, &info, bo);
  m.interface_norm = info.interface_norm;
  m.norm_within_bound = info.norm_within_bound;
  m.invariant_jump = std::abs(E0 - mfe::almost_invariant(T1, tI, cfg.precision));
  m.z_jump = mfe::norm_sigma(z0 - mfe::z_absolute(T1, tau), 1.0);

  const mfe::ModulationTable T2 = mfe::restart(T0, mfe::reconstruct(T0, tI), tI, nullptr, bo);
  m.invariant_jump_reconstructed = std::abs(E0 - mfe::almost_invariant(T2, tI, cfg.precision));
  m.z_jump_reconstructed = mfe::norm_sigma(z0 - mfe::z_absolute(T2, tau), 1.0);
  return m;
}

ExperimentReport interface_study(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SplittingScheme scheme = resolve_scheme(cfg.scheme);
  ExperimentReport report = new_report("interface", cfg);
  const std::size_t n = cfg.epsilons.size();
  std::vector<InterfaceMetrics> metrics(n);
  std::vector<std::string> errors(n);
  run_jobs(n, cfg.jobs, [&](std::size_t i) {
    const double eps = cfg.epsilons[i];
    try {
      metrics[i] = measure_interface(make_initial(cfg.K, eps, cfg.profile), eps, scheme, cfg);
    } catch (const NumericalError& e) {
      errors[i] = e.what();
    }
  });

  std::vector<double> xs, ej, zj;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = metrics[i];
    json p{{"epsilon", cfg.epsilons[i]},
           {"h", m.h},
           {"n_hat", m.n_hat},
           {"t_interface", m.t_interface},
           {"interface_norm", m.interface_norm},
           {"interface_norm_over_eps", m.interface_norm / cfg.epsilons[i]},
           {"norm_within_bound", m.norm_within_bound},
           {"invariant_jump", m.invariant_jump},
           {"z_jump", m.z_jump},
           {"invariant_jump_reconstructed", m.invariant_jump_reconstructed},
           {"z_jump_reconstructed", m.z_jump_reconstructed}};
    if (!errors[i].empty()) {
      p["error"] = errors[i];
      ++report.numerical_failures;
    } else {
      xs.push_back(cfg.epsilons[i]);
      ej.push_back(m.invariant_jump);
      zj.push_back(m.z_jump);
      if (!m.norm_within_bound)
        report.warnings.push_back(
            fmt::format("eps = {}: ||psi^n^||_1 = {} exceeds 2 eps", cfg.epsilons[i], m.interface_norm));
    }
    report.points.push_back(std::move(p));
  }
  const double N = cfg.N;
  report.fits.push_back(make_fit("invariant_jump", "epsilon", xs, ej, N + 1, N + 0.7, std::nullopt, true));
  report.fits.push_back(make_fit("z_jump", "epsilon", xs, zj, N, N - 0.3, std::nullopt, true));
  return report;
}

}  // namespace nlsplit
