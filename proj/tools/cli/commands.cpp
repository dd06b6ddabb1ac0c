#include "cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nlsplit/harness.hpp"
#include "nlsplit/report.hpp"
#include "nlsplit/splitting.hpp"

namespace nlsplit::cli {

using nlohmann::json;

namespace {

// Flag overrides, applied on top of the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::string> scheme;
  std::vector<std::string> schemes;
  std::optional<int> K;
  std::optional<int> N;
  std::optional<double> c0;
  std::vector<double> epsilons;
  std::optional<double> h;
  std::vector<double> h_list;
  std::optional<std::string> horizon_rule;
  std::optional<double> final_time;
  std::optional<long long> step_budget;
  std::optional<std::string> profile;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> precision;
  std::optional<int> jobs;
  bool demote_cfl = false;
  std::optional<std::string> output_dir;
  std::optional<std::string> stem;
  bool no_plot = false;
  bool quiet = false;
};

struct Resolved {
  ExperimentConfig cfg;
  std::filesystem::path output_dir;
  std::string stem;
};

// Defaults that differ per subcommand and only apply when neither the
// config file nor a flag sets the key.
using CommandDefaults = std::function<void(ExperimentConfig&, const std::set<std::string>& given)>;

std::set<std::string> keys_in_file(const std::string& path) {
  std::set<std::string> keys;
  if (path.empty()) return keys;
  std::ifstream in(path);
  const json j = json::parse(in, nullptr, false);
  if (j.is_object())
    for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
  return keys;
}

Resolved resolve(const Overrides& o, const std::string& default_stem, const CommandDefaults& defaults) {
  Resolved r;
  std::string cfg_out;
  if (!o.config_path.empty()) r.cfg = load_config(o.config_path, &cfg_out);
  std::set<std::string> given = keys_in_file(o.config_path);

  ExperimentConfig& c = r.cfg;
  if (o.scheme) c.scheme = *o.scheme, given.insert("scheme");
  if (!o.schemes.empty()) c.schemes = o.schemes, given.insert("schemes");
  if (o.K) c.K = *o.K, given.insert("K");
  if (o.N) c.N = *o.N, given.insert("N");
  if (o.c0) c.c0 = *o.c0, given.insert("c0");
  if (!o.epsilons.empty()) c.epsilons = o.epsilons, given.insert("epsilons");
  if (o.h) {
    c.h = *o.h;
    c.h_rule = "explicit";
    given.insert("h");
  }
  if (!o.h_list.empty()) c.h_list = o.h_list, given.insert("h_list");
  if (o.horizon_rule) c.horizon_rule = *o.horizon_rule, given.insert("horizon_rule");
  if (o.final_time) c.final_time = *o.final_time, given.insert("final_time");
  if (o.step_budget) c.step_budget = *o.step_budget, given.insert("step_budget");
  if (o.profile) c.profile = InitialProfile::named(*o.profile, c.profile.seed), given.insert("profile");
  if (o.seed) c.profile.seed = *o.seed, given.insert("seed");
  if (o.precision) c.precision = parse_precision(*o.precision), given.insert("precision");
  if (o.jobs) c.jobs = *o.jobs, given.insert("jobs");
  if (o.demote_cfl) c.demote_cfl = true;
  if (defaults) defaults(c, given);

  // Output directory: flag, then environment, then config, then default.
  std::string dir = "results";
  if (!cfg_out.empty()) dir = cfg_out;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) dir = env;
  if (o.output_dir) dir = *o.output_dir;
  r.output_dir = dir;
  r.stem = o.stem.value_or(default_stem);
  validate_config(c);
  return r;
}

void add_common_options(CLI::App* app, Overrides& o) {
  const ExperimentConfig d;
  app->add_option("-c,--config", o.config_path, "JSON config file (flags override its keys)")
      ->check(CLI::ExistingFile);
  app->add_option("--scheme", o.scheme, fmt::format("built-in scheme name or scheme JSON file [{}]", d.scheme));
  app->add_option("--K", o.K, fmt::format("Fourier cutoff, modes -K..K-1 [{}]", d.K));
  app->add_option("--N", o.N, fmt::format("expansion order N >= 2 [{}]", d.N));
  app->add_option("--c0", o.c0, fmt::format("CFL constant, 0 < c0 < 2pi [{}]", d.c0));
  app->add_option("--eps", o.epsilons, "amplitudes, strictly decreasing [0.1 0.05 0.025]")->delimiter(',');
  app->add_option("--step", o.h, "explicit step size [largest step allowed by the CFL condition]");
  app->add_option("--horizon-rule", o.horizon_rule,
                  fmt::format("drift | inverse_eps | theorem | fixed [{}]", d.horizon_rule));
  app->add_option("--final-time", o.final_time,
                  fmt::format("horizon for the fixed rule and the order study [{}]", d.final_time));
  app->add_option("--step-budget", o.step_budget, fmt::format("max steps per point [{}]", d.step_budget));
  app->add_option("--profile", o.profile, "initial profile: default | plane_wave | random [default]");
  app->add_option("--seed", o.seed, "seed for the random profile [0]");
  app->add_option("--precision", o.precision, "observable summation: plain | compensated [plain]");
  app->add_option("--jobs", o.jobs, "parallel parameter points [1]");
  app->add_flag("--demote-cfl", o.demote_cfl, "turn CFL violations into warnings");
  app->add_option("-o,--output-dir", o.output_dir,
                  fmt::format("output directory (also {}) [results]", kOutputDirEnv));
  app->add_option("--stem", o.stem, "file name stem for written artifacts [subcommand name]");
  app->add_flag("--no-plot", o.no_plot, "skip plot data files");
  app->add_flag("-q,--quiet", o.quiet, "only print errors");
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:g}", *v) : "-"; }

void print_report(const ExperimentReport& rep, const ExperimentConfig& cfg, std::ostream& out) {
  out << fmt::format("{:<34} {:>8} {:>9} {:>19} {:>13} {}\n", "fit", "slope", "residual", "95% CI", "window",
                     "status");
  for (const auto& f : rep.fits) {
    std::string status;
    if (!f.fit)
      status = "no fit (" + f.error + ")";
    else if (!f.gated)
      status = "reported";
    else
      status = f.accepted(cfg.residual_cap) ? "pass" : "FAIL";
    if (!f.fit) {
      out << fmt::format("{:<34} {:>8} {:>9} {:>19} {:>13} {}\n", f.name, "-", "-", "-",
                         fmt::format("[{},{}]", fmt_opt(f.lower), fmt_opt(f.upper)), status);
      continue;
    }
    out << fmt::format("{:<34} {:>8.3f} {:>9.2e} {:>19} {:>13} {}\n", f.name, f.fit->slope, f.fit->residual,
                       fmt::format("[{:.3g},{:.3g}]", f.fit->ci_low, f.fit->ci_high),
                       fmt::format("[{},{}]", fmt_opt(f.lower), fmt_opt(f.upper)), status);
  }
}

int finish_report(const ExperimentReport& rep, const Resolved& r, const Overrides& o, std::ostream& out,
                  std::ostream& err) {
  auto files = write_report(rep, r.output_dir, r.stem);
  if (!o.no_plot) {
    auto plots = emit_plot_data(rep, r.output_dir, r.stem);
    files.insert(files.end(), plots.begin(), plots.end());
  }
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  if (!o.quiet) {
    print_report(rep, r.cfg, out);
    for (const auto& f : files) out << "wrote " << f.string() << "\n";
  }
  if (rep.numerical_failures > 0) {
    for (const auto& p : rep.points)
      if (p.is_object() && p.contains("error")) err << "numerical failure: " << p["error"].get<std::string>() << "\n";
    err << fmt::format("{} parameter point(s) aborted\n", rep.numerical_failures);
    return kExitNumerical;
  }
  return kExitOk;
}

void mfe_defaults(ExperimentConfig& c, const std::set<std::string>& given) {
  if (!given.contains("K")) c.K = 8;
  if (!given.contains("epsilons")) c.epsilons = {0.2, 0.1, 0.05};
}

void order_defaults(ExperimentConfig& c, const std::set<std::string>& given) {
  if (!given.contains("epsilons")) c.epsilons = {0.1};
}

// --- run ----------------------------------------------------------------

int cmd_run(const Overrides& o, std::optional<long long> steps_flag, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o, "run", nullptr);
  const ExperimentConfig& c = r.cfg;
  const SplittingScheme scheme = resolve_scheme(c.scheme);
  const double eps = c.epsilons.front();
  const double h = resolve_step(c);
  long long steps = 0;
  if (steps_flag) {
    if (*steps_flag < 0) throw ValidationError("--steps must be >= 0");
    steps = *steps_flag;
  } else {
    steps = std::min(c.step_budget, static_cast<long long>(std::ceil(resolve_horizon(c, eps) / h - 1e-9)));
  }
  const ModeVector psi0 = make_initial(c.K, eps, c.profile);

  IntegrateOptions opt;
  opt.demote_cfl = c.demote_cfl;
  opt.precision = c.precision;
  opt.record_stride = std::max<long long>(1, (steps + c.max_series_rows - 1) / std::max<long long>(1, c.max_series_rows));
  const Trajectory traj = integrate(psi0, scheme, {h, c.K, c.N, c.c0}, steps, opt);

  Series s{fmt::format("eps_{}", eps), eps, h, {}};
  const auto& first = traj.records.front();
  double max_e = 0.0, max_h1 = 0.0, max_mass = 0.0;
  for (const auto& rec : traj.records) {
    SeriesRow row{rec.t, rec.mass, rec.h1_sq, rec.energy, std::abs(rec.energy - first.energy) / (eps * eps),
                  std::abs(rec.h1_sq - first.h1_sq) / (eps * eps)};
    max_e = std::max(max_e, row.e_dev_scaled);
    max_h1 = std::max(max_h1, row.h1_dev_scaled);
    if (first.mass > 0.0) max_mass = std::max(max_mass, std::abs(rec.mass - first.mass) / first.mass);
    s.rows.push_back(row);
  }

  ExperimentReport rep;
  rep.kind = "run";
  rep.version = version();
  rep.config = config_to_json(c);
  rep.points.push_back(json{{"scheme", scheme.name},
                            {"epsilon", eps},
                            {"h", h},
                            {"steps", steps},
                            {"final_time", static_cast<double>(steps) * h},
                            {"max_e_dev_scaled", max_e},
                            {"max_h1_dev_scaled", max_h1},
                            {"max_mass_rel_dev", max_mass}});
  rep.series.push_back(std::move(s));
  rep.warnings = traj.warnings;
  return finish_report(rep, r, o, out, err);
}

// --- schemes ------------------------------------------------------------

int cmd_schemes(const std::vector<std::string>& files, bool as_json, std::ostream& out) {
  std::vector<SplittingScheme> list = builtin_schemes();
  for (const auto& f : files) list.push_back(load_scheme_file(f));
  bool all_ok = true;
  json arr = json::array();
  if (!as_json) out << fmt::format("{:<16} {:>5} {:>6}  {:<10} {}\n", "name", "order", "stages", "status", "coefficients");
  for (const auto& s : list) {
    const SchemeCheck chk = validate_scheme(s);
    all_ok = all_ok && chk.ok;
    if (as_json) {
      json j = json::parse(scheme_to_json(s));
      j["consistent"] = chk.ok;
      arr.push_back(std::move(j));
      continue;
    }
    out << fmt::format("{:<16} {:>5} {:>6}  {:<10} a = [{}]\n", s.name, s.declared_order, s.stages(),
                       chk.ok ? "ok" : "INVALID", fmt::join(s.a, ", "));
    out << fmt::format("{:<41} b = [{}]\n", "", fmt::join(s.b, ", "));
    if (!chk.ok) out << fmt::format("{:<41} {}\n", "", chk.message);
  }
  if (as_json) out << arr.dump(2) << "\n";
  return all_ok ? kExitOk : kExitValidation;
}

// --- validate -----------------------------------------------------------

int cmd_validate(const Overrides& o, std::ostream& out) {
  struct Row {
    std::string check;
    bool ok;
    std::string detail;
  };
  std::vector<Row> rows;
  auto table = [&] {
    out << fmt::format("{:<26} {:<6} {}\n", "check", "status", "detail");
    bool ok = true;
    for (const auto& r : rows) {
      out << fmt::format("{:<26} {:<6} {}\n", r.check, r.ok ? "ok" : "FAIL", r.detail);
      ok = ok && r.ok;
    }
    return ok ? kExitOk : kExitValidation;
  };

  Resolved r;
  try {
    r = resolve(o, "validate", nullptr);
    rows.push_back({"config", true, o.config_path.empty() ? "(flags only)" : o.config_path});
  } catch (const std::exception& e) {
    rows.push_back({"config", false, e.what()});
    return table();
  }
  const ExperimentConfig& c = r.cfg;

  std::vector<std::string> names{c.scheme};
  for (const auto& s : c.schemes)
    if (s != c.scheme) names.push_back(s);
  for (const auto& name : names) {
    try {
      const SplittingScheme s = resolve_scheme(name);
      const SchemeCheck chk = validate_scheme(s);
      rows.push_back({"scheme " + s.name, chk.ok,
                      chk.ok ? fmt::format("sum a = {:.15g}, sum b = {:.15g}", chk.sum_a, chk.sum_b)
                             : chk.message});
    } catch (const std::exception& e) {
      rows.push_back({"scheme " + name, false, e.what()});
    }
  }

  const double h = resolve_step(c);
  const CflCheck cfl = validate_cfl({h, c.K, c.N, c.c0});
  if (cfl.ok)
    rows.push_back({"cfl", true, fmt::format("(N+1)hK^2 = {:.6g} <= c0 = {:g} at h = {:.6g}", cfl.product, c.c0, h)});
  else
    rows.push_back({"cfl", c.demote_cfl, c.demote_cfl ? cfl.message + " (demoted)" : cfl.message});

  try {
    const ModeVector psi0 = make_initial(c.K, c.epsilons.front(), c.profile);
    rows.push_back({"profile " + c.profile.name, true, fmt::format("||psi0||_1 = {:.6g}", h1_norm(psi0))});
  } catch (const std::exception& e) {
    rows.push_back({"profile " + c.profile.name, false, e.what()});
  }

  for (double eps : c.epsilons) {
    const double horizon = resolve_horizon(c, eps);
    const long long need = static_cast<long long>(std::ceil(horizon / h - 1e-9));
    const bool capped = need > c.step_budget;
    rows.push_back({fmt::format("horizon eps = {:g}", eps), true,
                    fmt::format("t = {:.6g}, {} steps{}", horizon, std::min(need, c.step_budget),
                                capped ? " (capped by step budget)" : "")});
  }
  return table();
}

template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Splitting integrators for the cubic Schroedinger equation on the torus, "
               "with modulated Fourier expansion diagnostics",
               "nlsplit"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  Overrides o;
  std::optional<long long> steps;
  std::vector<std::string> scheme_files;
  bool schemes_json = false;

  auto* run_cmd = app.add_subcommand("run", "single integration at the first eps; writes a JSON summary and a CSV series");
  add_common_options(run_cmd, o);
  run_cmd->add_option("--steps", steps, "number of steps [from the horizon rule]");

  auto* drift = app.add_subcommand("drift", "energy and H1 drift against eps");
  add_common_options(drift, o);
  auto* order = app.add_subcommand("order", "convergence order study against h at the first eps");
  add_common_options(order, o);
  order->add_option("--schemes", o.schemes, "schemes to study [all built-ins]")->delimiter(',');
  order->add_option("--h-list", o.h_list, "step sizes [0.02,0.01,0.005,0.0025]")->delimiter(',');
  auto* mfe = app.add_subcommand("mfe-verify", "modulated Fourier expansion checks against eps (K = 8, eps = 0.2,0.1,0.05 unless set)");
  add_common_options(mfe, o);
  auto* iface = app.add_subcommand("interface", "restart of the expansion at t = 1/eps (defaults as mfe-verify)");
  add_common_options(iface, o);
  auto* schemes = app.add_subcommand("schemes", "list built-in schemes and check scheme files");
  schemes->add_option("files", scheme_files, "scheme JSON files to check")->check(CLI::ExistingFile);
  schemes->add_flag("--json", schemes_json, "print JSON records");
  auto* validate = app.add_subcommand("validate", "dry-run all validations and print a summary table");
  add_common_options(validate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  return guarded(err, [&]() -> int {
    if (*run_cmd) return cmd_run(o, steps, out, err);
    if (*drift) {
      const Resolved r = resolve(o, "drift", nullptr);
      return finish_report(drift_experiment(r.cfg), r, o, out, err);
    }
    if (*order) {
      const Resolved r = resolve(o, "order", order_defaults);
      return finish_report(order_study(r.cfg), r, o, out, err);
    }
    if (*mfe) {
      const Resolved r = resolve(o, "mfe", mfe_defaults);
      return finish_report(mfe_validation(r.cfg), r, o, out, err);
    }
    if (*iface) {
      const Resolved r = resolve(o, "interface", mfe_defaults);
      return finish_report(interface_study(r.cfg), r, o, out, err);
    }
    if (*schemes) return cmd_schemes(scheme_files, schemes_json, out);
    if (*validate) return cmd_validate(o, out);
    return kExitValidation;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"nlsplit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace nlsplit::cli
