#include "nlsplit/report.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace nlsplit {

using nlohmann::json;

namespace {

json profile_to_json(const InitialProfile& p) {
  json j{{"name", p.name}};
  if (p.name == "random") j["seed"] = p.seed;
  if (p.name == "explicit") {
    json modes = json::array();
    for (const auto& m : p.modes) modes.push_back({m.j, m.value.real(), m.value.imag()});
    j["modes"] = modes;
  }
  return j;
}

InitialProfile profile_from_json(const json& j) {
  if (j.is_string()) return InitialProfile::named(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("config key 'profile': expected a string or an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "name" && it.key() != "seed" && it.key() != "modes")
      throw ValidationError(fmt::format("config key 'profile': unknown key '{}'", it.key()));
  const std::string name = j.value("name", j.contains("modes") ? "explicit" : "default");
  if (name == "explicit") {
    std::vector<ModeTerm> modes;
    for (const auto& m : j.at("modes")) {
      if (!m.is_array() || m.size() < 2 || m.size() > 3)
        throw ValidationError("config key 'profile.modes': entries must be [j, re] or [j, re, im]");
      modes.push_back({m[0].get<int>(), Complex(m[1].get<double>(), m.size() == 3 ? m[2].get<double>() : 0.0)});
    }
    return InitialProfile::explicit_modes(std::move(modes));
  }
  return InitialProfile::named(name, j.value("seed", std::uint64_t{0}));
}

template <class T>
T get_key(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("config key '{}': {}", key, e.what()));
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ValidationError(fmt::format("cannot create output directory '{}'", dir.string()));
}

std::string safe_name(std::string s) {
  for (char& c : s)
    if (c == '/' || c == ' ' || c == '\\') c = '_';
  return s;
}

}  // namespace

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scheme"] = c.scheme;
  j["schemes"] = c.schemes;
  j["K"] = c.K;
  j["N"] = c.N;
  j["c0"] = c.c0;
  j["epsilons"] = c.epsilons;
  j["h_rule"] = c.h_rule;
  if (c.h) j["h"] = *c.h;
  j["h_list"] = c.h_list;
  j["horizon_rule"] = c.horizon_rule;
  j["final_time"] = c.final_time;
  j["step_budget"] = c.step_budget;
  j["profile"] = profile_to_json(c.profile);
  j["precision"] = std::string(to_string(c.precision));
  j["demote_cfl"] = c.demote_cfl;
  j["max_series_rows"] = c.max_series_rows;
  j["residual_cap"] = c.residual_cap;
  return j;
}

ExperimentConfig config_from_json(const json& j, std::string* output_dir) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  static const std::set<std::string> known = {
      "scheme",     "schemes",      "K",          "N",           "c0",
      "epsilons",   "h",            "h_rule",     "h_list",      "horizon_rule",
      "final_time", "step_budget",  "profile",    "seed",        "precision",
      "output_dir", "demote_cfl",   "jobs",       "max_series_rows", "residual_cap"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw ValidationError(fmt::format("config: unknown key '{}'", it.key()));

  ExperimentConfig c;
  if (j.contains("scheme")) c.scheme = get_key<std::string>(j, "scheme");
  if (j.contains("schemes")) c.schemes = get_key<std::vector<std::string>>(j, "schemes");
  if (j.contains("K")) c.K = get_key<int>(j, "K");
  if (j.contains("N")) c.N = get_key<int>(j, "N");
  if (j.contains("c0")) c.c0 = get_key<double>(j, "c0");
  if (j.contains("epsilons")) c.epsilons = get_key<std::vector<double>>(j, "epsilons");
  if (j.contains("h")) {
    c.h = get_key<double>(j, "h");
    c.h_rule = "explicit";
  }
  if (j.contains("h_rule")) c.h_rule = get_key<std::string>(j, "h_rule");
  if (j.contains("h_list")) c.h_list = get_key<std::vector<double>>(j, "h_list");
  if (j.contains("horizon_rule")) c.horizon_rule = get_key<std::string>(j, "horizon_rule");
  if (j.contains("final_time")) c.final_time = get_key<double>(j, "final_time");
  if (j.contains("step_budget")) c.step_budget = get_key<long long>(j, "step_budget");
  if (j.contains("profile")) {
    try {
      c.profile = profile_from_json(j.at("profile"));
    } catch (const json::exception& e) {
      throw ValidationError(fmt::format("config key 'profile': {}", e.what()));
    }
  }
  if (j.contains("seed")) c.profile.seed = get_key<std::uint64_t>(j, "seed");
  if (j.contains("precision")) c.precision = parse_precision(get_key<std::string>(j, "precision"));
  if (j.contains("demote_cfl")) c.demote_cfl = get_key<bool>(j, "demote_cfl");
  if (j.contains("jobs")) c.jobs = get_key<int>(j, "jobs");
  if (j.contains("max_series_rows")) c.max_series_rows = get_key<long long>(j, "max_series_rows");
  if (j.contains("residual_cap")) c.residual_cap = get_key<double>(j, "residual_cap");
  if (output_dir && j.contains("output_dir")) *output_dir = get_key<std::string>(j, "output_dir");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::string* output_dir) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(fmt::format("{}:{}:{}: malformed JSON ({})", path.string(), line, col, e.what()));
  }
  return config_from_json(j, output_dir);
}

json report_to_json(const ExperimentReport& r) {
  json j;
  j["kind"] = r.kind;
  j["version"] = r.version;
  j["config"] = r.config;
  j["points"] = r.points;
  json fits = json::array();
  for (const auto& f : r.fits) {
    json e{{"name", f.name}, {"x", f.x_label}, {"x_values", f.x}, {"y_values", f.y}, {"gated", f.gated}};
    if (f.target) e["target"] = *f.target;
    if (f.lower) e["lower"] = *f.lower;
    if (f.upper) e["upper"] = *f.upper;
    if (f.fit) {
      e["slope"] = f.fit->slope;
      e["intercept"] = f.fit->intercept;
      e["residual"] = f.fit->residual;
      e["ci_low"] = std::isfinite(f.fit->ci_low) ? json(f.fit->ci_low) : json(nullptr);
      e["ci_high"] = std::isfinite(f.fit->ci_high) ? json(f.fit->ci_high) : json(nullptr);
      e["points_used"] = f.fit->points_used;
      e["points_excluded"] = f.fit->points_excluded;
    } else {
      e["error"] = f.error;
    }
    e["accepted"] = f.accepted(r.config.value("residual_cap", 0.5));
    fits.push_back(std::move(e));
  }
  j["fits"] = fits;
  json series = json::array();
  for (const auto& s : r.series)
    series.push_back({{"label", s.label}, {"epsilon", s.epsilon}, {"h", s.h}, {"rows", s.rows.size()}});
  j["series"] = series;
  j["warnings"] = r.warnings;
  j["numerical_failures"] = r.numerical_failures;
  return j;
}

std::string series_to_csv(const Series& s) {
  std::string out = std::string(kSeriesHeader) + "\n";
  for (const auto& r : s.rows)
    out += fmt::format("{},{},{},{},{},{}\n", format_number(r.t), format_number(r.mass),
                       format_number(r.h1_sq), format_number(r.energy), format_number(r.e_dev_scaled),
                       format_number(r.h1_dev_scaled));
  return out;
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& dir, const std::string& stem) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  const auto json_path = dir / (stem + ".json");
  write_file(json_path, report_to_json(report).dump(2) + "\n");
  written.push_back(json_path);
  for (const auto& s : report.series) {
    const auto p = dir / (stem + "_" + safe_name(s.label) + ".csv");
    write_file(p, series_to_csv(s));
    written.push_back(p);
  }
  return written;
}

std::vector<std::filesystem::path> emit_plot_data(const ExperimentReport& report,
                                                  const std::filesystem::path& dir, const std::string& stem) {
  ensure_dir(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& s : report.series) {
    std::string out = "# t e_dev_scaled\n";
    for (const auto& r : s.rows) out += format_number(r.t) + " " + format_number(r.e_dev_scaled) + "\n";
    const auto p = dir / (stem + "_" + safe_name(s.label) + ".dat");
    write_file(p, out);
    written.push_back(p);
  }
  std::string fits;
  bool first = true;
  for (const auto& f : report.fits) {
    if (!first) fits += "\n";
    first = false;
    fits += fmt::format("# {} x={} slope={} intercept={}\n", f.name, f.x_label,
                        f.fit ? format_number(f.fit->slope) : "nan",
                        f.fit ? format_number(f.fit->intercept) : "nan");
    fits += "# x y y_fit\n";
    for (std::size_t i = 0; i < f.x.size(); ++i) {
      const double yf = f.fit && f.x[i] > 0.0 ? std::exp(f.fit->intercept + f.fit->slope * std::log(f.x[i]))
                                              : std::nan("");
      fits += format_number(f.x[i]) + " " + format_number(f.y[i]) + " " + format_number(yf) + "\n";
    }
  }
  const auto p = dir / (stem + "_fits.dat");
  write_file(p, fits);
  written.push_back(p);
  return written;
}

}  // namespace nlsplit
