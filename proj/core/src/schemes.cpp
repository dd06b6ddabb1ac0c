#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nlsplit/splitting.hpp"

namespace nlsplit {

namespace {

using nlohmann::json;

SplittingScheme blanes_moan_4() {
  const double a1 = 0.0792036964311957;
  const double a2 = 0.353172906049774;
  const double a3 = -0.0420650803577195;
  const double a4 = 1.0 - 2.0 * (a1 + a2 + a3);
  const double b1 = 0.209515106613362;
  const double b2 = -0.143851773179818;
  const double b3 = 0.5 - b1 - b2;
  return {"blanes_moan_4", {a1, a2, a3, a4, a3, a2, a1}, {b1, b2, b3, b3, b2, b1, 0.0}, 4};
}

}  // namespace

SplittingScheme compose_strang(std::string name, const std::vector<double>& weights,
                               int declared_order) {
  SplittingScheme s;
  s.name = std::move(name);
  s.declared_order = declared_order;
  const std::size_t m = weights.size();
  s.a.resize(m + 1);
  s.b.resize(m + 1);
  s.a[0] = 0.5 * weights[0];
  for (std::size_t r = 1; r < m; ++r) s.a[r] = 0.5 * (weights[r - 1] + weights[r]);
  s.a[m] = 0.5 * weights[m - 1];
  for (std::size_t r = 0; r < m; ++r) s.b[r] = weights[r];
  s.b[m] = 0.0;
  return s;
}

std::vector<SplittingScheme> builtin_schemes() {
  std::vector<SplittingScheme> out;
  out.push_back({"lie_trotter_1", {1.0}, {1.0}, 1});
  out.push_back({"lie_trotter_2", {0.0, 1.0}, {1.0, 0.0}, 1});
  out.push_back({"strang_1", {0.5, 0.5}, {1.0, 0.0}, 2});
  out.push_back({"strang_2", {0.0, 1.0}, {0.5, 0.5}, 2});

  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double w0 = 1.0 - 2.0 * w1;
  out.push_back(compose_strang("yoshida_4", {w1, w0, w1}, 4));

  const double p = 1.0 / (4.0 - std::cbrt(4.0));
  out.push_back(compose_strang("suzuki_4", {p, p, 1.0 - 4.0 * p, p, p}, 4));

  out.push_back(blanes_moan_4());
  return out;
}

std::optional<SplittingScheme> find_builtin_scheme(const std::string& name) {
  for (auto& s : builtin_schemes())
    if (s.name == name) return s;
  if (name == "strang") return find_builtin_scheme("strang_1");
  if (name == "lie_trotter") return find_builtin_scheme("lie_trotter_1");
  if (name == "yoshida") return find_builtin_scheme("yoshida_4");
  return std::nullopt;
}

SplittingScheme scheme_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("scheme file: {}", e.what()));
  }
  if (!j.is_object()) throw ValidationError("scheme file: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (key != "name" && key != "a" && key != "b" && key != "declared_order")
      throw ValidationError(fmt::format("scheme file: unknown key '{}'", key));
  }
  SplittingScheme s;
  try {
    s.name = j.at("name").get<std::string>();
    s.a = j.at("a").get<std::vector<double>>();
    s.b = j.at("b").get<std::vector<double>>();
    s.declared_order = j.at("declared_order").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("scheme file: {}", e.what()));
  }
  return s;
}

std::string scheme_to_json(const SplittingScheme& s) {
  json j;
  j["name"] = s.name;
  j["a"] = s.a;
  j["b"] = s.b;
  j["declared_order"] = s.declared_order;
  return j.dump(2) + "\n";
}

SplittingScheme load_scheme_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read scheme file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return scheme_from_json(ss.str());
}

SplittingScheme resolve_scheme(const std::string& name_or_path) {
  if (name_or_path.size() > 5 && name_or_path.ends_with(".json"))
    return load_scheme_file(name_or_path);
  if (auto s = find_builtin_scheme(name_or_path)) return *s;
  throw ValidationError(fmt::format("unknown scheme '{}'", name_or_path));
}

}  // namespace nlsplit
