#include "nlsplit/mfe/modulation.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace nlsplit::mfe {

namespace {

Complex expi(double x) { return {std::cos(x), std::sin(x)}; }

double factorial(int n) {
  double f = 1.0;
  for (int q = 2; q <= n; ++q) f *= q;
  return f;
}

}  // namespace

std::size_t ModulationTable::entry_count() const {
  std::size_t n = 0;
  for (int p = 1; p <= z.max_grade(); ++p) n += z.grade(p).size();
  return n;
}

ModulationTable build_modulation(const ModeVector& psi0, double epsilon, int N,
                                 const SplittingScheme& scheme, double h,
                                 const BuildOptions& options, double t_offset) {
  const int K = psi0.cutoff();
  if (!(epsilon > 0.0)) throw ValidationError("build_modulation: epsilon must be positive");
  const SchemeCheck sc = validate_scheme(scheme);
  if (!sc.ok) throw ValidationError(sc.message);
  const CflCheck cfl = validate_cfl({h, K, N, options.c0});
  if (!cfl.ok && !options.demote_cfl) throw ValidationError("CFL violation: " + cfl.message);

  ModulationTable T;
  T.K = K;
  T.N = N;
  T.epsilon = epsilon;
  T.t_offset = t_offset;
  T.h = h;
  T.scheme = scheme;
  T.z = GradedSeq(K, N);

  const long long K2 = static_cast<long long>(K) * K;
  for (int p = 1; p <= N; ++p) {
    const GradedSeq F = op_F(T.z, scheme, h, std::min(p + 1, N));
    PolySeq& zp = T.z.grade(p);

    // (a)/(b): off-resonant entries.
    std::set<SeqKey> keys;
    for (const auto& [key, v] : F.grade(p).entries()) keys.insert(key);
    for (int l = 1; l <= p - 1; ++l)
      for (const auto& [key, v] : T.z.grade(p - l).entries()) keys.insert(key);
    for (const auto& key : keys) {
      const auto [j, k] = key;
      const long long jj = static_cast<long long>(j) * j;
      if (k == jj || std::llabs(k) > p * K2) continue;
      TauPolynomial rhs = F.grade(p).at(j, k);
      TauPolynomial lower;
      for (int l = 1; l <= p - 1; ++l)
        lower += (std::pow(h, l) / factorial(l)) * T.z.grade(p - l).at(j, k).derivative(l);
      rhs -= expi(-static_cast<double>(k) * h) * lower;
      const Complex divisor = expi(-static_cast<double>(k) * h) - expi(-static_cast<double>(jj) * h);
      if (std::abs(divisor) < options.divisor_guard)
        throw NumericalError(fmt::format(
            "build_modulation: small divisor |e^(-ikh) - e^(-ij^2 h)| = {:.3g} at j = {}, k = {}, p = {}",
            std::abs(divisor), j, k, p));
      zp.set(j, k, (1.0 / divisor) * rhs);
    }

    // (c)/(d): resonant entries k = j^2.
    for (int j = -K; j <= K - 1; ++j) {
      const long long jj = static_cast<long long>(j) * j;
      Complex c0 = p == 1 ? psi0[j] / epsilon : Complex(0.0, 0.0);
      for (auto it = zp.entries().lower_bound({j, std::numeric_limits<long long>::min()});
           it != zp.entries().end() && it->first.first == j; ++it)
        if (it->first.second != jj) c0 -= it->second(0.0);

      TauPolynomial derivative;
      if (p <= N - 1) {
        TauPolynomial rhs = expi(static_cast<double>(jj) * h) * F.grade(p + 1).at(j, jj);
        for (int l = 2; l <= p; ++l)
          rhs -= (std::pow(h, l) / factorial(l)) * T.z.grade(p + 1 - l).at(j, jj).derivative(l);
        derivative = (1.0 / h) * rhs;
      }
      zp.set(j, jj, derivative.antiderivative(c0));
    }

    for (const auto& [key, poly] : zp.entries())
      if (poly.degree() > p - 1)
        throw std::logic_error(fmt::format("build_modulation: degree {} > {} at j = {}, k = {}, p = {}",
                                           poly.degree(), p - 1, key.first, key.second, p));
  }
  return T;
}

ModulationTable restart(const ModulationTable& prev, const ModeVector& psi_at_interface,
                        double t_interface, RestartInfo* info, const BuildOptions& options) {
  if (info) {
    info->interface_norm = h1_norm(psi_at_interface);
    info->norm_within_bound = info->interface_norm <= 2.0 * prev.epsilon;
  }
  return build_modulation(psi_at_interface, prev.epsilon, prev.N, prev.scheme, prev.h, options,
                          t_interface);
}

ModeSeq z_local(const ModulationTable& T, double sigma) {
  ModeSeq out(T.K);
  double eps_p = 1.0;
  for (int p = 1; p <= T.z.max_grade(); ++p) {
    eps_p *= T.epsilon;
    for (const auto& [key, poly] : T.z.grade(p).entries())
      out.add(key.first, key.second, eps_p * poly(sigma));
  }
  return out;
}

ModeSeq z_absolute(const ModulationTable& T, double tau) {
  ModeSeq out = z_local(T, tau - T.epsilon * T.t_offset);
  if (T.t_offset != 0.0)
    for (auto& [key, v] : out.entries()) v *= std::conj(phase_minus(key.second, T.t_offset));
  return out;
}

ModeVector reconstruct(const ModulationTable& T, double t) {
  const long double dt = static_cast<long double>(t) - static_cast<long double>(T.t_offset);
  return collapse(z_local(T, T.local_time(t)), dt);
}

double almost_invariant(const ModulationTable& T, double t, Precision p) {
  return almost_invariant(z_local(T, T.local_time(t)), p);
}

ModeSeq defect_residual(const ModulationTable& T, double tau) {
  const double sigma = tau - T.epsilon * T.t_offset;
  const ModeSeq v = z_local(T, sigma);
  ModeSeq d = compose_collocated(v, T.scheme, T.h, collocation_length(T.K, T.N));
  const ModeSeq next = z_local(T, sigma + T.epsilon * T.h);
  for (const auto& [key, value] : next.entries())
    d.add(key.first, key.second, -expi(-static_cast<double>(key.second) * T.h) * value);
  return d;
}

ModeSeq defect_series(const ModulationTable& T, double tau, int max_grade) {
  const double sigma = tau - T.epsilon * T.t_offset;
  const double eps = T.epsilon;
  GradedSeq v(T.K, std::max(T.N, max_grade - 2));
  for (int p = 1; p <= T.N; ++p) v.grade(p) = T.z.grade(p);
  const GradedSeq F = op_F(v, T.scheme, T.h, max_grade);

  ModeSeq d(T.K);
  for (int p = T.N + 1; p <= max_grade; ++p) {
    const double w = std::pow(eps, p);
    for (const auto& [key, poly] : F.grade(p).entries()) d.add(key.first, key.second, w * poly(sigma));
  }
  for (int l = 1; l <= T.N - 1; ++l) {
    const double wl = std::pow(eps * T.h, l) / factorial(l);
    for (int p = T.N - l + 1; p <= T.N; ++p) {
      const double w = wl * std::pow(eps, p);
      for (const auto& [key, poly] : T.z.grade(p).entries()) {
        const Complex val = poly.derivative(l)(sigma);
        if (val != Complex(0.0, 0.0))
          d.add(key.first, key.second, -w * expi(-static_cast<double>(key.second) * T.h) * val);
      }
    }
  }
  return d;
}

std::string table_to_json(const ModulationTable& T) {
  using nlohmann::json;
  json j;
  j["K"] = T.K;
  j["N"] = T.N;
  j["epsilon"] = T.epsilon;
  j["t_offset"] = T.t_offset;
  j["h"] = T.h;
  j["scheme"] = json::parse(scheme_to_json(T.scheme));
  json entries = json::array();
  for (int p = 1; p <= T.z.max_grade(); ++p) {
    for (const auto& [key, poly] : T.z.grade(p).entries()) {
      json coeffs = json::array();
      for (Complex c : poly.coefficients()) coeffs.push_back({c.real(), c.imag()});
      entries.push_back({{"j", key.first}, {"k", key.second}, {"p", p}, {"poly", coeffs}});
    }
  }
  j["entries"] = entries;
  return j.dump(1) + "\n";
}

ModulationTable table_from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    ModulationTable T;
    T.K = j.at("K").get<int>();
    T.N = j.at("N").get<int>();
    T.epsilon = j.at("epsilon").get<double>();
    T.t_offset = j.at("t_offset").get<double>();
    T.h = j.at("h").get<double>();
    T.scheme = scheme_from_json(j.at("scheme").dump());
    T.z = GradedSeq(T.K, T.N);
    for (const auto& e : j.at("entries")) {
      std::vector<Complex> coeffs;
      for (const auto& c : e.at("poly")) coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      const int p = e.at("p").get<int>();
      if (p < 1 || p > T.N) throw ValidationError("modulation table: grade out of range");
      T.z.grade(p).set(e.at("j").get<int>(), e.at("k").get<long long>(), TauPolynomial(std::move(coeffs)));
    }
    return T;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("modulation table: {}", e.what()));
  }
}

}  // namespace nlsplit::mfe
