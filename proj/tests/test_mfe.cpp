#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nlsplit/mfe/graded.hpp"
#include "nlsplit/mfe/modulation.hpp"
#include "oracles.hpp"

using namespace nlsplit;
using namespace nlsplit::mfe;

namespace {

SplittingScheme builtin(const std::string& name) { return *find_builtin_scheme(name); }

ModeSeq random_seq(int K, int kmax, double norm1, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ModeSeq x(K);
  for (int j = -K; j < K; ++j)
    for (int k = -kmax; k <= kmax; ++k) x.set(j, k, Complex(g(rng), g(rng)));
  x *= Complex(norm1 / norm_sigma(x, 1.0), 0.0);
  return x;
}

GradedSeq random_graded(int K, int P, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  GradedSeq v(K, P);
  for (int p = 1; p <= P; ++p)
    for (int j = -K; j < K; ++j)
      for (long long k = -1; k <= 1; ++k) {
        std::vector<Complex> c(static_cast<std::size_t>(p));
        for (auto& x : c) x = Complex(u(rng), u(rng));
        v.grade(p).set(j, k + j * j, TauPolynomial(c));
      }
  return v;
}

double max_abs_diff(const ModeSeq& a, const ModeSeq& b) { return norm_sigma(a - b, 0.0); }

}  // namespace

TEST(TauPolynomial, CalculusAndArithmetic) {
  const TauPolynomial p({Complex(1, 0), Complex(0, 2), Complex(3, 0)});  // 1 + 2i t + 3 t^2
  EXPECT_EQ(p.degree(), 2);
  EXPECT_EQ(p(2.0), Complex(13, 4));
  EXPECT_EQ(p.derivative()(1.0), Complex(6, 2));
  EXPECT_EQ(p.derivative(3).degree(), -1);
  const TauPolynomial q = p.antiderivative(Complex(5, 0));
  EXPECT_EQ(q(0.0), Complex(5, 0));
  EXPECT_EQ(q.derivative(), p);
  EXPECT_EQ((p * p).degree(), 4);
  EXPECT_EQ((p * p)(0.5), p(0.5) * p(0.5));
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ(p.conj()(1.0), std::conj(p(1.0)));
  EXPECT_EQ(TauPolynomial({Complex(1, 0), Complex(0, 0)}).degree(), 0);
}

TEST(Sequences, ConvolutionAliasesInJ) {
  ModeSeq x(2), y(2);
  x.set(1, 3, Complex(2, 0));
  y.set(1, -1, Complex(0, 1));
  const ModeSeq z = conv(x, y);
  // j = 1 + 1 = 2 is identified with -2 for K = 2.
  EXPECT_EQ(z.size(), 1u);
  EXPECT_EQ(z.at(-2, 2), Complex(0, 2));
  const ModeSeq b = bar(x);
  EXPECT_EQ(b.at(-1, -3), Complex(2, 0));
  ModeSeq e(2);
  e.set(-2, 1, Complex(0, 1));
  EXPECT_EQ(bar(e).at(-2, -1), Complex(0, -1));
}

TEST(Sequences, SeriesFlowMatchesModeFlowOnConstantSequences) {
  // With k = 0 only, Phi_B on sequences is the grid flow on the j index.
  const ModeVector u = oracle::random_modes(4, 0.5, 21);
  ModeSeq x(4);
  for (int j = -4; j < 4; ++j) x.set(j, 0, u[j]);
  const ModeSeq y = phi_B_series(x, 0.01);
  const ModeVector ref = flow_B(u, 0.01);
  for (int j = -4; j < 4; ++j) EXPECT_NEAR(std::abs(y.at(j, 0) - ref[j]), 0.0, 1e-15);
}

TEST(Sequences, CollocatedCompositionMatchesSeries) {
  const ModeSeq x = random_seq(3, 4, 0.4, 5);
  const double h = 0.05;
  for (const char* name : {"lie_trotter_1", "strang_2"}) {
    const auto s = builtin(name);
    ModeSeq ref = x;
    for (int r = s.stages() - 1; r >= 0; --r) ref = phi_A(phi_B_series(ref, s.b[r] * h), s.a[r] * h);
    const ModeSeq col = compose_collocated(x, s, h, 256);
    EXPECT_LT(max_abs_diff(col, ref), 1e-13) << name;
  }
}

TEST(Invariant, LinearFlowConservesExactly) {
  const ModeSeq x = random_seq(4, 6, 0.3, 9);
  const auto [before, after] = conserved_E_check(x, 0.123, FlowKind::A);
  EXPECT_NEAR(after, before, 4e-16 * std::abs(before));
}

TEST(Invariant, NonlinearFlowConservesToRoundoff) {
  for (unsigned seed = 0; seed < 6; ++seed) {
    const ModeSeq x = random_seq(4, 3, 0.2, 30 + seed);
    const auto [before, after] = conserved_E_check(x, 0.01 * 0.05, FlowKind::B);
    EXPECT_LE(std::abs(after - before), 1e-12 * std::abs(before)) << seed;
  }
  ModeSeq single(4);
  single.set(2, 5, Complex(0.1, 0.2));
  const auto [b, a] = conserved_E_check(single, 0.3, FlowKind::B);
  EXPECT_LE(std::abs(a - b), 1e-12 * b);
}

TEST(Graded, FirstTwoGradesOfFVanish) {
  const GradedSeq v = random_graded(3, 4, 11);
  const GradedSeq F = op_F(v, builtin("yoshida_4"), 0.02, 6);
  EXPECT_TRUE(F.grade(1).empty());
  EXPECT_TRUE(F.grade(2).empty());
  EXPECT_FALSE(F.grade(3).empty());
}

TEST(Graded, GradePIgnoresGradePMinusOne) {
  const auto s = builtin("blanes_moan_4");
  const GradedSeq v = random_graded(3, 4, 12);
  for (int p = 3; p <= 6; ++p) {
    GradedSeq w = v;
    if (p - 1 <= w.max_grade()) w.grade(p - 1) = random_graded(3, 4, 99).grade(p - 1);
    const GradedSeq a = op_F(v, s, 0.03, p);
    const GradedSeq b = op_F(w, s, 0.03, p);
    EXPECT_EQ(a.grade(p).entries(), b.grade(p).entries()) << "p = " << p;
  }
}

TEST(Graded, NonlinearFlowMatchesSeriesOnEvaluatedGrades) {
  // Summing the graded flow over grades equals the sequence flow up to the
  // truncated grades, which are O(eps^(P+1)).
  const int P = 7;
  const double eps = 1e-2;
  GradedSeq v(3, P);
  ModeSeq x(3);
  const ModeSeq base = random_seq(3, 2, 1.0, 4);
  for (const auto& [key, c] : base.entries()) {
    v.grade(1).set(key.first, key.second, TauPolynomial::constant(c));
    x.set(key.first, key.second, eps * c);
  }
  const GradedSeq g = graded_phi_B(v, 0.2, P);
  ModeSeq sum(3);
  for (int p = 1; p <= P; ++p) {
    ModeSeq gp = evaluate(g.grade(p), 0.0);
    gp *= Complex(std::pow(eps, p), 0.0);
    sum += gp;
  }
  EXPECT_LT(max_abs_diff(sum, phi_B_series(x, 0.2)), 1e-15);
}

class Build : public ::testing::TestWithParam<std::tuple<int, const char*>> {};

TEST_P(Build, StructuralInvariants) {
  const auto [N, name] = GetParam();
  const int K = 4;
  const double h = max_cfl_step(K, N, 6.0);
  const ModeVector psi0 = make_initial(K, 0.1, InitialProfile::named("random", 2));
  const ModulationTable T = build_modulation(psi0, 0.1, N, builtin(name), h);
  ASSERT_EQ(T.z.max_grade(), N);
  for (int p = 1; p <= N; ++p) {
    for (const auto& [key, poly] : T.z.grade(p).entries()) {
      const auto [j, k] = key;
      EXPECT_LE(std::llabs(k), static_cast<long long>(p) * K * K) << j << "," << k << "," << p;
      EXPECT_LE(poly.degree(), p - 1) << j << "," << k << "," << p;
      if (p <= 2) EXPECT_EQ(k, static_cast<long long>(j) * j) << "off-diagonal entry at grade " << p;
    }
  }
  EXPECT_LT(h1_norm(reconstruct(T, 0.0) - psi0), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Orders, Build,
                         ::testing::Combine(::testing::Values(2, 3, 4),
                                            ::testing::Values("strang_1", "lie_trotter_2", "yoshida_4")));

TEST(Build, GradeOneOnlyIsFreeFlow) {
  const int K = 4;
  const Complex c(0.03, 0.04);
  const ModeVector psi0 = ModeVector::single_mode(K, 2, c);
  const ModulationTable T = build_modulation(psi0, 0.05, 2, builtin("strang_1"), 0.01);
  EXPECT_EQ(T.entry_count(), 1u);
  for (double t : {0.0, 3.3, 17.0}) {
    const ModeVector v = reconstruct(T, t);
    EXPECT_NEAR(std::abs(v[2] - c * std::polar(1.0, -4.0 * t)), 0.0, 1e-15) << t;
    EXPECT_NEAR(almost_invariant(T, t), h1_norm_sq(psi0), 1e-18);
  }
}

TEST(Build, GradeOneInvariantIsSquaredNorm) {
  const ModeVector psi0 = make_initial(8, 0.1, InitialProfile::named("default"));
  const ModulationTable T = build_modulation(psi0, 0.1, 2, builtin("strang_1"), max_cfl_step(8, 2, 6.0));
  EXPECT_NEAR(almost_invariant(T, 0.0), h1_norm_sq(psi0), 1e-17);
  EXPECT_EQ(T.z.grade(1).at(1, 1), TauPolynomial::constant(psi0[1] / 0.1));
}

TEST(Build, ZeroDataGivesZeroTable) {
  const ModulationTable T = build_modulation(ModeVector(4), 0.1, 3, builtin("yoshida_4"), 0.02);
  EXPECT_EQ(T.entry_count(), 0u);
  EXPECT_EQ(norm_sigma(defect_residual(T, 0.4), 1.0), 0.0);
  EXPECT_EQ(almost_invariant(T, 1.0), 0.0);
}

TEST(Build, RejectsCflViolationAndSmallDivisors) {
  const ModeVector psi0 = make_initial(2, 0.1, InitialProfile::named("default"));
  EXPECT_THROW(build_modulation(psi0, 0.1, 3, builtin("strang_1"), 1.0), ValidationError);
  BuildOptions o;
  o.demote_cfl = true;
  EXPECT_THROW(build_modulation(psi0, 0.1, 3, builtin("strang_1"), kTwoPi / 2, o), NumericalError);
  EXPECT_THROW(build_modulation(psi0, 0.1, 1, builtin("strang_1"), 0.01), ValidationError);
}

TEST(Defect, ResidualAgreesWithSeries) {
  const int K = 4, N = 2;
  const ModeVector psi0 = make_initial(K, 0.1, InitialProfile::named("random", 7));
  const ModulationTable T = build_modulation(psi0, 0.1, N, builtin("strang_1"), max_cfl_step(K, N, 6.0));
  for (double tau : {0.0, 0.35, 1.0}) {
    const ModeSeq a = defect_residual(T, tau);
    const ModeSeq b = defect_series(T, tau, 2 * N + 1);
    EXPECT_LT(norm_sigma(a - b, 1.0), 1e-10) << tau;
    EXPECT_GT(norm_sigma(a, 1.0), 0.0);
  }
}

TEST(Defect, ScalesWithEpsToTheNPlusOne) {
  const int K = 8, N = 2;
  const double h = max_cfl_step(K, N, 6.0);
  std::vector<double> r;
  for (double eps : {0.2, 0.1, 0.05}) {
    const ModeVector psi0 = make_initial(K, eps, InitialProfile::named("default"));
    const ModulationTable T = build_modulation(psi0, eps, N, builtin("strang_1"), h);
    r.push_back(norm_sigma(defect_residual(T, 0.5), 1.0) / (std::pow(eps, N + 1) * h));
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    EXPECT_LT(r[i] / r[i - 1], 3.0);
    EXPECT_GT(r[i] / r[i - 1], 1.0 / 3.0);
  }
}

TEST(Restart, AtZeroReproducesBuild) {
  const ModeVector psi0 = make_initial(4, 0.1, InitialProfile::named("default"));
  const ModulationTable T = build_modulation(psi0, 0.1, 3, builtin("suzuki_4"), 0.02);
  RestartInfo info;
  const ModulationTable R = restart(T, psi0, 0.0, &info);
  EXPECT_EQ(table_to_json(R), table_to_json(T));
  EXPECT_TRUE(info.norm_within_bound);
  EXPECT_NEAR(info.interface_norm, 0.1, 1e-16);
}

TEST(Restart, AnchorsAtInterface) {
  const ModeVector psi0 = make_initial(4, 0.1, InitialProfile::named("default"));
  const double h = max_cfl_step(4, 3, 6.0);
  const ModulationTable T = build_modulation(psi0, 0.1, 3, builtin("strang_1"), h);
  const double tI = 80 * h;
  const ModeVector psiI = reconstruct(T, tI);
  const ModulationTable R = restart(T, psiI, tI);
  EXPECT_DOUBLE_EQ(R.t_offset, tI);
  EXPECT_LT(h1_norm(reconstruct(R, tI) - psiI), 1e-12);
  RestartInfo info;
  restart(T, 3.0 * psiI, tI, &info);
  EXPECT_FALSE(info.norm_within_bound);
}

TEST(Restart, ReconstructedStateCollapsesJumpForN2) {
  const int K = 8;
  const double eps = 0.1, h = max_cfl_step(K, 2, 6.0);
  const ModeVector psi0 = make_initial(K, eps, InitialProfile::named("default"));
  const ModulationTable T = build_modulation(psi0, eps, 2, builtin("strang_1"), h);
  const double tI = std::round(1.0 / (eps * h)) * h;
  const ModulationTable R = restart(T, reconstruct(T, tI), tI);
  const double E = almost_invariant(T, tI);
  EXPECT_LT(std::abs(E - almost_invariant(R, tI)), 1e-10 * E);
  const ModeSeq z = z_absolute(T, eps * tI);
  EXPECT_LT(norm_sigma(z - z_absolute(R, eps * tI), 1.0), 1e-10 * norm_sigma(z, 1.0));
}

TEST(Serialization, TableJsonRoundTrip) {
  const ModeVector psi0 = make_initial(4, 0.1, InitialProfile::named("default"));
  const ModulationTable T = build_modulation(psi0, 0.1, 3, builtin("yoshida_4"), 0.02, {}, 1.5);
  const std::string text = table_to_json(T);
  const ModulationTable U = table_from_json(text);
  EXPECT_EQ(table_to_json(U), text);
  EXPECT_EQ(U.entry_count(), T.entry_count());
  EXPECT_EQ(U.scheme.name, "yoshida_4");
  EXPECT_DOUBLE_EQ(U.t_offset, 1.5);
  EXPECT_LT(h1_norm(reconstruct(U, 2.0) - reconstruct(T, 2.0)), 1e-16);
  EXPECT_THROW(table_from_json("{\"K\": 4}"), ValidationError);
}
