#pragma once

// Modulation coefficient functions z_{j,p}^k and everything evaluated from
// them.
//
// Polynomials are stored in the local slow time sigma = eps (t - t_offset)
// with the phases e^{-ik t_offset} folded into the coefficients, so a table
// anchored at t_offset describes
//
//   psi~_j(t) = sum_k z_j^k(eps (t - t_offset)) e^{-ik (t - t_offset)},
//   z_j^k = sum_{p=1}^N eps^p z_{j,p}^k.
//
// For t_offset = 0 this is the usual slow time tau = eps t. z_absolute()
// translates back to the convention tau = eps t for any anchor.

#include <string>

#include "nlsplit/mfe/graded.hpp"

namespace nlsplit::mfe {

struct ModulationTable {
  int K = 1;
  int N = 2;
  double epsilon = 0.0;
  double t_offset = 0.0;
  double h = 0.0;
  SplittingScheme scheme;
  GradedSeq z{1, 0};

  TauPolynomial entry(int j, long long k, int p) const { return z.grade(p).at(j, k); }
  std::size_t entry_count() const;
  double local_time(double t) const { return epsilon * (t - t_offset); }
};

struct BuildOptions {
  double c0 = 6.0;
  bool demote_cfl = false;
  double divisor_guard = 1e-12;
};

/// Algorithm 1: grades p = 1..N in order. Throws ValidationError on CFL
/// violation and NumericalError when a small divisor falls below the guard.
ModulationTable build_modulation(const ModeVector& psi0, double epsilon, int N,
                                 const SplittingScheme& scheme, double h,
                                 const BuildOptions& options = {}, double t_offset = 0.0);

struct RestartInfo {
  double interface_norm = 0.0;  // ||psi_at_interface||_1
  bool norm_within_bound = true;  // ||psi_at_interface||_1 <= 2 eps
};

/// New table on the next interval, anchored at t_interface with initial data
/// psi_at_interface.
ModulationTable restart(const ModulationTable& prev, const ModeVector& psi_at_interface,
                        double t_interface, RestartInfo* info = nullptr,
                        const BuildOptions& options = {});

/// eps-summed modulation functions at local slow time sigma.
ModeSeq z_local(const ModulationTable& T, double sigma);

/// eps-summed modulation functions z_j^k(tau) in the convention tau = eps t
/// (phases e^{ik t_offset} restored).
ModeSeq z_absolute(const ModulationTable& T, double tau);

ModeVector reconstruct(const ModulationTable& T, double t);

/// Almost-invariant E(t) = sum_{j,k} (k + 1) |z_j^k(eps t)|^2.
double almost_invariant(const ModulationTable& T, double t, Precision p = Precision::plain);

/// d(tau) = Phi_A^{a1 h} o Phi_B^{b1 h} o ... (z(tau)) - e^{-ikh} z(tau + eps h),
/// computed as an operator residual. tau is the slow time eps t; the result
/// is in the table's local phase convention (moduli do not depend on it).
ModeSeq defect_residual(const ModulationTable& T, double tau);

/// Same defect from the expansion
///   sum_{p > N} eps^p F_p(z) - e^{-ikh} sum_{l >= 1} (eps h)^l / l! sum_p eps^p d^l z_p,
/// with F summed up to grade max_grade.
ModeSeq defect_series(const ModulationTable& T, double tau, int max_grade);

/// Collocation evaluation of the composed sequence operator
/// Phi_A^{a1 h} o Phi_B^{b1 h} o ... o Phi_A^{as h} o Phi_B^{bs h}(v):
/// v is sampled on 2K points in x and L points in t, the flows act pointwise,
/// and the result is read back with |k| <= L/2. Exact up to aliasing of
/// frequencies beyond L/2.
ModeSeq compose_collocated(const ModeSeq& v, const SplittingScheme& scheme, double h, int L);

/// Collocation length used by defect_residual for a table with these
/// parameters: a power of two with room for 13 N K^2 on each side.
int collocation_length(int K, int N);

std::string table_to_json(const ModulationTable& T);
ModulationTable table_from_json(const std::string& text);

}  // namespace nlsplit::mfe
