// Copyright 2026 The qdm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Apparent CPT violation of a CP-violating two-state decay (K, Kbar) in an
// environment. The composite Hamiltonian on system (x) environment is
//
//   H_U = H_s (x) I_E + eps H_w (x) I_E + I (x) H_E + eps H_int,
//
// and Lambda(beta) is the difference of the K and Kbar diagonal entries of
// the effective Hamiltonian on span{|K>|beta>, |Kbar>|beta>}.
//
// System basis order: K, Kbar, f_1, fbar_1, f_2, fbar_2, ...
// Flat index of |s>|beta> is s * n_env + beta.

#include <cstddef>
#include <span>
#include <vector>

#include "qdm/core/complex_matrix.hpp"
#include "qdm/core/density.hpp"

namespace qdm::cptest {

struct KaonModel {
  std::size_t n_f = 1;
  std::size_t n_env = 1;
  double m0 = 0.0;               // strong energy of K and Kbar; also the reference E0
  std::vector<double> e_final;   // E_f, shared by f and fbar; size n_f
  std::vector<cplx> g;           // weak amplitude scale per channel; size n_f
  std::vector<double> phi;       // CP phase per channel; size n_f
  // <K beta|H_int|f beta> = <Kbar beta|H_int|fbar beta>, index beta * n_f + f; size n_env * n_f.
  std::vector<cplx> h_int;
  // <f beta|H_int|f beta> = <fbar beta|H_int|fbar beta>, same indexing; empty means zero.
  std::vector<double> h_final;
  std::vector<double> e_env;     // H_E diagonal; empty means 0, 1, ..., n_env - 1
  double epsilon = 0.1;
  double delta = 1e-4;
};

/// Full invariant set (epsilon in (0, 0.2], delta > 0, sizes, distinct
/// environment energies). Throws ValidationError naming the key.
void validate(const KaonModel& model);

/// 1e-4 times the smallest nonzero |m0 - E_f|.
double default_delta(double m0, std::span<const double> e_final);

std::size_t system_dim(const KaonModel& model);

inline constexpr std::size_t kK = 0;
inline constexpr std::size_t kKbar = 1;
inline constexpr std::size_t final_index(std::size_t f) { return 2 + 2 * f; }
inline constexpr std::size_t final_bar_index(std::size_t f) { return 3 + 2 * f; }

/// <K|H_w|f> = g_f exp(-i phi_f / 2),  <Kbar|H_w|fbar> = conj(<K|H_w|f>).
/// The second relation makes H_w invariant under CP combined with complex
/// conjugation; the pair is CP-symmetric only when <K|H_w|f> is real.
cplx weak_amplitude(const KaonModel& model, std::size_t f);

struct HamiltonianBlocks {
  ComplexMatrix strong;       // H_s on the system
  ComplexMatrix weak;         // H_w on the system, without eps
  ComplexMatrix environment;  // H_E
  ComplexMatrix interaction;  // H_int on system (x) environment, without eps
};

HamiltonianBlocks build_blocks(const KaonModel& model);

/// Dimension (2 + 2 n_f) n_env. Throws ValidationError if any piece is not Hermitian within 1e-12.
ComplexMatrix build_full_hamiltonian(const KaonModel& model);

/// CP as a basis permutation on the system with environment indices fixed;
/// T as entrywise complex conjugation in the fixed basis.
struct SymmetryMaps {
  std::vector<std::size_t> cp_pairing;  // involution on system indices
  std::size_t n_env = 1;
};

SymmetryMaps symmetry_maps(const KaonModel& model);

/// max |H - P H P| <= tol
bool cp_check(const ComplexMatrix& h, const SymmetryMaps& maps, double tol);
/// max |H - P conj(H) P| <= tol
bool cpt_check(const ComplexMatrix& h, const SymmetryMaps& maps, double tol);

struct KaonBasis {
  PureState k_short;  // (K + Kbar) / sqrt 2
  PureState k_long;   // (K - Kbar) / sqrt 2
};

KaonBasis kaon_basis();

/// H_eff to second order: H_0 + eps P V P + eps^2 sum_q P V|q><q|V P / (E0 - E_q + i delta),
/// with environment energy of beta subtracted. 2x2 on (K, Kbar).
ComplexMatrix effective_hamiltonian_perturbative(const KaonModel& model, std::size_t beta);

/// The closed second-order expression
///   Lambda = -eps^2 sum_f (<K b|H_int|f b> - <f b|H_int|K b>)(<K|H_w|f> - <f|H_w|K>) / (E0 - E_f + i delta).
cplx lambda_perturbative(const KaonModel& model, std::size_t beta);

/// Exact projection: P H P + P H Q (E + i delta - Q H Q)^{-1} Q H P by dense
/// solve, E = m0 + E_beta, environment energy subtracted. Throws
/// SingularityError when the resolvent's reciprocal condition is below 1e-12.
ComplexMatrix effective_hamiltonian_oracle(const KaonModel& model, std::size_t beta);

cplx lambda_oracle(const KaonModel& model, std::size_t beta);

struct ViolationReport {
  std::size_t beta = 0;
  double epsilon = 0.0;
  cplx lambda_perturbative;
  cplx lambda_oracle;
  /// |oracle - perturbative| at eps over the same at eps / 2; NaN when the
  /// eps / 2 difference is below 1e-13 (nothing to resolve).
  double epsilon_order_check = 0.0;
};

std::vector<ViolationReport> violation_scan(const KaonModel& model, std::span<const std::size_t> betas,
                                            std::span<const double> epsilons);

}  // namespace qdm::cptest
