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

#include "qdm/cptest/kaon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "qdm/core/linalg.hpp"
#include "qdm/error.hpp"

namespace qdm::cptest {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kMinRcond = 1e-12;
constexpr double kUnresolvedDifference = 1e-13;

bool finite(double x) { return std::isfinite(x); }
bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Structural checks shared by every operation. The strict epsilon/delta
// ranges are load-time invariants (validate); operations also accept the
// free limit eps = 0 and delta = 0, where denominators are checked instead.
void check_structure(const KaonModel& m) {
  auto size_error = [](const char* key, std::size_t want, std::size_t got) {
    throw ValidationError(std::string(key) + ": expected " + std::to_string(want) + " values, got " +
                          std::to_string(got));
  };
  if (m.n_f < 1) throw ValidationError("n_f: must be >= 1");
  if (m.n_env < 1) throw ValidationError("n_E: must be >= 1");
  if (m.e_final.size() != m.n_f) size_error("E_f", m.n_f, m.e_final.size());
  if (m.g.size() != m.n_f) size_error("g", m.n_f, m.g.size());
  if (m.phi.size() != m.n_f) size_error("phi_f", m.n_f, m.phi.size());
  if (m.h_int.size() != m.n_env * m.n_f) size_error("h_int", m.n_env * m.n_f, m.h_int.size());
  if (!m.h_final.empty() && m.h_final.size() != m.n_env * m.n_f) size_error("h_final", m.n_env * m.n_f, m.h_final.size());
  if (!m.e_env.empty() && m.e_env.size() != m.n_env) size_error("e_env", m.n_env, m.e_env.size());
  if (!finite(m.m0)) throw ValidationError("m0: non-finite");
  auto all_finite = [](const auto& v) { return std::all_of(v.begin(), v.end(), [](auto x) { return finite(x); }); };
  if (!all_finite(m.e_final)) throw ValidationError("E_f: non-finite entry");
  if (!all_finite(m.g)) throw ValidationError("g: non-finite entry");
  if (!all_finite(m.phi)) throw ValidationError("phi_f: non-finite entry");
  if (!all_finite(m.h_int)) throw ValidationError("h_int: non-finite entry");
  if (!all_finite(m.h_final)) throw ValidationError("h_final: non-finite entry");
  if (!all_finite(m.e_env)) throw ValidationError("e_env: non-finite entry");
  if (!(m.epsilon >= 0.0) || !finite(m.epsilon)) throw ValidationError("epsilon: must be a finite value >= 0");
  if (!(m.delta >= 0.0) || !finite(m.delta)) throw ValidationError("delta: must be a finite value >= 0");
}

double env_energy(const KaonModel& m, std::size_t beta) {
  return m.e_env.empty() ? static_cast<double>(beta) : m.e_env[beta];
}

void check_beta(const KaonModel& m, std::size_t beta) {
  if (beta >= m.n_env)
    throw ValidationError("beta: " + std::to_string(beta) + " out of range for n_E = " + std::to_string(m.n_env));
}

cplx resolvent_denominator(double gap, double delta) {
  const cplx d(gap, delta);
  if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(gap))) {
    std::ostringstream os;
    os << "vanishing energy denominator (gap " << gap << ", delta " << delta << ")";
    throw SingularityError(os.str());
  }
  return d;
}

}  // namespace

void validate(const KaonModel& m) {
  check_structure(m);
  if (!(m.epsilon > 0.0 && m.epsilon <= 0.2)) {
    std::ostringstream os;
    os << "epsilon: " << m.epsilon << " outside (0, 0.2]";
    throw ValidationError(os.str());
  }
  if (!(m.delta > 0.0)) throw ValidationError("delta: must be > 0");
  if (!m.e_env.empty()) {
    std::set<double> seen(m.e_env.begin(), m.e_env.end());
    if (seen.size() != m.e_env.size()) throw ValidationError("e_env: environment energies must be distinct");
  }
}

double default_delta(double m0, std::span<const double> e_final) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double e : e_final) {
    const double gap = std::abs(m0 - e);
    if (gap > 0.0) smallest = std::min(smallest, gap);
  }
  return std::isfinite(smallest) ? 1e-4 * smallest : 1e-4;
}

std::size_t system_dim(const KaonModel& m) { return 2 + 2 * m.n_f; }

cplx weak_amplitude(const KaonModel& m, std::size_t f) { return m.g[f] * std::polar(1.0, -0.5 * m.phi[f]); }

HamiltonianBlocks build_blocks(const KaonModel& m) {
  check_structure(m);
  const std::size_t ns = system_dim(m);
  const std::size_t ne = m.n_env;
  HamiltonianBlocks b{ComplexMatrix(ns, ns), ComplexMatrix(ns, ns), ComplexMatrix(ne, ne),
                      ComplexMatrix(ns * ne, ns * ne)};

  b.strong(kK, kK) = m.m0;
  b.strong(kKbar, kKbar) = m.m0;
  for (std::size_t f = 0; f < m.n_f; ++f) {
    b.strong(final_index(f), final_index(f)) = m.e_final[f];
    b.strong(final_bar_index(f), final_bar_index(f)) = m.e_final[f];

    const cplx w = weak_amplitude(m, f);
    b.weak(kK, final_index(f)) = w;
    b.weak(final_index(f), kK) = std::conj(w);
    b.weak(kKbar, final_bar_index(f)) = std::conj(w);
    b.weak(final_bar_index(f), kKbar) = w;
  }

  for (std::size_t beta = 0; beta < ne; ++beta) b.environment(beta, beta) = env_energy(m, beta);

  auto at = [ne](std::size_t s, std::size_t beta) { return s * ne + beta; };
  for (std::size_t beta = 0; beta < ne; ++beta)
    for (std::size_t f = 0; f < m.n_f; ++f) {
      const cplx c = m.h_int[beta * m.n_f + f];
      b.interaction(at(kK, beta), at(final_index(f), beta)) = c;
      b.interaction(at(final_index(f), beta), at(kK, beta)) = std::conj(c);
      b.interaction(at(kKbar, beta), at(final_bar_index(f), beta)) = c;
      b.interaction(at(final_bar_index(f), beta), at(kKbar, beta)) = std::conj(c);
      if (!m.h_final.empty()) {
        const double d = m.h_final[beta * m.n_f + f];
        b.interaction(at(final_index(f), beta), at(final_index(f), beta)) = d;
        b.interaction(at(final_bar_index(f), beta), at(final_bar_index(f), beta)) = d;
      }
    }
  return b;
}

ComplexMatrix build_full_hamiltonian(const KaonModel& m) {
  const HamiltonianBlocks b = build_blocks(m);
  const std::size_t ns = system_dim(m);
  const ComplexMatrix ie = ComplexMatrix::identity(m.n_env);
  const ComplexMatrix is = ComplexMatrix::identity(ns);
  for (const ComplexMatrix* piece : {&b.strong, &b.weak, &b.environment, &b.interaction})
    if (hermitian_deviation(*piece) > kHermitianTol)
      throw ValidationError("build_full_hamiltonian: assembled piece is not Hermitian");
  ComplexMatrix h = kron(b.strong, ie);
  h.axpy(m.epsilon, kron(b.weak, ie));
  h += kron(is, b.environment);
  h.axpy(m.epsilon, b.interaction);
  return h;
}

SymmetryMaps symmetry_maps(const KaonModel& m) {
  SymmetryMaps maps;
  maps.n_env = m.n_env;
  maps.cp_pairing.resize(system_dim(m));
  maps.cp_pairing[kK] = kKbar;
  maps.cp_pairing[kKbar] = kK;
  for (std::size_t f = 0; f < m.n_f; ++f) {
    maps.cp_pairing[final_index(f)] = final_bar_index(f);
    maps.cp_pairing[final_bar_index(f)] = final_index(f);
  }
  return maps;
}

namespace {

void check_maps(const ComplexMatrix& h, const SymmetryMaps& maps) {
  const std::size_t ns = maps.cp_pairing.size();
  for (std::size_t i = 0; i < ns; ++i)
    if (maps.cp_pairing[i] >= ns || maps.cp_pairing[maps.cp_pairing[i]] != i)
      throw ValidationError("SymmetryMaps: cp_pairing is not an involution");
  if (!h.square() || maps.n_env < 1 || h.rows() != ns * maps.n_env)
    throw ValidationError("symmetry check: matrix dimension " + std::to_string(h.rows()) + " does not match " +
                          std::to_string(ns) + " x " + std::to_string(maps.n_env));
}

template <class Entry>
double symmetry_defect(const ComplexMatrix& h, const SymmetryMaps& maps, Entry entry) {
  check_maps(h, maps);
  const std::size_t ne = maps.n_env;
  auto image = [&](std::size_t i) { return maps.cp_pairing[i / ne] * ne + i % ne; };
  double d = 0.0;
  for (std::size_t r = 0; r < h.rows(); ++r)
    for (std::size_t c = 0; c < h.cols(); ++c) d = std::max(d, std::abs(h(r, c) - entry(h(image(r), image(c)))));
  return d;
}

}  // namespace

bool cp_check(const ComplexMatrix& h, const SymmetryMaps& maps, double tol) {
  return symmetry_defect(h, maps, [](cplx z) { return z; }) <= tol;
}

bool cpt_check(const ComplexMatrix& h, const SymmetryMaps& maps, double tol) {
  return symmetry_defect(h, maps, [](cplx z) { return std::conj(z); }) <= tol;
}

KaonBasis kaon_basis() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {PureState({s, s}), PureState({s, -s})};
}

ComplexMatrix effective_hamiltonian_perturbative(const KaonModel& m, std::size_t beta) {
  check_structure(m);
  check_beta(m, beta);
  const HamiltonianBlocks b = build_blocks(m);
  const std::size_t ns = system_dim(m);
  const std::size_t ne = m.n_env;
  const ComplexMatrix ie = ComplexMatrix::identity(ne);
  ComplexMatrix h0 = kron(b.strong, ie);
  h0 += kron(ComplexMatrix::identity(ns), b.environment);
  ComplexMatrix v = kron(b.weak, ie);
  v += b.interaction;

  const std::size_t p[2] = {kK * ne + beta, kKbar * ne + beta};
  const double e_beta = env_energy(m, beta);
  const double e_ref = m.m0 + e_beta;
  const double eps2 = m.epsilon * m.epsilon;

  ComplexMatrix heff(2, 2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c) {
      cplx s = h0(p[a], p[c]) + m.epsilon * v(p[a], p[c]);
      if (a == c) s -= e_beta;
      cplx second = 0.0;
      for (std::size_t q = 0; q < h0.rows(); ++q) {
        if (q == p[0] || q == p[1]) continue;
        const cplx num = v(p[a], q) * v(q, p[c]);
        if (num == cplx(0.0)) continue;
        second += num / resolvent_denominator(e_ref - h0(q, q).real(), m.delta);
      }
      heff(a, c) = s + eps2 * second;
    }
  return heff;
}

cplx lambda_perturbative(const KaonModel& m, std::size_t beta) {
  check_structure(m);
  check_beta(m, beta);
  const HamiltonianBlocks b = build_blocks(m);
  const std::size_t ne = m.n_env;
  const std::size_t kb = kK * ne + beta;
  cplx sum = 0.0;
  for (std::size_t f = 2; f < system_dim(m); ++f) {
    const std::size_t fb = f * ne + beta;
    const cplx int_part = b.interaction(kb, fb) - b.interaction(fb, kb);
    const cplx weak_part = b.weak(kK, f) - b.weak(f, kK);
    if (int_part == cplx(0.0) || weak_part == cplx(0.0)) continue;
    sum += int_part * weak_part / resolvent_denominator(m.m0 - b.strong(f, f).real(), m.delta);
  }
  return -m.epsilon * m.epsilon * sum;
}

ComplexMatrix effective_hamiltonian_oracle(const KaonModel& m, std::size_t beta) {
  check_structure(m);
  check_beta(m, beta);
  const ComplexMatrix h = build_full_hamiltonian(m);
  const std::size_t n = h.rows();
  const std::size_t ne = m.n_env;
  const std::size_t p[2] = {kK * ne + beta, kKbar * ne + beta};
  std::vector<std::size_t> q;
  for (std::size_t i = 0; i < n; ++i)
    if (i != p[0] && i != p[1]) q.push_back(i);

  const double e_beta = env_energy(m, beta);
  const cplx z(m.m0 + e_beta, m.delta);

  ComplexMatrix resolvent(q.size(), q.size());
  ComplexMatrix qhp(q.size(), 2);
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) resolvent(i, j) = -h(q[i], q[j]);
    resolvent(i, i) += z;
    for (std::size_t a = 0; a < 2; ++a) qhp(i, a) = h(q[i], p[a]);
  }
  const LinearSolve sol = lu_solve(resolvent, qhp);
  if (!(sol.rcond >= kMinRcond)) {
    std::ostringstream os;
    os << "effective_hamiltonian_oracle: resolvent condition number exceeds 1e12 (rcond " << sol.rcond << ")";
    throw SingularityError(os.str());
  }

  ComplexMatrix heff(2, 2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t c = 0; c < 2; ++c) {
      cplx s = h(p[a], p[c]);
      for (std::size_t i = 0; i < q.size(); ++i) s += h(p[a], q[i]) * sol.solution(i, c);
      if (a == c) s -= e_beta;
      heff(a, c) = s;
    }
  return heff;
}

cplx lambda_oracle(const KaonModel& m, std::size_t beta) {
  const ComplexMatrix heff = effective_hamiltonian_oracle(m, beta);
  return heff(0, 0) - heff(1, 1);
}

std::vector<ViolationReport> violation_scan(const KaonModel& model, std::span<const std::size_t> betas,
                                            std::span<const double> epsilons) {
  std::vector<ViolationReport> out;
  out.reserve(betas.size() * epsilons.size());
  for (std::size_t beta : betas)
    for (double eps : epsilons) {
      KaonModel at = model;
      at.epsilon = eps;
      KaonModel half = model;
      half.epsilon = 0.5 * eps;

      ViolationReport r;
      r.beta = beta;
      r.epsilon = eps;
      r.lambda_perturbative = lambda_perturbative(at, beta);
      r.lambda_oracle = lambda_oracle(at, beta);
      const double err = std::abs(r.lambda_oracle - r.lambda_perturbative);
      const double err_half = std::abs(lambda_oracle(half, beta) - lambda_perturbative(half, beta));
      r.epsilon_order_check =
          err_half < kUnresolvedDifference ? std::numeric_limits<double>::quiet_NaN() : err / err_half;
      out.push_back(r);
    }
  return out;
}

}  // namespace qdm::cptest
