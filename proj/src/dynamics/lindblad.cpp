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

#include "qdm/dynamics/lindblad.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "qdm/error.hpp"

namespace qdm {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTrajectoryHermitianTol = 1e-8;

void require_hermitian(const ComplexMatrix& h, const char* who) {
  if (!h.square() || h.empty()) throw ValidationError(std::string(who) + ": Hamiltonian must be square");
  const double dev = hermitian_deviation(h);
  if (dev > kHermitianTol) {
    std::ostringstream os;
    os << who << ": Hamiltonian is not Hermitian (deviation " << dev << ")";
    throw ValidationError(os.str());
  }
}

bool is_zero(const ComplexMatrix& m) {
  for (const cplx& z : m.entries())
    if (z != cplx(0.0)) return false;
  return true;
}

ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& x) { return u * x * u.adjoint(); }

}  // namespace

LindbladModel::LindbladModel(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> lindblad_ops)
    : h_(std::move(hamiltonian)), ops_(std::move(lindblad_ops)) {
  require_hermitian(h_, "LindbladModel");
  decay_ = ComplexMatrix(h_.rows(), h_.rows());
  ops_adj_.reserve(ops_.size());
  for (std::size_t j = 0; j < ops_.size(); ++j) {
    const ComplexMatrix& l = ops_[j];
    if (l.rows() != h_.rows() || l.cols() != h_.cols())
      throw ValidationError("LindbladModel: Lindblad operator " + std::to_string(j) + " has wrong dimension");
    if (!l.all_finite()) throw ValidationError("LindbladModel: non-finite Lindblad operator");
    ops_adj_.push_back(l.adjoint());
    decay_ += ops_adj_.back() * l;
  }
}

ComplexMatrix dissipator(const LindbladModel& model, const ComplexMatrix& rho) {
  if (rho.rows() != model.dim() || rho.cols() != model.dim())
    throw ValidationError("lindblad: state dimension " + std::to_string(rho.rows()) + " does not match model dimension " +
                          std::to_string(model.dim()));
  ComplexMatrix out(model.dim(), model.dim());
  if (model.ops_.empty()) return out;
  out.axpy(-0.5, model.decay_ * rho);
  out.axpy(-0.5, rho * model.decay_);
  for (std::size_t j = 0; j < model.ops_.size(); ++j) out += model.ops_[j] * rho * model.ops_adj_[j];
  return out;
}

ComplexMatrix lindblad_rhs(const LindbladModel& model, const ComplexMatrix& rho) {
  ComplexMatrix out = dissipator(model, rho);
  out.axpy(cplx(0.0, -1.0), commutator(model.hamiltonian(), rho));
  return out;
}

ComplexMatrix lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho) {
  return lindblad_rhs(model, rho.matrix());
}

DensityMatrix evolve_von_neumann(const DensityMatrix& rho0, const ComplexMatrix& hamiltonian, double t) {
  require_hermitian(hamiltonian, "evolve_von_neumann");
  if (hamiltonian.rows() != rho0.dim()) throw ValidationError("evolve_von_neumann: dimension mismatch");
  if (!std::isfinite(t)) throw ValidationError("evolve_von_neumann: non-finite time");
  const ComplexMatrix u = unitary_propagator(hermitian_eigen(hamiltonian), t);
  return DensityMatrix(conjugate_by(u, rho0.matrix()), rho0.tolerance());
}

namespace {

class Stepper {
 public:
  explicit Stepper(const LindbladModel& model) : model_(model), coherent_(!is_zero(model.hamiltonian())) {
    if (coherent_) eig_ = hermitian_eigen(model.hamiltonian());
  }

  void set_step(double h) {
    h_ = h;
    if (coherent_) half_ = unitary_propagator(eig_, 0.5 * h);
  }

  ComplexMatrix advance(const ComplexMatrix& rho) const {
    const double h = h_;
    ComplexMatrix a = half(rho);
    ComplexMatrix k1 = half(dissipator(model_, rho));

    ComplexMatrix y = a;
    y.axpy(0.5 * h, k1);
    ComplexMatrix k2 = dissipator(model_, y);

    y = a;
    y.axpy(0.5 * h, k2);
    ComplexMatrix k3 = dissipator(model_, y);

    y = a;
    y.axpy(h, k3);
    ComplexMatrix k4 = dissipator(model_, half(y));

    y = std::move(a);
    y.axpy(h / 6.0, k1);
    y.axpy(h / 3.0, k2);
    y.axpy(h / 3.0, k3);
    ComplexMatrix next = half(y);
    next.axpy(h / 6.0, k4);
    return next;
  }

 private:
  ComplexMatrix half(const ComplexMatrix& x) const { return coherent_ ? conjugate_by(half_, x) : x; }

  const LindbladModel& model_;
  bool coherent_;
  HermitianEigen eig_;
  ComplexMatrix half_;
  double h_ = 0.0;
};

DensityMatrix admit(const ComplexMatrix& m, double t, double elapsed, const IntegratorOptions& opts) {
  DensityTolerance tol;
  tol.hermitian = kTrajectoryHermitianTol;
  tol.trace = kHermitianTol + opts.trace_drift_per_time * elapsed;
  tol.negative_eigenvalue = opts.positivity_tol;
  const DensityReport rep = is_valid_density(m, tol);
  if (!rep.valid) {
    std::ostringstream os;
    os << "evolve_lindblad: state at t = " << t << " left the density-matrix set (" << rep.diagnostic
       << "); reduce dt_max";
    throw IntegrationError(os.str());
  }
  return DensityMatrix(m, tol);
}

// Per-step guard between recorded times: only finiteness and positivity, the
// full validation runs when a state is recorded.
void check_step(const ComplexMatrix& m, double t, const IntegratorOptions& opts) {
  double lowest = 0.0;
  if (m.all_finite()) lowest = hermitian_eigenvalues(m).front();
  if (!m.all_finite() || lowest < -opts.positivity_tol) {
    std::ostringstream os;
    os << "evolve_lindblad: positivity lost at t = " << t;
    if (m.all_finite()) os << " (min eigenvalue " << lowest << ")";
    os << "; reduce dt_max";
    throw IntegrationError(os.str());
  }
}

}  // namespace

Trajectory evolve_lindblad(const LindbladModel& model, const DensityMatrix& rho0, std::span<const double> t_grid,
                           const IntegratorOptions& opts) {
  if (t_grid.empty()) throw ValidationError("evolve_lindblad: empty time grid");
  if (!(opts.dt_max > 0.0) || !std::isfinite(opts.dt_max)) throw ValidationError("evolve_lindblad: dt_max must be > 0");
  if (rho0.dim() != model.dim()) throw ValidationError("evolve_lindblad: state/model dimension mismatch");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i])) throw ValidationError("evolve_lindblad: non-finite time");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw ValidationError("evolve_lindblad: time grid must be increasing");
  }

  Trajectory traj;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.states.reserve(t_grid.size());
  traj.entropies.reserve(t_grid.size());

  Stepper stepper(model);
  ComplexMatrix rho = rho0.matrix();
  traj.states.push_back(rho0);
  traj.entropies.push_back(vn_entropy(rho0));

  std::optional<double> cached_h;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double span = t_grid[i] - t_grid[i - 1];
    const auto steps = static_cast<std::size_t>(std::ceil(span / opts.dt_max - 1e-12));
    const std::size_t n = steps == 0 ? 1 : steps;
    const double h = span / static_cast<double>(n);
    if (!cached_h || *cached_h != h) {
      stepper.set_step(h);
      cached_h = h;
    }
    for (std::size_t s = 0; s < n; ++s) {
      rho = stepper.advance(rho);
      if (s + 1 < n) check_step(rho, t_grid[i - 1] + h * static_cast<double>(s + 1), opts);
    }
    DensityMatrix state = admit(rho, t_grid[i], t_grid[i] - t_grid.front(), opts);
    traj.entropies.push_back(vn_entropy(state));
    traj.states.push_back(std::move(state));
  }
  return traj;
}

double dp_collapse_time(double delta_e, double hbar) {
  if (!(delta_e > 0.0) || !std::isfinite(delta_e)) throw ValidationError("dp_collapse_time: delta_E must be > 0");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ValidationError("dp_collapse_time: hbar must be > 0");
  return hbar / delta_e;
}

}  // namespace qdm
