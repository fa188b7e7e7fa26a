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

#include <span>
#include <vector>

#include "qdm/core/complex_matrix.hpp"
#include "qdm/core/density.hpp"
#include "qdm/core/linalg.hpp"

namespace qdm {

/// Hamiltonian plus Lindblad operators. The generator is
///   d rho/dt = -i [H, rho] + sum_j ( L_j rho L_j^dagger - 1/2 {L_j^dagger L_j, rho} ),
/// i.e. i d rho/dt = [H, rho] - (i/2) sum_j (L^dag L rho + rho L^dag L - 2 L rho L^dag).
class LindbladModel {
 public:
  /// Throws ValidationError if H is not Hermitian within 1e-10 or shapes disagree.
  LindbladModel(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> lindblad_ops);

  std::size_t dim() const noexcept { return h_.rows(); }
  const ComplexMatrix& hamiltonian() const noexcept { return h_; }
  std::span<const ComplexMatrix> lindblad_ops() const noexcept { return ops_; }

  /// sum_j L_j^dagger L_j
  const ComplexMatrix& decay_sum() const noexcept { return decay_; }

 private:
  ComplexMatrix h_;
  std::vector<ComplexMatrix> ops_;
  std::vector<ComplexMatrix> ops_adj_;
  ComplexMatrix decay_;

  friend ComplexMatrix dissipator(const LindbladModel&, const ComplexMatrix&);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> entropies;
};

/// rho(t) = U rho0 U^dagger, U = exp(-i H t). Negative t runs backward.
DensityMatrix evolve_von_neumann(const DensityMatrix& rho0, const ComplexMatrix& hamiltonian, double t);

/// Right-hand side d rho/dt of the master equation.
ComplexMatrix lindblad_rhs(const LindbladModel& model, const DensityMatrix& rho);
ComplexMatrix lindblad_rhs(const LindbladModel& model, const ComplexMatrix& rho);

/// Only the dissipative part: sum_j ( L rho L^dag - 1/2 {L^dag L, rho} ).
ComplexMatrix dissipator(const LindbladModel& model, const ComplexMatrix& rho);

struct IntegratorOptions {
  double dt_max = 1e-2;
  /// Recorded states with an eigenvalue below -positivity_tol abort the run.
  double positivity_tol = 1e-7;
  /// Allowed |Tr rho - 1| accumulated per unit of elapsed time.
  double trace_drift_per_time = 1e-9;
};

/// Fixed-step fourth-order integration. rho0 is the state at t_grid.front();
/// each interval is split into ceil(dt / dt_max) equal steps. The coherent
/// part is applied exactly through exp(-i H h/2) (integrating-factor RK4),
/// the dissipator by the classical four-stage scheme. Trace is not renormalized.
/// Throws IntegrationError on positivity or trace-drift violations.
Trajectory evolve_lindblad(const LindbladModel& model, const DensityMatrix& rho0,
                           std::span<const double> t_grid, const IntegratorOptions& opts);

inline Trajectory evolve_lindblad(const LindbladModel& model, const DensityMatrix& rho0,
                                  std::span<const double> t_grid, double dt_max) {
  IntegratorOptions opts;
  opts.dt_max = dt_max;
  return evolve_lindblad(model, rho0, t_grid, opts);
}

/// Collapse-time estimate tau = hbar / delta_E.
double dp_collapse_time(double delta_e, double hbar = 1.0);

}  // namespace qdm
