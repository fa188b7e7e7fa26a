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

#include "qdm/measurement/pipeline.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qdm/error.hpp"

namespace qdm::measurement {

namespace {

constexpr double kNormTol = 1e-12;

constexpr std::size_t kUp = 0;
constexpr std::size_t kDown = 1;
constexpr std::size_t kReady = 0;
constexpr std::size_t kReadUp = 1;
constexpr std::size_t kReadDown = 2;

void expect_stage(const StageState& s, int stage, const char* who) {
  if (s.stage != stage)
    throw SequencingError(std::string(who) + ": expected a stage-" + std::to_string(stage) + " state, got stage " +
                          std::to_string(s.stage));
}

StageState make_stage(int stage, DensityMatrix rho) {
  const double s = vn_entropy(rho);
  return StageState{stage, std::move(rho), s, std::nullopt};
}

ComplexMatrix build_premeasurement_unitary() {
  // |up>:   ready <-> read_up,   read_down fixed
  // |down>: ready <-> read_down, read_up fixed
  std::vector<std::size_t> perm(kDim);
  perm[index_of(kUp, kReady)] = index_of(kUp, kReadUp);
  perm[index_of(kUp, kReadUp)] = index_of(kUp, kReady);
  perm[index_of(kUp, kReadDown)] = index_of(kUp, kReadDown);
  perm[index_of(kDown, kReady)] = index_of(kDown, kReadDown);
  perm[index_of(kDown, kReadDown)] = index_of(kDown, kReady);
  perm[index_of(kDown, kReadUp)] = index_of(kDown, kReadUp);
  ComplexMatrix u(kDim, kDim);
  for (std::size_t col = 0; col < kDim; ++col) u(perm[col], col) = 1.0;
  return u;
}

bool same_branch(std::size_t i, std::size_t j) { return i / kPointerDim == j / kPointerDim; }

}  // namespace

void validate(const MeasurementConfig& c) {
  auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  if (!finite(c.c_up) || !finite(c.c_down)) throw ValidationError("c_up/c_down: non-finite amplitude");
  const double norm = std::norm(c.c_up) + std::norm(c.c_down);
  if (std::abs(norm - 1.0) > kNormTol) {
    std::ostringstream os;
    os.precision(17);
    os << "c_up/c_down: |c_up|^2 + |c_down|^2 = " << norm << ", must be 1 within " << kNormTol;
    throw ValidationError(os.str());
  }
  if (c.c_up == cplx(0.0)) throw ValidationError("c_up: trivial amplitude 0 is not a superposition");
  if (c.c_down == cplx(0.0)) throw ValidationError("c_down: trivial amplitude 0 is not a superposition");
  if (!(c.apparatus_temperature > 0.0) || !std::isfinite(c.apparatus_temperature))
    throw ValidationError("T_a: apparatus temperature must be > 0");
  if (!std::isfinite(c.delta_e1) || !std::isfinite(c.delta_e2)) throw ValidationError("delta_E1/delta_E2: non-finite");
  if (c.phase_mode == PhaseMode::monte_carlo && c.mc_samples < 1)
    throw ValidationError("mc_samples: must be >= 1 in monte_carlo mode");
  if (!(c.detect_ratio > 0.0)) throw ValidationError("detect_ratio: must be > 0");
}

const ComplexMatrix& premeasurement_unitary() {
  static const ComplexMatrix u = build_premeasurement_unitary();
  return u;
}

double binary_entropy(double p_up) {
  auto term = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  return term(p_up) + term(1.0 - p_up);
}

std::pair<double, double> born_weights(const DensityMatrix& rho) {
  if (rho.dim() != kDim) throw ValidationError("born_weights: expected a 6-dim system/pointer state");
  return {rho(index_of(kUp, kReadUp), index_of(kUp, kReadUp)).real(),
          rho(index_of(kDown, kReadDown), index_of(kDown, kReadDown)).real()};
}

double branch_coherence(const DensityMatrix& rho) {
  double m = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j)
      if (!same_branch(i, j)) m = std::max(m, std::abs(rho(i, j)));
  return m;
}

StageState stage0_prepare(const MeasurementConfig& config) {
  validate(config);
  std::vector<cplx> psi(kDim);
  psi[index_of(kUp, kReady)] = config.c_up;
  psi[index_of(kDown, kReady)] = config.c_down;
  return make_stage(0, from_pure(PureState(std::move(psi))));
}

StageState stage1_premeasure(const StageState& state) {
  expect_stage(state, 0, "stage1_premeasure");
  const ComplexMatrix& u = premeasurement_unitary();
  return make_stage(1, DensityMatrix(u * state.rho.matrix() * u.adjoint()));
}

StageState stage2_decohere(const StageState& state, const MeasurementConfig& config, Rng& rng) {
  expect_stage(state, 1, "stage2_decohere");
  ComplexMatrix m = state.rho.matrix();
  if (config.phase_mode == PhaseMode::analytic) {
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t j = 0; j < kDim; ++j)
        if (!same_branch(i, j)) m(i, j) = 0.0;
  } else {
    if (config.mc_samples < 1) throw ValidationError("mc_samples: must be >= 1 in monte_carlo mode");
    // Average of Theta rho1 Theta^dagger over random branch phases. Only the
    // cross-branch factor exp(i (theta_up - theta_down)) survives.
    cplx z = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::uint64_t k = 0; k < config.mc_samples; ++k) {
      const double theta_up = two_pi * rng.uniform();
      const double theta_down = two_pi * rng.uniform();
      z += std::polar(1.0, theta_up - theta_down);
    }
    z /= static_cast<double>(config.mc_samples);
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t j = 0; j < kDim; ++j) {
        if (same_branch(i, j)) continue;
        m(i, j) *= (i / kPointerDim == kUp) ? z : std::conj(z);
      }
  }
  return make_stage(2, DensityMatrix(std::move(m)));
}

StageState stage2_decohere(const StageState& state, const MeasurementConfig& config) {
  Rng rng(config.seed);
  return stage2_decohere(state, config, rng);
}

StageState stage3_latent(const StageState& state) {
  expect_stage(state, 2, "stage3_latent");
  return StageState{3, state.rho, state.entropy, std::nullopt};
}

namespace {

Outcome sample_outcome(const DensityMatrix& rho, Rng& rng) {
  const auto [p_up, p_down] = born_weights(rho);
  const double u = rng.uniform() * (p_up + p_down);
  return u < p_up ? Outcome::up : Outcome::down;
}

}  // namespace

StageState stage4_observe(const StageState& state, Rng& rng) {
  expect_stage(state, 3, "stage4_observe");
  const Outcome outcome = sample_outcome(state.rho, rng);
  const std::size_t k = outcome == Outcome::up ? index_of(kUp, kReadUp) : index_of(kDown, kReadDown);
  StageState s = make_stage(4, from_pure(PureState::basis(kDim, k)));
  s.outcome = outcome;
  return s;
}

EnergyBudget energy_budget_check(const MeasurementConfig& config) {
  if (!(config.apparatus_temperature > 0.0)) throw ValidationError("T_a: apparatus temperature must be > 0");
  validate(config);
  EnergyBudget b;
  b.required_entropy_dump = binary_entropy(std::norm(config.c_up));
  b.required_energy = config.apparatus_temperature * b.required_entropy_dump;
  b.detectable = config.delta_e1 >= config.detect_ratio * config.apparatus_temperature / 2.0;
  b.amplified = config.delta_e2 > config.delta_e1;
  return b;
}

MeasurementRecord run_pipeline(const MeasurementConfig& config) {
  RepeatedRun r = run_repeated(config, 1);
  return std::move(r.first);
}

RepeatedRun run_repeated(const MeasurementConfig& config, std::uint64_t runs) {
  if (runs < 1) throw ValidationError("runs: must be >= 1");
  Rng rng(config.seed);
  RepeatedRun out;
  out.first.config = config;
  auto& st = out.first.stages;
  st.push_back(stage0_prepare(config));
  st.push_back(stage1_premeasure(st.back()));
  st.push_back(stage2_decohere(st.back(), config, rng));
  st.push_back(stage3_latent(st.back()));
  out.s2 = st[2].entropy;

  out.outcomes.reserve(runs);
  std::uint64_t ups = 0;
  st.push_back(stage4_observe(st[3], rng));
  out.outcomes.push_back(*st.back().outcome);
  for (std::uint64_t i = 1; i < runs; ++i) out.outcomes.push_back(sample_outcome(st[3].rho, rng));
  for (Outcome o : out.outcomes)
    if (o == Outcome::up) ++ups;
  if (runs > 1) {
    const double f_up = static_cast<double>(ups) / static_cast<double>(runs);
    out.first.born_frequencies = std::make_pair(f_up, 1.0 - f_up);
  }
  return out;
}

}  // namespace qdm::measurement
