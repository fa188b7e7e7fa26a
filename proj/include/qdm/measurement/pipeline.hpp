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

// Five-stage measurement of a two-level system by a three-state pointer:
// preparation, unitary premeasurement, decoherence, latent collapse and
// Born-sampled observable collapse, with entropy bookkeeping.
//
// Basis of the 6-dim space: index = 3 * s + a with s in {up = 0, down = 1}
// and pointer a in {ready = 0, read_up = 1, read_down = 2}.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "qdm/core/density.hpp"

namespace qdm::measurement {

enum class PhaseMode { analytic, monte_carlo };
enum class Outcome { up, down };

inline constexpr std::size_t kSystemDim = 2;
inline constexpr std::size_t kPointerDim = 3;
inline constexpr std::size_t kDim = kSystemDim * kPointerDim;

inline constexpr std::size_t index_of(std::size_t spin, std::size_t pointer) { return kPointerDim * spin + pointer; }

struct MeasurementConfig {
  cplx c_up{1.0 / 1.4142135623730951};
  cplx c_down{1.0 / 1.4142135623730951};
  double apparatus_temperature = 1.0;  // T_a, k_B = 1
  double delta_e1 = 10.0;              // energy handed to the apparatus
  double delta_e2 = 100.0;             // amplified macroscopic effect
  PhaseMode phase_mode = PhaseMode::analytic;
  std::uint64_t mc_samples = 10000;
  std::uint64_t seed = 0;
  double detect_ratio = 10.0;  // R in delta_E1 >= R * T_a / 2
};

/// Throws ValidationError naming the offending field.
void validate(const MeasurementConfig& config);

struct StageState {
  int stage = 0;
  DensityMatrix rho;
  double entropy = 0.0;
  std::optional<Outcome> outcome;  // present only at stage 4
};

struct MeasurementRecord {
  std::vector<StageState> stages;
  MeasurementConfig config;
  std::optional<std::pair<double, double>> born_frequencies;  // (up, down) when repeated
};

/// The run's single pseudo-random stream. Uniform doubles use the top 53 bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

StageState stage0_prepare(const MeasurementConfig& config);
StageState stage1_premeasure(const StageState& state);

/// Monte-Carlo mode draws 2 * mc_samples uniforms from rng (theta_up, theta_down per sample).
StageState stage2_decohere(const StageState& state, const MeasurementConfig& config, Rng& rng);
StageState stage2_decohere(const StageState& state, const MeasurementConfig& config);

StageState stage3_latent(const StageState& state);

/// Draws one uniform from rng.
StageState stage4_observe(const StageState& state, Rng& rng);

/// The stage-1 conditional pointer permutation (an involution).
const ComplexMatrix& premeasurement_unitary();

/// Born weights (p_up, p_down) read off the pointer diagonal of a stage >= 1 state.
std::pair<double, double> born_weights(const DensityMatrix& rho);

/// Largest |rho_ij| linking the up and down branches.
double branch_coherence(const DensityMatrix& rho);

struct EnergyBudget {
  double required_entropy_dump = 0.0;  // Delta S_a lower bound = S2
  double required_energy = 0.0;        // T_a * Delta S_a
  bool detectable = false;             // delta_E1 >= R * T_a / 2
  bool amplified = false;              // delta_E2 > delta_E1
};

EnergyBudget energy_budget_check(const MeasurementConfig& config);

/// -p ln p - q ln q
double binary_entropy(double p_up);

MeasurementRecord run_pipeline(const MeasurementConfig& config);

/// Stage 0..3 once, then stage 4 sampled `runs` times from one stream.
struct RepeatedRun {
  MeasurementRecord first;
  std::vector<Outcome> outcomes;
  double s2 = 0.0;
};
RepeatedRun run_repeated(const MeasurementConfig& config, std::uint64_t runs);

}  // namespace qdm::measurement
