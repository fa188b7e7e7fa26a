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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qdm/error.hpp"
#include "qdm/measurement/pipeline.hpp"
#include "random_models.hpp"

using namespace qdm;
using namespace qdm::measurement;

namespace {

MeasurementConfig config_for(cplx c_up, cplx c_down) {
  MeasurementConfig c;
  c.c_up = c_up;
  c.c_down = c_down;
  return c;
}

MeasurementConfig config_for_p(double p_up) { return config_for(std::sqrt(p_up), std::sqrt(1.0 - p_up)); }

const double kHalf = 1.0 / std::sqrt(2.0);
const std::size_t kUpReady = index_of(0, 0), kDownReady = index_of(1, 0);
const std::size_t kUpRead = index_of(0, 1), kDownRead = index_of(1, 2);

}  // namespace

TEST_CASE("stage 0 preparation") {
  const StageState s = stage0_prepare(config_for(kHalf, kHalf));
  CHECK(s.stage == 0);
  CHECK(std::abs(s.rho(kUpReady, kUpReady) - 0.5) <= 1e-15);
  CHECK(std::abs(s.rho(kDownReady, kDownReady) - 0.5) <= 1e-15);
  CHECK(s.entropy <= 1e-12);
  CHECK_FALSE(s.outcome.has_value());

  const StageState c = stage0_prepare(config_for(0.6, cplx(0.0, 0.8)));
  CHECK(std::abs(c.rho(kUpReady, kUpReady) - 0.36) <= 1e-15);
  CHECK(std::abs(c.rho(kDownReady, kDownReady) - 0.64) <= 1e-15);
  CHECK(std::abs(c.rho(kUpReady, kDownReady) - cplx(0.0, -0.48)) <= 1e-15);
  CHECK(c.entropy <= 1e-12);

  CHECK_THROWS_AS(stage0_prepare(config_for(1.0, 0.0)), ValidationError);
  CHECK_THROWS_AS(stage0_prepare(config_for(0.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(stage0_prepare(config_for(0.6, 0.6)), ValidationError);
  MeasurementConfig cold = config_for(kHalf, kHalf);
  cold.apparatus_temperature = 0.0;
  CHECK_THROWS_AS(validate(cold), ValidationError);
}

TEST_CASE("stage 1 pre-measurement") {
  const StageState s1 = stage1_premeasure(stage0_prepare(config_for(kHalf, kHalf)));
  CHECK(s1.stage == 1);
  CHECK(std::abs(std::abs(s1.rho(kUpRead, kDownRead)) - 0.5) <= 1e-15);
  CHECK(std::abs(s1.rho(kUpReady, kUpReady)) <= 1e-15);
  CHECK(s1.entropy <= 1e-12);

  const ComplexMatrix& u = premeasurement_unitary();
  CHECK(max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(kDim)) == 0.0);
  CHECK(max_abs_diff(u * u, ComplexMatrix::identity(kDim)) == 0.0);

  testing::Gen gen(20);
  for (int i = 0; i < 10; ++i) {
    const PureState psi = gen.pure(2);
    CHECK(stage1_premeasure(stage0_prepare(config_for(psi[0], psi[1]))).entropy <= 1e-10);
  }
  CHECK_THROWS_AS(stage1_premeasure(s1), SequencingError);
}

TEST_CASE("stage 2 analytic decoherence") {
  const MeasurementConfig cfg = config_for(kHalf, kHalf);
  const StageState s2 = stage2_decohere(stage1_premeasure(stage0_prepare(cfg)), cfg);
  CHECK(s2.stage == 2);
  CHECK(std::abs(s2.entropy - std::numbers::ln2) <= 1e-12);
  CHECK(branch_coherence(s2.rho) == 0.0);

  const MeasurementConfig near = config_for(std::sqrt(1 - 1e-6), std::sqrt(1e-6));
  const StageState n2 = stage2_decohere(stage1_premeasure(stage0_prepare(near)), near);
  const double q = 1e-6;
  const double expected = -((1 - q) * std::log1p(-q) + q * std::log(q));
  CHECK(std::abs(n2.entropy - expected) <= 1e-12);
  CHECK(std::abs(n2.entropy - 1.48e-5) <= 0.01e-5);

  CHECK_THROWS_AS(stage2_decohere(stage0_prepare(cfg), cfg), SequencingError);
}

TEST_CASE("stage 2 Monte Carlo decoherence") {
  MeasurementConfig cfg = config_for(kHalf, kHalf);
  cfg.phase_mode = PhaseMode::monte_carlo;
  const StageState s1 = stage1_premeasure(stage0_prepare(cfg));

  SUBCASE("residual within 5 / sqrt(M)") {
    cfg.mc_samples = 10000;
    Rng rng(99);
    const StageState s2 = stage2_decohere(s1, cfg, rng);
    CHECK(branch_coherence(s2.rho) <= 5.0 / std::sqrt(10000.0));
    CHECK(std::abs(s2.entropy - vn_entropy(s2.rho)) <= 1e-9);
  }
  SUBCASE("residual scales as M^-1/2") {
    // RMS over independent seeds so the ratio is not hostage to one draw.
    auto rms = [&](std::uint64_t m) {
      cfg.mc_samples = m;
      double acc = 0.0;
      const int reps = 40;
      for (int r = 0; r < reps; ++r) {
        Rng rng(1000 + r);
        acc += std::pow(branch_coherence(stage2_decohere(s1, cfg, rng).rho), 2);
      }
      return std::sqrt(acc / reps);
    };
    const double ratio = rms(100) / rms(10000);
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
  }
  SUBCASE("zero samples rejected") {
    cfg.mc_samples = 0;
    Rng rng(1);
    CHECK_THROWS_AS(stage2_decohere(s1, cfg, rng), ValidationError);
  }
}

TEST_CASE("stage 3 latent collapse is indistinguishable from stage 2") {
  const MeasurementConfig cfg = config_for_p(0.36);
  const StageState s2 = stage2_decohere(stage1_premeasure(stage0_prepare(cfg)), cfg);
  const StageState s3 = stage3_latent(s2);
  CHECK(s3.stage == 3);
  CHECK(s3.rho == s2.rho);
  CHECK(s3.entropy == s2.entropy);
  CHECK_FALSE(s3.outcome.has_value());
  CHECK(std::abs(s3.entropy - binary_entropy(0.36)) <= 1e-12);

  testing::Gen gen(21);
  for (int i = 0; i < 100; ++i) {
    const ComplexMatrix a = gen.hermitian(kDim);
    CHECK(std::abs(expectation(s2.rho, a) - expectation(s3.rho, a)) <= 1e-12);
  }
  CHECK_THROWS_AS(stage3_latent(s3), SequencingError);
}

TEST_CASE("stage 4 observation") {
  SUBCASE("degenerate Born weight always gives up") {
    const MeasurementConfig cfg = config_for(std::sqrt(1 - 1e-12), 1e-6);
    const StageState s3 = stage3_latent(stage2_decohere(stage1_premeasure(stage0_prepare(cfg)), cfg));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      CHECK(*stage4_observe(s3, rng).outcome == Outcome::up);
    }
  }
  SUBCASE("outcome projector and zero entropy") {
    const MeasurementConfig cfg = config_for(kHalf, kHalf);
    const StageState s3 = stage3_latent(stage2_decohere(stage1_premeasure(stage0_prepare(cfg)), cfg));
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
      const StageState s4 = stage4_observe(s3, rng);
      REQUIRE(s4.outcome.has_value());
      const std::size_t k = *s4.outcome == Outcome::up ? kUpRead : kDownRead;
      CHECK(s4.rho(k, k) == cplx(1.0));
      CHECK(s4.entropy <= 1e-12);
    }
    CHECK_THROWS_AS(stage4_observe(stage0_prepare(cfg), rng), SequencingError);
  }
}

TEST_CASE("Born frequencies within 3 sigma") {
  for (double p : {0.5, 0.36, 0.9}) {
    MeasurementConfig cfg = config_for_p(p);
    cfg.seed = 2026;
    const std::uint64_t n = 100000;
    const RepeatedRun run = run_repeated(cfg, n);
    REQUIRE(run.first.born_frequencies.has_value());
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
    CHECK(std::abs(run.first.born_frequencies->first - p) < 3 * sigma);
  }
}

TEST_CASE("energy budget") {
  MeasurementConfig cfg = config_for(kHalf, kHalf);
  const EnergyBudget b = energy_budget_check(cfg);
  CHECK(std::abs(b.required_energy - std::numbers::ln2) <= 1e-12);
  CHECK(std::abs(b.required_entropy_dump - std::numbers::ln2) <= 1e-12);
  cfg.delta_e1 = 0.1;
  CHECK_FALSE(energy_budget_check(cfg).detectable);
  cfg.delta_e1 = 100.0;
  CHECK(energy_budget_check(cfg).detectable);
  cfg.delta_e2 = 50.0;
  CHECK_FALSE(energy_budget_check(cfg).amplified);
  cfg.apparatus_temperature = -1.0;
  CHECK_THROWS_AS(energy_budget_check(cfg), ValidationError);
}

TEST_CASE("run_pipeline entropy profile and determinism") {
  for (double p : {0.5, 0.36, 0.1, 0.999}) {
    MeasurementConfig cfg = config_for_p(p);
    cfg.seed = 5;
    const MeasurementRecord rec = run_pipeline(cfg);
    REQUIRE(rec.stages.size() == 5);
    const double s = binary_entropy(p);
    const double expected[5] = {0.0, 0.0, s, s, 0.0};
    for (int k = 0; k < 5; ++k) {
      CHECK(rec.stages[k].stage == k);
      CHECK(std::abs(rec.stages[k].entropy - expected[k]) <= 1e-9);
    }
    CHECK(rec.stages[4].outcome.has_value());
    // The apparatus must absorb at least the entropy the observation removes.
    CHECK(energy_budget_check(cfg).required_entropy_dump >= rec.stages[3].entropy - rec.stages[4].entropy - 1e-12);

    const MeasurementRecord again = run_pipeline(cfg);
    CHECK(again.stages[4].outcome == rec.stages[4].outcome);
    for (int k = 0; k < 5; ++k) CHECK(again.stages[k].rho == rec.stages[k].rho);
  }
  // Closed form of -(p ln p + q ln q) at p = 0.36.
  CHECK(std::abs(run_pipeline(config_for(0.6, 0.8)).stages[2].entropy - 0.6534181947937018) <= 1e-12);
}
