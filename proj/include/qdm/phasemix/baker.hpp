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

// Measure on an N x N phase-space lattice evolved by the discrete baker map.
// With N = 2^n a cell (x, y) is a 2n-bit word; one baker step rotates that
// word by one bit, so the fine-grained dynamics is an exact permutation.
// Cell (x, y) is stored at index x * N + y.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qdm::phasemix {

class PhaseGrid {
 public:
  /// Throws ValidationError unless side is a power of two, weights are >= 0
  /// and sum to 1 within 1e-12.
  PhaseGrid(std::size_t side, std::vector<double> weights);

  /// All weight on cell (x, y).
  static PhaseGrid point(std::size_t side, std::size_t x, std::size_t y);
  static PhaseGrid uniform(std::size_t side);

  std::size_t side() const noexcept { return side_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double at(std::size_t x, std::size_t y) const noexcept { return weights_[x * side_ + y]; }

  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

 private:
  std::size_t side_;
  std::vector<double> weights_;
};

/// (x, y) -> (2x mod N | low bit of y, y / 2 | high bit of x * N / 2).
PhaseGrid apply_map(const PhaseGrid& grid);
PhaseGrid apply_inverse(const PhaseGrid& grid);

/// Uniform average over every block x block tile; block must divide N.
/// Throws InvariantError if the Gibbs entropy decreases.
PhaseGrid coarsen(const PhaseGrid& grid, std::size_t block);

/// Gibbs entropy -sum w ln w (nats); ln(support) for uniform-on-support measures.
double entropy(const PhaseGrid& grid);

std::size_t support(const PhaseGrid& grid);

/// (1/2) sum |a - b|
double tv_distance(const PhaseGrid& a, const PhaseGrid& b);

struct MixingRun {
  std::size_t steps = 0;
  std::size_t block = 0;  // 0 = no coarsening
  std::size_t coarsen_every = 1;
  std::vector<double> entropy_series;        // steps + 1 entries
  std::vector<std::size_t> support_series;   // steps + 1 entries
  PhaseGrid final_grid = PhaseGrid::uniform(1);
};

/// Each step applies the map, then coarsens when block >= 2 and the step
/// number is a multiple of coarsen_every. block = 0 or 1 never coarsens.
MixingRun run_mixing(const PhaseGrid& initial, std::size_t steps, std::size_t block, std::size_t coarsen_every = 1);

struct RetrodictionReport {
  double initial_tv = 0.0;
  double final_tv = 0.0;
  std::vector<double> tv_series;  // steps + 1 entries
  MixingRun run_a;
  MixingRun run_b;
};

/// Evolves both initial grids forward with the same coarsening and reports
/// how far apart they end up.
RetrodictionReport retrodiction_demo(const PhaseGrid& a, const PhaseGrid& b, std::size_t steps, std::size_t block,
                                     std::size_t coarsen_every = 1);

/// Least-squares slope of series[first..last] against the index.
double fitted_slope(std::span<const double> series, std::size_t first, std::size_t last);

}  // namespace qdm::phasemix
