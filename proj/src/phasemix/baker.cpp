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

#include "qdm/phasemix/baker.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "qdm/error.hpp"
#include "qdm/kernels/kernels.hpp"

namespace qdm::phasemix {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kEntropySlack = 1e-12;

enum class Direction { forward, backward };

// index[j] = source cell whose weight lands on cell j.
std::vector<std::uint32_t> gather_index(std::size_t side, Direction dir) {
  const unsigned bits = static_cast<unsigned>(std::countr_zero(side));
  const std::size_t mask = side - 1;
  const unsigned top = bits - 1;
  std::vector<std::uint32_t> idx(side * side);
  for (std::size_t x = 0; x < side; ++x)
    for (std::size_t y = 0; y < side; ++y) {
      std::size_t sx, sy;
      if (dir == Direction::forward) {
        // preimage of (x, y) under the forward map
        sx = (x >> 1) | ((y >> top) << top);
        sy = ((y << 1) & mask) | (x & 1);
      } else {
        // image of (x, y) under the forward map
        sx = ((x << 1) & mask) | (y & 1);
        sy = (y >> 1) | ((x >> top) << top);
      }
      idx[x * side + y] = static_cast<std::uint32_t>(sx * side + sy);
    }
  return idx;
}

PhaseGrid permute(const PhaseGrid& grid, Direction dir) {
  const std::size_t side = grid.side();
  if (side == 1) return grid;
  const auto idx = gather_index(side, dir);
  std::vector<double> out(side * side);
  kernels::active().gather(grid.weights().data(), idx.data(), out.data(), out.size());
  return PhaseGrid(side, std::move(out));
}

}  // namespace

PhaseGrid::PhaseGrid(std::size_t side, std::vector<double> weights) : side_(side), weights_(std::move(weights)) {
  if (side_ == 0 || !std::has_single_bit(side_))
    throw ValidationError("PhaseGrid: side " + std::to_string(side_) + " is not a power of two");
  if (side_ > 65536) throw ValidationError("PhaseGrid: side too large");
  if (weights_.size() != side_ * side_)
    throw ValidationError("PhaseGrid: expected " + std::to_string(side_ * side_) + " weights");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("PhaseGrid: weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > kMassTol) {
    std::ostringstream os;
    os.precision(17);
    os << "PhaseGrid: total weight " << total << " is not 1";
    throw ValidationError(os.str());
  }
}

PhaseGrid PhaseGrid::point(std::size_t side, std::size_t x, std::size_t y) {
  if (x >= side || y >= side) throw ValidationError("PhaseGrid::point: cell outside the grid");
  std::vector<double> w(side * side, 0.0);
  w[x * side + y] = 1.0;
  return PhaseGrid(side, std::move(w));
}

PhaseGrid PhaseGrid::uniform(std::size_t side) {
  return PhaseGrid(side, std::vector<double>(side * side, 1.0 / static_cast<double>(side * side)));
}

PhaseGrid apply_map(const PhaseGrid& grid) { return permute(grid, Direction::forward); }

PhaseGrid apply_inverse(const PhaseGrid& grid) { return permute(grid, Direction::backward); }

PhaseGrid coarsen(const PhaseGrid& grid, std::size_t block) {
  const std::size_t side = grid.side();
  if (block == 0 || side % block != 0)
    throw ValidationError("coarsen: block " + std::to_string(block) + " does not divide N = " + std::to_string(side));
  if (block == 1) return grid;
  std::vector<double> out(side * side);
  kernels::active().block_average(grid.weights().data(), out.data(), side, block);
  PhaseGrid result(side, std::move(out));
  const double before = entropy(grid);
  const double after = entropy(result);
  if (after < before - kEntropySlack) {
    std::ostringstream os;
    os.precision(17);
    os << "coarsen: entropy decreased from " << before << " to " << after;
    throw InvariantError(os.str());
  }
  return result;
}

double entropy(const PhaseGrid& grid) {
  double s = 0.0;
  for (double w : grid.weights())
    if (w > 0.0) s -= w * std::log(w);
  return s;
}

std::size_t support(const PhaseGrid& grid) {
  std::size_t n = 0;
  for (double w : grid.weights())
    if (w > 0.0) ++n;
  return n;
}

double tv_distance(const PhaseGrid& a, const PhaseGrid& b) {
  if (a.side() != b.side()) throw ValidationError("tv_distance: grids have different sides");
  double s = 0.0;
  for (std::size_t i = 0; i < a.weights().size(); ++i) s += std::abs(a.weights()[i] - b.weights()[i]);
  return 0.5 * s;
}

MixingRun run_mixing(const PhaseGrid& initial, std::size_t steps, std::size_t block, std::size_t coarsen_every) {
  if (block != 0 && initial.side() % block != 0)
    throw ValidationError("run_mixing: block " + std::to_string(block) + " does not divide N");
  if (coarsen_every == 0) throw ValidationError("run_mixing: coarsen_every must be >= 1");
  MixingRun run;
  run.steps = steps;
  run.block = block;
  run.coarsen_every = coarsen_every;
  run.entropy_series.reserve(steps + 1);
  run.support_series.reserve(steps + 1);

  PhaseGrid g = initial;
  run.entropy_series.push_back(entropy(g));
  run.support_series.push_back(support(g));
  for (std::size_t k = 1; k <= steps; ++k) {
    g = apply_map(g);
    if (block >= 2 && k % coarsen_every == 0) g = coarsen(g, block);
    run.entropy_series.push_back(entropy(g));
    run.support_series.push_back(support(g));
  }
  run.final_grid = std::move(g);
  return run;
}

RetrodictionReport retrodiction_demo(const PhaseGrid& a, const PhaseGrid& b, std::size_t steps, std::size_t block,
                                     std::size_t coarsen_every) {
  if (a.side() != b.side()) throw ValidationError("retrodiction_demo: grids have different sides");
  if (block != 0 && a.side() % block != 0) throw ValidationError("retrodiction_demo: block does not divide N");
  if (coarsen_every == 0) throw ValidationError("retrodiction_demo: coarsen_every must be >= 1");
  RetrodictionReport rep;
  rep.initial_tv = tv_distance(a, b);
  rep.tv_series.push_back(rep.initial_tv);
  PhaseGrid ga = a, gb = b;
  for (std::size_t k = 1; k <= steps; ++k) {
    ga = apply_map(ga);
    gb = apply_map(gb);
    if (block >= 2 && k % coarsen_every == 0) {
      ga = coarsen(ga, block);
      gb = coarsen(gb, block);
    }
    rep.tv_series.push_back(tv_distance(ga, gb));
  }
  rep.final_tv = rep.tv_series.back();
  rep.run_a = run_mixing(a, steps, block, coarsen_every);
  rep.run_b = run_mixing(b, steps, block, coarsen_every);
  return rep;
}

double fitted_slope(std::span<const double> series, std::size_t first, std::size_t last) {
  if (last >= series.size() || last <= first) throw ValidationError("fitted_slope: bad index range");
  const double n = static_cast<double>(last - first + 1);
  double mt = 0.0, ms = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    mt += static_cast<double>(i);
    ms += series[i];
  }
  mt /= n;
  ms /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double dt = static_cast<double>(i) - mt;
    num += dt * (series[i] - ms);
    den += dt * dt;
  }
  return num / den;
}

}  // namespace qdm::phasemix
