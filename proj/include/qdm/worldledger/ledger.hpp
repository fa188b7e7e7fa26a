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

// Weighted set of branch worlds with a split/merge event log. Worlds split at
// observable collapse into macroscopically distinct children and merge when
// their states become indistinguishable (trace distance <= merge_tol).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qdm/core/density.hpp"

namespace qdm::worldledger {

/// weak: splits only into distinguishable children (observable collapse).
/// strong: indistinguishable children are allowed too (latent collapse).
enum class Version { weak, strong };

struct World {
  std::string id;
  DensityMatrix state;
  double weight = 1.0;
  int stage = -1;  // measurement stage of `state`, -1 when not a pipeline state
};

struct SplitEvent {
  std::string parent;
  std::vector<std::string> children;
  std::vector<double> probs;
};

struct MergeEvent {
  std::vector<std::string> parents;
  std::string child;
};

using Event = std::variant<SplitEvent, MergeEvent>;

inline constexpr double kWeightTol = 1e-10;

class WorldLedger {
 public:
  explicit WorldLedger(double merge_tol = 1e-8, Version version = Version::weak);

  /// Ledger holding one world of weight 1.
  static WorldLedger single(std::string id, DensityMatrix state, double merge_tol = 1e-8,
                            Version version = Version::weak);

  std::span<const World> worlds() const noexcept { return worlds_; }
  std::span<const Event> events() const noexcept { return events_; }
  double merge_tol() const noexcept { return merge_tol_; }
  Version version() const noexcept { return version_; }

  const World& world(std::string_view id) const;

  /// Adds a world without any weight check (used while preparing an ensemble).
  void add_world(World w);

  /// Replaces a world's state in place (evolution between events).
  void set_state(std::string_view id, DensityMatrix state, int stage);

  double total_weight() const noexcept;

  /// Throws InvariantError unless weights are positive and sum to 1 within 1e-10.
  void check_invariants() const;

 private:
  std::vector<World> worlds_;
  std::vector<Event> events_;
  double merge_tol_;
  Version version_;
  std::uint64_t merges_made_ = 0;

  friend WorldLedger split(const WorldLedger&, std::string_view, std::span<const std::pair<double, DensityMatrix>>);
  friend WorldLedger merge(const WorldLedger&);
};

/// Replaces `world_id` by children with weights weight * p_k. Probabilities
/// must be positive and sum to 1 within 1e-12. In the weak version children
/// must be pairwise farther apart than merge_tol (RejectionError otherwise).
WorldLedger split(const WorldLedger& ledger, std::string_view world_id,
                  std::span<const std::pair<double, DensityMatrix>> outcomes);

/// Combines every group of worlds linked by trace distance <= merge_tol into a
/// single world with summed weight and weight-averaged state. Repeats until
/// no pair is within tolerance, so a second call is a no-op.
WorldLedger merge(const WorldLedger& ledger);

struct LedgerStats {
  std::size_t n_worlds = 0;
  std::size_t n_splits = 0;
  std::size_t n_merges = 0;
  double ensemble_entropy = 0.0;
};

/// sum_w weight * state
DensityMatrix ensemble_state(const WorldLedger& ledger);

LedgerStats ledger_stats(const WorldLedger& ledger);

// Script interface -----------------------------------------------------------

enum class CommandKind { prepare, evolve, decohere, split, merge, stats };

struct Command {
  CommandKind kind;
  std::vector<std::string> args;
  std::size_t line = 0;
};

/// One command per line; blank lines and '#' comments ignored.
///   prepare <weight> <c_up> <c_down>     c as "re+imj"
///   evolve                               premeasurement unitary on stage-0 worlds
///   decohere [analytic | monte_carlo M]  premeasure if needed, then decohere
///   split [p1 p2 ...]                    Born split of every decohered world;
///                                        explicit probabilities override Born weights
///   merge
///   stats                                record a statistics snapshot
/// Throws ValidationError with the line number on malformed input.
std::vector<Command> parse_script(std::string_view text);

struct ScriptOptions {
  double merge_tol = 1e-8;
  Version version = Version::weak;
  std::uint64_t seed = 0;
};

struct Snapshot {
  std::size_t command_index = 0;  // 0-based position in the command list
  LedgerStats stats;
};

struct ScriptResult {
  WorldLedger ledger;
  LedgerStats stats;
  std::vector<Snapshot> snapshots;
};

/// Runs the commands in order starting from `initial`. Leading prepare
/// commands build the initial ensemble; invariants are checked after every
/// later command and at the end. Failures are rethrown with the offending
/// command index. An empty script returns `initial` untouched.
ScriptResult run_script(const WorldLedger& initial, std::span<const Command> script, const ScriptOptions& options = {});

/// Same, starting from an empty ledger configured from `options`.
ScriptResult run_script(std::span<const Command> script, const ScriptOptions& options = {});

}  // namespace qdm::worldledger
