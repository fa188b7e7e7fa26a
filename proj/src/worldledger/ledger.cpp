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

#include "qdm/worldledger/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdm/core/text_format.hpp"
#include "qdm/error.hpp"
#include "qdm/measurement/pipeline.hpp"

namespace qdm::worldledger {

namespace {

constexpr double kProbTol = 1e-12;

DensityTolerance ledger_tolerance() {
  DensityTolerance t;
  t.trace = kWeightTol;
  return t;
}

}  // namespace

WorldLedger::WorldLedger(double merge_tol, Version version) : merge_tol_(merge_tol), version_(version) {
  if (!(merge_tol >= 0.0) || !std::isfinite(merge_tol)) throw ValidationError("merge_tol: must be >= 0");
}

WorldLedger WorldLedger::single(std::string id, DensityMatrix state, double merge_tol, Version version) {
  WorldLedger l(merge_tol, version);
  l.add_world(World{std::move(id), std::move(state), 1.0, -1});
  return l;
}

const World& WorldLedger::world(std::string_view id) const {
  auto it = std::find_if(worlds_.begin(), worlds_.end(), [&](const World& w) { return w.id == id; });
  if (it == worlds_.end()) throw ValidationError("no world with id '" + std::string(id) + "'");
  return *it;
}

void WorldLedger::add_world(World w) {
  if (!(w.weight > 0.0 && w.weight <= 1.0 + kWeightTol))
    throw ValidationError("world '" + w.id + "': weight must lie in (0, 1]");
  for (const World& existing : worlds_)
    if (existing.id == w.id) throw ValidationError("duplicate world id '" + w.id + "'");
  if (!worlds_.empty() && worlds_.front().state.dim() != w.state.dim())
    throw ValidationError("world '" + w.id + "': state dimension differs from the ledger's");
  worlds_.push_back(std::move(w));
}

void WorldLedger::set_state(std::string_view id, DensityMatrix state, int stage) {
  auto it = std::find_if(worlds_.begin(), worlds_.end(), [&](const World& w) { return w.id == id; });
  if (it == worlds_.end()) throw ValidationError("no world with id '" + std::string(id) + "'");
  it->state = std::move(state);
  it->stage = stage;
}

double WorldLedger::total_weight() const noexcept {
  double s = 0.0;
  for (const World& w : worlds_) s += w.weight;
  return s;
}

void WorldLedger::check_invariants() const {
  for (const World& w : worlds_)
    if (!(w.weight > 0.0)) throw InvariantError("world '" + w.id + "' has non-positive weight");
  const double total = total_weight();
  if (std::abs(total - 1.0) > kWeightTol) {
    std::ostringstream os;
    os.precision(17);
    os << "total world weight " << total << " differs from 1";
    throw InvariantError(os.str());
  }
}

WorldLedger split(const WorldLedger& ledger, std::string_view world_id,
                  std::span<const std::pair<double, DensityMatrix>> outcomes) {
  auto it = std::find_if(ledger.worlds_.begin(), ledger.worlds_.end(), [&](const World& w) { return w.id == world_id; });
  if (it == ledger.worlds_.end()) throw ValidationError("split: no world with id '" + std::string(world_id) + "'");
  if (outcomes.size() < 2) throw ValidationError("split: need at least two outcomes");

  double total = 0.0;
  for (const auto& [p, rho] : outcomes) {
    if (!(p > 0.0)) throw RejectionError("split: outcome probabilities must be positive (degenerate split)");
    if (rho.dim() != it->state.dim()) throw ValidationError("split: child state dimension mismatch");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTol) throw ValidationError("split: probabilities do not sum to 1");

  if (ledger.version_ == Version::weak)
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      for (std::size_t j = i + 1; j < outcomes.size(); ++j)
        if (trace_distance(outcomes[i].second, outcomes[j].second) <= ledger.merge_tol_)
          throw RejectionError("split: children " + std::to_string(i) + " and " + std::to_string(j) +
                               " are indistinguishable; the weak version splits only at observable collapse");

  WorldLedger out = ledger;
  const std::size_t pos = static_cast<std::size_t>(it - ledger.worlds_.begin());
  const World parent = ledger.worlds_[pos];
  SplitEvent ev;
  ev.parent = parent.id;
  std::vector<World> children;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    World child{parent.id + "/" + std::to_string(k), outcomes[k].second, parent.weight * outcomes[k].first,
                parent.stage < 0 ? -1 : 4};
    ev.children.push_back(child.id);
    ev.probs.push_back(outcomes[k].first);
    children.push_back(std::move(child));
  }
  for (const World& c : children)
    for (const World& w : ledger.worlds_)
      if (w.id == c.id) throw ValidationError("split: child id '" + c.id + "' already exists");
  out.worlds_.erase(out.worlds_.begin() + static_cast<std::ptrdiff_t>(pos));
  out.worlds_.insert(out.worlds_.begin() + static_cast<std::ptrdiff_t>(pos), children.begin(), children.end());
  out.events_.push_back(std::move(ev));
  return out;
}

WorldLedger merge(const WorldLedger& ledger) {
  WorldLedger out = ledger;
  for (;;) {
    const std::size_t n = out.worlds_.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (trace_distance(out.worlds_[i].state, out.worlds_[j].state) <= out.merge_tol_) {
          const std::size_t a = find(i), b = find(j);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
          any = true;
        }
    if (!any) break;

    std::vector<World> next;
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t root = find(i);
      if (done[root]) continue;
      done[root] = true;
      std::vector<std::size_t> members;
      for (std::size_t j = i; j < n; ++j)
        if (find(j) == root) members.push_back(j);
      if (members.size() == 1) {
        next.push_back(out.worlds_[i]);
        continue;
      }
      double weight = 0.0;
      for (std::size_t j : members) weight += out.worlds_[j].weight;
      ComplexMatrix avg(out.worlds_[i].state.dim(), out.worlds_[i].state.dim());
      MergeEvent ev;
      int stage = out.worlds_[i].stage;
      for (std::size_t j : members) {
        avg.axpy(out.worlds_[j].weight / weight, out.worlds_[j].state.matrix());
        ev.parents.push_back(out.worlds_[j].id);
        if (out.worlds_[j].stage != stage) stage = -1;
      }
      ev.child = "M" + std::to_string(++out.merges_made_);
      next.push_back(World{ev.child, DensityMatrix(std::move(avg), ledger_tolerance()), weight, stage});
      out.events_.push_back(std::move(ev));
    }
    out.worlds_ = std::move(next);
  }
  return out;
}

DensityMatrix ensemble_state(const WorldLedger& ledger) {
  if (ledger.worlds().empty()) throw ValidationError("ensemble_state: ledger has no worlds");
  const std::size_t d = ledger.worlds().front().state.dim();
  ComplexMatrix acc(d, d);
  for (const World& w : ledger.worlds()) acc.axpy(w.weight, w.state.matrix());
  return DensityMatrix(std::move(acc), ledger_tolerance());
}

LedgerStats ledger_stats(const WorldLedger& ledger) {
  LedgerStats s;
  s.n_worlds = ledger.worlds().size();
  for (const Event& e : ledger.events()) {
    if (std::holds_alternative<SplitEvent>(e)) ++s.n_splits;
    else ++s.n_merges;
  }
  s.ensemble_entropy = ledger.worlds().empty() ? 0.0 : vn_entropy(ensemble_state(ledger));
  return s;
}

// Script ---------------------------------------------------------------------

std::vector<Command> parse_script(std::string_view text) {
  std::vector<Command> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line(text.substr(start, end - start));
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::string word;
    if (!(is >> word)) continue;
    Command c;
    c.line = line_no;
    if (word == "prepare") c.kind = CommandKind::prepare;
    else if (word == "evolve") c.kind = CommandKind::evolve;
    else if (word == "decohere") c.kind = CommandKind::decohere;
    else if (word == "split") c.kind = CommandKind::split;
    else if (word == "merge") c.kind = CommandKind::merge;
    else if (word == "stats") c.kind = CommandKind::stats;
    else throw ValidationError("script line " + std::to_string(line_no) + ": unknown command '" + word + "'");
    for (std::string arg; is >> arg;) c.args.push_back(arg);

    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (c.args.size() < lo || c.args.size() > hi)
        throw ValidationError("script line " + std::to_string(line_no) + ": '" + word + "' takes " +
                              std::to_string(lo) + (lo == hi ? "" : ".." + std::to_string(hi)) + " arguments");
    };
    switch (c.kind) {
      case CommandKind::prepare: arity(3, 3); break;
      case CommandKind::evolve:
      case CommandKind::merge:
      case CommandKind::stats: arity(0, 0); break;
      case CommandKind::decohere:
        arity(0, 2);
        if (!c.args.empty() && c.args[0] != "analytic" && c.args[0] != "monte_carlo")
          throw ValidationError("script line " + std::to_string(line_no) + ": decohere mode must be analytic or monte_carlo");
        if (!c.args.empty() && c.args[0] == "monte_carlo" && c.args.size() != 2)
          throw ValidationError("script line " + std::to_string(line_no) + ": decohere monte_carlo needs a sample count");
        if (!c.args.empty() && c.args[0] == "analytic" && c.args.size() != 1)
          throw ValidationError("script line " + std::to_string(line_no) + ": decohere analytic takes no count");
        break;
      case CommandKind::split:
        if (c.args.size() == 1)
          throw ValidationError("script line " + std::to_string(line_no) + ": split needs zero or at least two probabilities");
        break;
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Prefixes the message while keeping the concrete error type, so callers can
// still catch e.g. RejectionError from a script run.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& where) {
  const std::string msg = where + ": " + e.what();
  if (dynamic_cast<const RejectionError*>(&e)) throw RejectionError(msg);
  if (dynamic_cast<const InvariantError*>(&e)) throw InvariantError(msg);
  if (dynamic_cast<const SequencingError*>(&e)) throw SequencingError(msg);
  if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(msg);
  if (dynamic_cast<const SingularityError*>(&e)) throw SingularityError(msg);
  if (dynamic_cast<const IntegrationError*>(&e)) throw IntegrationError(msg);
  throw Error(e.kind(), msg);
}

double parse_number(const std::string& s, const Command& c) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("script line " + std::to_string(c.line) + ": malformed number '" + s + "'");
  }
}

measurement::StageState as_stage(const World& w) {
  return measurement::StageState{w.stage, w.state, vn_entropy(w.state), std::nullopt};
}

void require_pipeline_world(const World& w, const char* what) {
  if (w.stage < 0 || w.state.dim() != measurement::kDim)
    throw ValidationError(std::string(what) + ": world '" + w.id + "' is not a measurement-pipeline state");
}

class ScriptRunner {
 public:
  ScriptRunner(const WorldLedger& initial, const ScriptOptions& opts)
      : ledger_(initial), opts_(opts), rng_(opts.seed) {}

  ScriptResult run(std::span<const Command> script) {
    ScriptResult res{ledger_, {}, {}};
    if (script.empty()) {
      res.stats = ledger_.worlds().empty() ? LedgerStats{} : ledger_stats(ledger_);
      return res;
    }
    bool preparing = true;
    for (std::size_t i = 0; i < script.size(); ++i) {
      const Command& c = script[i];
      try {
        if (c.kind != CommandKind::prepare) preparing = false;
        else if (!preparing) throw ValidationError("prepare is only allowed before other commands");
        execute(c, i, res);
        if (!preparing) ledger_.check_invariants();
      } catch (const Error& e) {
        rethrow_with_context(e, "command #" + std::to_string(i) + " (line " + std::to_string(c.line) + ")");
      }
    }
    try {
      ledger_.check_invariants();
    } catch (const Error& e) {
      rethrow_with_context(e, "after command #" + std::to_string(script.size() - 1));
    }
    res.ledger = ledger_;
    res.stats = ledger_stats(ledger_);
    return res;
  }

 private:
  void execute(const Command& c, std::size_t index, ScriptResult& res) {
    switch (c.kind) {
      case CommandKind::prepare: prepare(c); break;
      case CommandKind::evolve: evolve(); break;
      case CommandKind::decohere: decohere(c); break;
      case CommandKind::split: split_all(c); break;
      case CommandKind::merge: ledger_ = merge(ledger_); break;
      case CommandKind::stats: res.snapshots.push_back({index, ledger_stats(ledger_)}); break;
    }
  }

  void prepare(const Command& c) {
    measurement::MeasurementConfig cfg;
    const double weight = parse_number(c.args[0], c);
    cfg.c_up = parse_complex(c.args[1]);
    cfg.c_down = parse_complex(c.args[2]);
    measurement::StageState s0 = measurement::stage0_prepare(cfg);
    ledger_.add_world(World{"W" + std::to_string(prepared_++), std::move(s0.rho), weight, 0});
  }

  void evolve() {
    for (const World& w : std::vector<World>(ledger_.worlds().begin(), ledger_.worlds().end())) {
      if (w.stage != 0) continue;
      measurement::StageState s1 = measurement::stage1_premeasure(as_stage(w));
      ledger_.set_state(w.id, std::move(s1.rho), 1);
    }
  }

  void decohere(const Command& c) {
    measurement::MeasurementConfig cfg;
    if (!c.args.empty() && c.args[0] == "monte_carlo") {
      const double m = parse_number(c.args[1], c);
      if (!(m >= 1.0) || m != std::floor(m)) throw ValidationError("decohere: sample count must be a positive integer");
      cfg.phase_mode = measurement::PhaseMode::monte_carlo;
      cfg.mc_samples = static_cast<std::uint64_t>(m);
    }
    for (const World& w : std::vector<World>(ledger_.worlds().begin(), ledger_.worlds().end())) {
      require_pipeline_world(w, "decohere");
      if (w.stage >= 2) continue;
      measurement::StageState s = as_stage(w);
      if (s.stage == 0) s = measurement::stage1_premeasure(s);
      s = measurement::stage2_decohere(s, cfg, rng_);
      ledger_.set_state(w.id, std::move(s.rho), 2);
    }
  }

  void split_all(const Command& c) {
    std::vector<double> probs;
    for (const std::string& a : c.args) probs.push_back(parse_number(a, c));
    if (!probs.empty() && probs.size() != 2)
      throw ValidationError("split: a measurement world has exactly two outcomes");
    bool any = false;
    for (const World& w : std::vector<World>(ledger_.worlds().begin(), ledger_.worlds().end())) {
      require_pipeline_world(w, "split");
      if (w.stage < 2 || w.stage == 4) continue;
      auto [p_up, p_down] = measurement::born_weights(w.state);
      const double total = p_up + p_down;
      p_up /= total;
      p_down /= total;
      if (!probs.empty()) {
        p_up = probs[0];
        p_down = probs[1];
      }
      using measurement::index_of;
      const std::pair<double, DensityMatrix> outcomes[2] = {
          {p_up, from_pure(PureState::basis(measurement::kDim, index_of(0, 1)))},
          {p_down, from_pure(PureState::basis(measurement::kDim, index_of(1, 2)))}};
      ledger_ = split(ledger_, w.id, outcomes);
      any = true;
    }
    if (!any) throw ValidationError("split: no decohered world to split");
  }

  WorldLedger ledger_;
  ScriptOptions opts_;
  measurement::Rng rng_;
  std::size_t prepared_ = 0;
};

}  // namespace

ScriptResult run_script(const WorldLedger& initial, std::span<const Command> script, const ScriptOptions& options) {
  return ScriptRunner(initial, options).run(script);
}

ScriptResult run_script(std::span<const Command> script, const ScriptOptions& options) {
  return run_script(WorldLedger(options.merge_tol, options.version), script, options);
}

}  // namespace qdm::worldledger
