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

#include "qdm/error.hpp"
#include "qdm/worldledger/ledger.hpp"
#include "random_models.hpp"

using namespace qdm;
using namespace qdm::worldledger;

namespace {

DensityMatrix basis(std::size_t n, std::size_t i) { return from_pure(PureState::basis(n, i)); }

std::vector<std::pair<double, DensityMatrix>> halves(std::size_t n) {
  return {{0.5, basis(n, 0)}, {0.5, basis(n, 1)}};
}

const char* kMergeScenario =
    "prepare 0.5 0.6 0.8\n"
    "prepare 0.5 0.6 -0.8\n"
    "evolve\n"
    "decohere analytic\n"
    "merge\n"
    "stats\n"
    "split\n"
    "stats\n";

}  // namespace

TEST_CASE("split weights") {
  const WorldLedger root = WorldLedger::single("W", basis(2, 0));
  const WorldLedger one = split(root, "W", halves(2));
  REQUIRE(one.worlds().size() == 2);
  CHECK(one.worlds()[0].weight == 0.5);
  CHECK(one.worlds()[1].weight == 0.5);
  CHECK(std::abs(one.total_weight() - 1.0) <= 1e-10);

  const WorldLedger two = split(one, one.worlds()[1].id, halves(2));
  std::vector<double> weights;
  for (const World& w : two.worlds()) weights.push_back(w.weight);
  CHECK(weights == std::vector<double>{0.5, 0.25, 0.25});

  const LedgerStats st = ledger_stats(one);
  CHECK(st.n_worlds == 2);
  CHECK(st.n_splits == 1);
  CHECK(st.n_merges == 0);
}

TEST_CASE("split rejections") {
  const WorldLedger root = WorldLedger::single("W", basis(2, 0));
  const std::vector<std::pair<double, DensityMatrix>> degenerate{{1.0, basis(2, 0)}, {0.0, basis(2, 1)}};
  CHECK_THROWS_AS(split(root, "W", degenerate), RejectionError);
  const std::vector<std::pair<double, DensityMatrix>> same{{0.5, basis(2, 0)}, {0.5, basis(2, 0)}};
  CHECK_THROWS_AS(split(root, "W", same), RejectionError);
  const std::vector<std::pair<double, DensityMatrix>> short_sum{{0.5, basis(2, 0)}, {0.4, basis(2, 1)}};
  CHECK_THROWS_AS(split(root, "W", short_sum), ValidationError);
  CHECK_THROWS(split(root, "nope", halves(2)));

  // The strong version allows indistinguishable children.
  const WorldLedger strong = WorldLedger::single("W", basis(2, 0), 1e-8, Version::strong);
  CHECK(split(strong, "W", same).worlds().size() == 2);
}

TEST_CASE("merge") {
  SUBCASE("orthogonal worlds stay apart") {
    const WorldLedger l = split(WorldLedger::single("W", basis(2, 0)), "W", halves(2));
    const WorldLedger m = merge(l);
    CHECK(m.worlds().size() == 2);
    CHECK(ledger_stats(m).n_merges == 0);
  }
  SUBCASE("three copies become one world of weight 1") {
    testing::Gen gen(40);
    const DensityMatrix rho = gen.density(3);
    WorldLedger l;
    l.add_world(World{"a", rho, 0.2, -1});
    l.add_world(World{"b", rho, 0.3, -1});
    l.add_world(World{"c", rho, 0.5, -1});
    const WorldLedger m = merge(l);
    REQUIRE(m.worlds().size() == 1);
    CHECK(std::abs(m.worlds()[0].weight - 1.0) <= 1e-12);
    CHECK(max_abs_diff(m.worlds()[0].state.matrix(), rho.matrix()) <= 1e-12);
    CHECK(ledger_stats(m).n_merges == 1);
  }
  SUBCASE("idempotent and entropy monotone") {
    testing::Gen gen(41);
    const DensityMatrix a = gen.density(2);
    const DensityMatrix near(a.matrix() + ComplexMatrix{{1e-10, 0.0}, {0.0, -1e-10}});
    WorldLedger l;
    l.add_world(World{"a", a, 0.4, -1});
    l.add_world(World{"b", near, 0.35, -1});
    l.add_world(World{"c", basis(2, 1), 0.25, -1});
    const WorldLedger once = merge(l);
    const WorldLedger twice = merge(once);
    CHECK(once.worlds().size() == 2);
    CHECK(twice.worlds().size() == once.worlds().size());
    CHECK(twice.events().size() == once.events().size());
    CHECK(ledger_stats(once).ensemble_entropy >= ledger_stats(l).ensemble_entropy - 1e-10);
  }
}

TEST_CASE("split keeps the ensemble state when children mix back to the parent") {
  const DensityMatrix parent(ComplexMatrix::diagonal(std::vector<double>{0.3, 0.7}));
  const WorldLedger root = WorldLedger::single("W", parent);
  const std::vector<std::pair<double, DensityMatrix>> out{{0.3, basis(2, 0)}, {0.7, basis(2, 1)}};
  const WorldLedger l = split(root, "W", out);
  CHECK(max_abs_diff(ensemble_state(l).matrix(), ensemble_state(root).matrix()) <= 1e-10);
  CHECK(std::abs(ledger_stats(l).ensemble_entropy - ledger_stats(root).ensemble_entropy) <= 1e-10);
  for (const World& w : l.worlds()) CHECK(vn_entropy(w.state) <= 1e-12);
}

TEST_CASE("fresh ledger stats") {
  testing::Gen gen(42);
  const DensityMatrix rho = gen.density(3);
  const LedgerStats st = ledger_stats(WorldLedger::single("W", rho));
  CHECK(st.n_worlds == 1);
  CHECK(st.n_splits == 0);
  CHECK(st.n_merges == 0);
  CHECK(std::abs(st.ensemble_entropy - vn_entropy(rho)) <= 1e-12);
}

TEST_CASE("scripted merge then split") {
  const auto script = parse_script(kMergeScenario);
  REQUIRE(script.size() == 8);
  const ScriptResult res = run_script(script);
  CHECK(res.stats.n_merges == 1);
  CHECK(res.stats.n_splits == 1);
  CHECK(res.stats.n_worlds == 2);
  CHECK(std::abs(res.ledger.total_weight() - 1.0) <= 1e-10);
  REQUIRE(res.snapshots.size() == 2);
  CHECK(res.snapshots[0].stats.n_worlds == 1);
  CHECK(std::abs(res.ledger.worlds()[0].weight - 0.36) <= 1e-12);
  CHECK(std::abs(res.ledger.worlds()[1].weight - 0.64) <= 1e-12);

  // Same script and seed give the same event log.
  const ScriptResult again = run_script(script);
  CHECK(again.ledger.events().size() == res.ledger.events().size());
  CHECK(again.ledger.worlds()[0].id == res.ledger.worlds()[0].id);
}

TEST_CASE("script edge cases") {
  CHECK(parse_script("").empty());
  CHECK(parse_script("# only a comment\n\n").empty());
  const ScriptResult empty = run_script(std::vector<Command>{});
  CHECK(empty.ledger.worlds().empty());

  CHECK_THROWS_AS(parse_script("jump\n"), ValidationError);
  CHECK_THROWS_AS(parse_script("prepare 1 0.6\n"), ValidationError);
  CHECK_THROWS_AS(parse_script("split 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_script("decohere monte_carlo\n"), ValidationError);

  // prepare after another command is a script error naming the command.
  const auto late = parse_script("prepare 1 0.6 0.8\nevolve\nprepare 0.5 0.6 0.8\n");
  CHECK_THROWS_WITH_AS(run_script(late), doctest::Contains("command #2"), ValidationError);

  // Weights that do not sum to one are caught once preparation ends.
  const auto light = parse_script("prepare 0.5 0.6 0.8\nevolve\n");
  CHECK_THROWS_AS(run_script(light), InvariantError);

  // Splitting before decoherence has nothing to split.
  CHECK_THROWS_AS(run_script(parse_script("prepare 1 0.6 0.8\nsplit\n")), ValidationError);

  // A degenerate split is rejected.
  CHECK_THROWS_AS(run_script(parse_script("prepare 1 0.6 0.8\ndecohere\nsplit 1 0\n")), RejectionError);
}

TEST_CASE("Monte Carlo decoherence in scripts is seeded") {
  const auto script = parse_script("prepare 1 0.6 0.8\nevolve\ndecohere monte_carlo 500\nstats\n");
  ScriptOptions a;
  a.seed = 7;
  const ScriptResult r1 = run_script(script, a);
  const ScriptResult r2 = run_script(script, a);
  CHECK(r1.ledger.worlds()[0].state == r2.ledger.worlds()[0].state);
  a.seed = 8;
  const ScriptResult r3 = run_script(script, a);
  CHECK_FALSE(r3.ledger.worlds()[0].state == r1.ledger.worlds()[0].state);
}
