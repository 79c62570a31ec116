#include <doctest.h>

#include <cmath>
#include <map>

#include "hrs/errors.hpp"
#include "hrs/game.hpp"
#include "hrs/product.hpp"
#include "hrs/solver.hpp"
#include "oracles/random_game.hpp"

using namespace hrs;

namespace {

// 0 (no label) -> 1 (p) -> 0, robot everywhere.
StochasticGame two_state_game() {
  GameBuilder b({"x"}, {"p"});
  b.add_state(Player::Robot, {0}, {});
  b.add_state(Player::Robot, {1}, {0});
  b.add_choice(0, "go", {{1, 1.0}});
  b.add_choice(1, "back", {{0, 1.0}});
  return b.finish(0);
}

ManipulationGame small_pickplace() {
  WorldSpec w;
  w.objects = {"O1", "O2"};
  w.locations = {"robot_gripper", "human_gripper", "else", "L1", "L2"};
  w.robot_success = {0.9, 0.9};
  const World world(w);
  return build_game(world, world.arrangement({{"O1", "else"}, {"O2", "else"}}),
                    {{"a", "O1", {"L1"}}, {"b", "O2", {"L2"}}}, RatioTurns{1, 1});
}

}  // namespace

TEST_CASE("product with the always-true automaton") {
  const auto mg = small_pickplace();
  const auto& g = mg.game;
  const Dfa d = to_dfa(parse("true"), {"a"});
  const auto pg = build_product(g, d, {.absorb_targets = false});
  REQUIRE(pg.num_states() == g.num_states());
  for (StateIndex s = 0; s < pg.num_states(); ++s) {
    CHECK(pg.is_target(s));
    CHECK(pg.game.players[s] == g.players[pg.pairs[s].game_state]);
    CHECK(pg.game.num_choices(s) == g.num_choices(pg.pairs[s].game_state));
  }
  // Isomorphic through the pair map.
  for (StateIndex s = 0; s < pg.num_states(); ++s)
    for (std::size_t k = 0; k < pg.game.num_choices(s); ++k) {
      const auto a = pg.game.outcomes(s, k);
      const auto b = g.outcomes(pg.pairs[s].game_state, k);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(pg.pairs[a[i].target].game_state == b[i].target);
        CHECK(a[i].probability == b[i].probability);
      }
    }
}

TEST_CASE("unreachable proposition gives an empty target") {
  // Only q ever holds.
  GameBuilder b({"x"}, {"p", "q"});
  b.add_state(Player::Robot, {0}, {1});
  b.add_state(Player::Human, {1}, {});
  b.add_choice(0, "a", {{1, 1.0}});
  b.add_choice(1, "b", {{0, 0.5}, {1, 0.5}});
  const auto g = b.finish(0);
  const auto pg = build_product(g, to_dfa(parse("F p"), {"p"}));
  for (StateIndex s = 0; s < pg.num_states(); ++s) CHECK_FALSE(pg.is_target(s));
  CHECK(pg.num_states() == 2);
}

TEST_CASE("two-state game times F p") {
  const auto g = two_state_game();
  const Dfa d = to_dfa(parse("F p"), {"p"});
  REQUIRE(d.num_states() == 2);
  const auto pg = build_product(g, d, {.absorb_targets = false});
  // By hand: (0,q0) -> (1,acc) -> (0,acc) -> (1,acc).
  REQUIRE(pg.num_states() == 3);
  CHECK(pg.num_states() <= g.num_states() * d.num_states());
  CHECK(pg.pairs[0].game_state == 0);
  CHECK(pg.pairs[0].dfa_state == d.initial());
  CHECK_FALSE(pg.is_target(0));
  for (StateIndex s = 1; s < 3; ++s) {
    CHECK(pg.is_target(s));
    CHECK(d.accepting(pg.pairs[s].dfa_state));
  }
  CHECK(pg.pairs[1].game_state == 1);
  CHECK(pg.pairs[2].game_state == 0);
}

TEST_CASE("the initial label is read before play") {
  const auto g = two_state_game();
  // Starting in the p state: F p holds on the first observation already.
  GameBuilder b({"x"}, {"p"});
  b.add_state(Player::Robot, {1}, {0});
  b.add_state(Player::Robot, {0}, {});
  b.add_choice(0, "go", {{1, 1.0}});
  b.add_choice(1, "stay", {{1, 1.0}});
  const auto pg = build_product(b.finish(0), to_dfa(parse("F p"), {"p"}));
  CHECK(pg.is_target(pg.game.initial));
  // X p needs a second observation with p.
  const auto pg2 = build_product(g, to_dfa(parse("X p"), {"p"}), {.absorb_targets = false});
  CHECK_FALSE(pg2.is_target(pg2.game.initial));
  CHECK(pg2.is_target(1));
}

TEST_CASE("targets are absorbing") {
  const auto mg = small_pickplace();
  const auto pg = build_product(mg.game, to_dfa(parse("F a"), {"a"}));
  std::size_t targets = 0;
  for (StateIndex s = 0; s < pg.num_states(); ++s) {
    if (!pg.is_target(s)) continue;
    ++targets;
    REQUIRE(pg.game.num_choices(s) == 1);
    CHECK(pg.game.action(s, 0) == kAbsorbAction);
    const auto out = pg.game.outcomes(s, 0);
    REQUIRE(out.size() == 1);
    CHECK(out[0].target == s);
  }
  CHECK(targets > 0);
  CHECK(check_structure(pg.game).empty());
}

TEST_CASE("product paths project onto game paths") {
  const auto mg = small_pickplace();
  const auto& g = mg.game;
  for (const char* text : {"F a & F b", "!b U a", "G(a -> X b)", "F(a & X !a)"}) {
    const Formula f = parse(text);
    const Dfa d = to_dfa(f, f.propositions());
    const auto pg = build_product(g, d, {.absorb_targets = false});
    const std::string name = text;
    CAPTURE(name);
    CHECK(pg.num_states() <= g.num_states() * d.num_states());
    CHECK(pg.pairs[pg.game.initial].game_state == g.initial);
    CHECK(pg.pairs[pg.game.initial].dfa_state == d.step(d.initial(), d.project(g.label(g.initial))));
    std::size_t bad = 0;
    for (StateIndex s = 0; s < pg.num_states(); ++s) {
      const auto [gs, q] = pg.pairs[s];
      CHECK(pg.is_target(s) == d.accepting(q));
      REQUIRE(pg.game.num_choices(s) == g.num_choices(gs));
      for (std::size_t k = 0; k < g.num_choices(gs); ++k) {
        const auto a = pg.game.outcomes(s, k);
        const auto b = g.outcomes(gs, k);
        if (a.size() != b.size() || pg.game.action(s, k) != g.action(gs, k)) {
          ++bad;
          continue;
        }
        std::map<StateIndex, double> lifted, expected;
        for (const auto& t : a) {
          const auto [gt, qt] = pg.pairs[t.target];
          if (qt != d.step(q, d.project(g.label(gt)))) ++bad;
          lifted[gt] = t.probability;
        }
        for (const auto& t : b) expected[t.target] = t.probability;
        if (lifted != expected) ++bad;
      }
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("absorption leaves values unchanged") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto rg = oracle::random_game(seed);
    const Dfa d = to_dfa(parse("F goal"), {"goal"});
    const auto with = build_product(rg.game, d);
    const auto without = build_product(rg.game, d, {.absorb_targets = false});
    // Absorption can cut off states behind targets; compare shared pairs.
    std::map<std::pair<StateIndex, DfaState>, StateIndex> index;
    for (StateIndex s = 0; s < without.num_states(); ++s) index[{without.pairs[s].game_state, without.pairs[s].dfa_state}] = s;
    for (Objective obj : {Objective::Maximize, Objective::Minimize}) {
      SolverOptions opt;
      opt.objective = obj;
      const auto v1 = value_iteration(with, opt);
      const auto v2 = value_iteration(without, opt);
      CAPTURE(seed);
      for (StateIndex s = 0; s < with.num_states(); ++s) {
        const auto it = index.find({with.pairs[s].game_state, with.pairs[s].dfa_state});
        REQUIRE(it != index.end());
        CHECK(std::abs(v1[s] - v2[it->second]) < 1e-9);
      }
    }
  }
}

TEST_CASE("labels outside the automaton alphabet") {
  const auto g = two_state_game();
  const Dfa d = to_dfa(parse("F p"), {"p"}, std::vector<Label>{Label{}});
  CHECK_THROWS_AS(build_product(g, d), AlphabetError);
  // Propositions outside the universe are projected away.
  GameBuilder b({"x"}, {"p", "zz"});
  b.add_state(Player::Robot, {0}, {1});
  b.add_choice(0, "stay", {{0, 1.0}});
  CHECK_NOTHROW(build_product(b.finish(0), to_dfa(parse("F p"), {"p"})));
}

TEST_CASE("game alphabet") {
  const auto mg = small_pickplace();
  const auto letters = game_alphabet(mg.game, {"a"});
  CHECK(letters == std::vector<Label>{Label{}, Label{"a"}});
  const Dfa d = to_dfa(parse("F a"), {"a"}, letters);
  CHECK(build_product(mg.game, d).num_states() > 0);
}
