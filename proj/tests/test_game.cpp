#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

#include "hrs/errors.hpp"
#include "hrs/game.hpp"

using namespace hrs;

namespace {

WorldSpec small_world(int objects = 1, int locations = 5) {
  WorldSpec w;
  for (int o = 1; o <= objects; ++o) w.objects.push_back("O" + std::to_string(o));
  w.locations = {"robot_gripper", "human_gripper", "else"};
  for (int l = 1; l <= locations - 3; ++l) w.locations.push_back("L" + std::to_string(l));
  w.robot_success = {0.9, 0.8};
  return w;
}

ManipulationGame make(const TurnModel& tm, int objects = 1, int locations = 5) {
  const World w(small_world(objects, locations));
  std::map<std::string, std::string> init;
  for (const auto& o : w.spec().objects) init[o] = "else";
  return build_game(w, w.arrangement(init), {{"p", "O1", {"L1"}}}, tm);
}

/// Runs of the same controller along every path of `depth` steps from the
/// initial state; calls `fn` with the controller sequence.
void for_each_path(const StochasticGame& g, std::size_t depth, const std::function<void(const std::vector<Player>&)>& fn) {
  std::vector<Player> seq;
  std::function<void(StateIndex)> go = [&](StateIndex s) {
    seq.push_back(g.players[s]);
    if (seq.size() == depth) {
      fn(seq);
    } else {
      std::set<StateIndex> next;
      for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c)
        for (const auto& t : g.outcomes(c)) next.insert(t.target);
      for (auto t : next) go(t);
    }
    seq.pop_back();
  };
  go(g.initial);
}

}  // namespace

TEST_CASE("turn model text form") {
  CHECK(to_string(TurnModel{RatioTurns{2, 1}}) == "ratio:2:1");
  CHECK(to_string(TurnModel{ProbTermination{0.05}}) == "prob:0.05");
  CHECK(std::get<RatioTurns>(parse_turn_model("ratio:4:2")).robot_quota == 4);
  CHECK(std::get<ProbTermination>(parse_turn_model("prob:0.25")).p_term == 0.25);
  CHECK_THROWS_AS(parse_turn_model("ratio:0:1"), ParamError);
  CHECK_THROWS_AS(parse_turn_model("prob:0"), ParamError);
  CHECK_THROWS_AS(parse_turn_model("prob:1.5"), ParamError);
  CHECK_THROWS_AS(parse_turn_model("coin"), ParamError);
  CHECK_NOTHROW(check(TurnModel{ProbTermination{1.0}}));
}

TEST_CASE("built games validate") {
  for (const TurnModel& tm : {TurnModel{RatioTurns{1, 1}}, TurnModel{RatioTurns{2, 1}}, TurnModel{RatioTurns{4, 2}},
                              TurnModel{ProbTermination{0.05}}, TurnModel{ProbTermination{1.0}}}) {
    const auto mg = make(tm, 2, 6);
    CAPTURE(to_string(tm));
    const auto report = validate_game(mg);
    for (const auto& v : report.violations) MESSAGE(v.kind << ": " << v.message);
    CHECK(report.ok());
    CHECK(check_structure(mg.game).empty());
    CHECK(mg.game.players[mg.game.initial] == Player::Robot);
  }
}

TEST_CASE("ratio 2:1 gives two robot actions between human turns") {
  const auto mg = make(RatioTurns{2, 1});
  std::size_t paths = 0;
  for_each_path(mg.game, 2 * (2 + 1) + 2, [&](const std::vector<Player>& seq) {
    ++paths;
    // Completed runs have exactly the quota's length.
    std::size_t i = 0;
    while (i < seq.size()) {
      std::size_t j = i;
      while (j < seq.size() && seq[j] == seq[i]) ++j;
      if (j < seq.size()) CHECK(j - i == (seq[i] == Player::Robot ? 2u : 1u));
      else CHECK(j - i <= (seq[i] == Player::Robot ? 2u : 1u));
      i = j;
    }
  });
  CHECK(paths > 0);
}

TEST_CASE("ratio 1:1 alternates strictly") {
  const auto mg = make(RatioTurns{1, 1});
  const auto& g = mg.game;
  for (StateIndex s = 0; s < g.num_states(); ++s)
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c)
      for (const auto& t : g.outcomes(c)) CHECK(g.players[t.target] != g.players[s]);
}

TEST_CASE("4:2 differs from 2:1") {
  const auto a = make(RatioTurns{4, 2}, 1, 5);
  const auto b = make(RatioTurns{2, 1}, 1, 5);
  CHECK(a.game.num_states() != b.game.num_states());
}

TEST_CASE("probabilistic termination splits every human outcome") {
  const double p = 0.05;
  const auto mg = make(ProbTermination{p}, 2, 5);
  const auto& g = mg.game;
  std::size_t human_choices = 0;
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    if (g.players[s] != Player::Human) continue;
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
      ++human_choices;
      double active = 0.0, stopped = 0.0;
      for (const auto& t : g.outcomes(c)) (mg.states[t.target].human_active ? active : stopped) += t.probability;
      CHECK(std::abs(active - (1 - p)) < 1e-12);
      CHECK(std::abs(stopped - p) < 1e-12);
    }
  }
  CHECK(human_choices > 0);
}

TEST_CASE("a stopped human never returns") {
  const auto mg = make(ProbTermination{0.05}, 2, 5);
  const auto& g = mg.game;
  std::vector<bool> seen(g.num_states(), false);
  std::vector<StateIndex> stack;
  for (StateIndex s = 0; s < g.num_states(); ++s)
    if (!mg.states[s].human_active) seen[s] = true, stack.push_back(s);
  CHECK_FALSE(stack.empty());
  while (!stack.empty()) {
    const StateIndex s = stack.back();
    stack.pop_back();
    CHECK(g.players[s] == Player::Robot);
    CHECK(g.has_proposition(s, kHumanDone));
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c)
      for (const auto& t : g.outcomes(c))
        if (!seen[t.target]) seen[t.target] = true, stack.push_back(t.target);
  }
}

TEST_CASE("stopping releases a held object") {
  const auto mg = make(ProbTermination{0.5}, 1, 5);
  const LocationIndex hg = mg.world.human_gripper();
  for (const auto& gs : mg.states)
    if (!gs.human_active) CHECK(gs.arrangement[0] != hg);
}

TEST_CASE("every arrangement has a robot turn") {
  for (const TurnModel& tm : {TurnModel{RatioTurns{1, 2}}, TurnModel{ProbTermination{0.1}}}) {
    const auto mg = make(tm, 2, 5);
    std::set<Arrangement> all, robot;
    for (const auto& gs : mg.states) {
      all.insert(gs.arrangement);
      if (gs.control == Player::Robot) robot.insert(gs.arrangement);
    }
    CHECK(all == robot);
  }
}

TEST_CASE("robot with nothing to do passes the turn") {
  // The object sits in the human gripper: the robot cannot grasp it.
  const World w(small_world(1, 4));
  const auto mg = build_game(w, w.arrangement({{"O1", "human_gripper"}}), {}, RatioTurns{1, 1});
  const auto& g = mg.game;
  REQUIRE(g.num_choices(g.initial) == 1);
  CHECK(g.action(g.initial, 0) == kStayAction);
  const auto out = g.outcomes(g.initial, 0);
  REQUIRE(out.size() == 1);
  CHECK(g.players[out[0].target] == Player::Human);
  CHECK(validate_game(mg).ok());
}

TEST_CASE("validation catches corrupted games") {
  SUBCASE("normalization") {
    auto mg = make(RatioTurns{1, 1});
    mg.game.transitions[0].probability *= 0.9;
    const auto report = validate_game(mg);
    REQUIRE(report.has("normalization"));
    CHECK(report.violations[0].state.has_value());
  }
  SUBCASE("end effector") {
    auto mg = make(RatioTurns{1, 1});
    auto& g = mg.game;
    // Find a human choice from a state where the robot holds nothing and
    // redirect it to a state where it does.
    std::optional<StateIndex> holding;
    for (StateIndex s = 0; s < g.num_states(); ++s)
      if (mg.world.held_by_robot(mg.states[s].arrangement)) holding = s;
    REQUIRE(holding);
    bool injected = false;
    for (StateIndex s = 0; s < g.num_states() && !injected; ++s) {
      if (g.players[s] != Player::Human || mg.world.held_by_robot(mg.states[s].arrangement)) continue;
      const std::size_t c = g.first_choice(s);
      g.transitions[g.transition_begin[c]].target = *holding;
      injected = true;
    }
    REQUIRE(injected);
    CHECK(validate_game(mg).has("end_effector"));
  }
  SUBCASE("turn partition") {
    auto mg = make(RatioTurns{1, 1});
    mg.game.players[mg.game.initial] = Player::Human;
    CHECK(validate_game(mg).has("controller"));
    mg.states[mg.game.initial].control = Player::Human;
    CHECK(validate_game(mg).has("turn_partition"));
  }
  SUBCASE("labels") {
    auto mg = make(RatioTurns{1, 1});
    auto& l = mg.game.labels[0];
    l = l.empty() ? std::vector<std::uint32_t>{0} : std::vector<std::uint32_t>{};
    CHECK(validate_game(mg).has("labeling"));
  }
}

TEST_CASE("game construction is deterministic and bounded") {
  const auto a = make(RatioTurns{2, 1}, 2, 6);
  const auto b = make(RatioTurns{2, 1}, 2, 6);
  CHECK(a.game.valuations == b.game.valuations);
  CHECK(a.game.transitions == b.game.transitions);
  CHECK(a.game.choice_action == b.game.choice_action);
  const World w(small_world(3, 8));
  CHECK_THROWS_AS(build_game(w, w.arrangement({{"O1", "else"}, {"O2", "else"}, {"O3", "else"}}), {}, RatioTurns{1, 1}, 50),
                  CapacityError);
}

TEST_CASE("state variables") {
  const auto r = make(RatioTurns{1, 1});
  CHECK(r.game.variables == std::vector<std::string>{"O1", "turn", "counter"});
  const auto p = make(ProbTermination{0.05});
  CHECK(p.game.variables == std::vector<std::string>{"O1", "turn", "active"});
  CHECK(p.game.propositions.back() == kHumanDone);
}
