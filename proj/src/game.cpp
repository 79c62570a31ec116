#include "hrs/game.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>

#include "hrs/errors.hpp"

namespace hrs {

std::string to_string(const TurnModel& tm) {
  if (const auto* r = std::get_if<RatioTurns>(&tm))
    return "ratio:" + std::to_string(r->robot_quota) + ":" + std::to_string(r->human_quota);
  char buf[64];
  const auto p = std::get<ProbTermination>(tm).p_term;
  auto res = std::to_chars(buf, buf + sizeof buf, p);
  return "prob:" + std::string(buf, res.ptr);
}

void check(const TurnModel& tm) {
  if (const auto* r = std::get_if<RatioTurns>(&tm)) {
    if (r->robot_quota < 1 || r->human_quota < 1) throw ParamError("turn quotas must be positive");
    return;
  }
  const double p = std::get<ProbTermination>(tm).p_term;
  if (!(p > 0.0 && p <= 1.0)) throw ParamError("termination probability must lie in (0,1]");
}

TurnModel parse_turn_model(std::string_view text) {
  const auto number = [&](std::string_view s, auto& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw ParamError("bad turn model '" + std::string(text) + "'");
  };
  TurnModel tm;
  if (text.starts_with("ratio:")) {
    auto rest = text.substr(6);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParamError("bad turn model '" + std::string(text) + "'");
    RatioTurns r;
    number(rest.substr(0, colon), r.robot_quota);
    number(rest.substr(colon + 1), r.human_quota);
    tm = r;
  } else if (text.starts_with("prob:")) {
    ProbTermination p;
    number(text.substr(5), p.p_term);
    tm = p;
  } else {
    throw ParamError("bad turn model '" + std::string(text) + "' (expected ratio:R:H or prob:P)");
  }
  check(tm);
  return tm;
}

std::size_t GameStateHash::operator()(const GameState& s) const noexcept {
  std::size_t h = ArrangementHash{}(s.arrangement);
  h ^= (static_cast<std::size_t>(s.control) << 1) ^ (static_cast<std::size_t>(s.counter) << 3) ^
       (static_cast<std::size_t>(s.human_active) << 2);
  return h * 0x9e3779b97f4a7c15ull;
}

std::optional<StateIndex> ManipulationGame::find(const GameState& s) const {
  auto it = index.find(s);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

namespace {

// Where control goes after the controller of `s` completes an action.
std::vector<GameState> after_action(const TurnModel& tm, const GameState& s, const Arrangement& next) {
  if (const auto* r = std::get_if<RatioTurns>(&tm)) {
    const int quota = s.control == Player::Robot ? r->robot_quota : r->human_quota;
    if (s.counter + 1 < quota) return {{next, s.control, s.counter + 1, true}};
    return {{next, s.control == Player::Robot ? Player::Human : Player::Robot, 0, true}};
  }
  if (s.control == Player::Robot) return {{next, s.human_active ? Player::Human : Player::Robot, 0, s.human_active}};
  return {{next, Player::Robot, 0, true}};
}

}  // namespace

ManipulationGame build_game(const World& w, const Arrangement& init, const std::vector<PropositionDef>& defs,
                            const TurnModel& tm, std::size_t max_states) {
  check(tm);
  w.check(init);
  ManipulationGame mg{w, resolve_propositions(w, defs), tm, {}, {}, {}, {}};
  const bool prob_term = std::holds_alternative<ProbTermination>(tm);
  const double p_term = prob_term ? std::get<ProbTermination>(tm).p_term : 0.0;

  std::vector<std::string> prop_names;
  for (const auto& p : mg.propositions) {
    if (p.name == kHumanDone) throw ParamError(std::string("proposition name '") + kHumanDone + "' is reserved");
    prop_names.push_back(p.name);
  }
  const auto done_id = static_cast<std::uint32_t>(prop_names.size());
  if (prob_term) prop_names.push_back(kHumanDone);

  std::vector<std::string> vars(w.spec().objects);
  vars.push_back("turn");
  vars.push_back(prob_term ? "active" : "counter");
  GameBuilder builder(std::move(vars), prop_names);

  std::deque<StateIndex> queue;
  const auto lookup = [&](const GameState& gs) {
    auto [it, inserted] = mg.index.emplace(gs, static_cast<StateIndex>(mg.states.size()));
    if (inserted) {
      if (mg.states.size() >= max_states)
        throw CapacityError("game exceeds " + std::to_string(max_states) + " states");
      std::vector<std::int64_t> valuation(gs.arrangement.placement.begin(), gs.arrangement.placement.end());
      valuation.push_back(static_cast<std::int64_t>(gs.control));
      valuation.push_back(prob_term ? static_cast<std::int64_t>(gs.human_active) : gs.counter);
      std::vector<std::uint32_t> label;
      for (std::uint32_t i = 0; i < mg.propositions.size(); ++i) {
        const auto& p = mg.propositions[i];
        if (std::find(p.locations.begin(), p.locations.end(), gs.arrangement[p.object]) != p.locations.end())
          label.push_back(i);
      }
      if (prob_term && !gs.human_active) label.push_back(done_id);
      builder.add_state(gs.control, std::move(valuation), std::move(label));
      mg.states.push_back(gs);
      queue.push_back(it->second);
    }
    return it->second;
  };

  // Human stops: anything in the human's hand goes back to `else`.
  const auto released = [&](Arrangement a) {
    for (auto& l : a.placement)
      if (l == w.human_gripper()) l = w.else_location();
    return a;
  };

  const StateIndex initial = lookup(GameState{init, Player::Robot, 0, true});
  while (!queue.empty()) {
    const StateIndex s = queue.front();
    queue.pop_front();
    const GameState gs = mg.states[s];
    const bool robot = gs.control == Player::Robot;
    auto actions = robot ? ground_robot_actions(w, gs.arrangement) : ground_human_actions(w, gs.arrangement);
    if (actions.empty())
      actions.push_back({Actor::Robot, ActionKind::Stay, std::nullopt, 0, 0, {{gs.arrangement, 1.0}}, kStayAction});
    for (const auto& a : actions) {
      std::vector<Transition> outcomes;
      for (const auto& o : a.outcomes) {
        for (const auto& next : after_action(tm, gs, o.next)) {
          if (prob_term && !robot) {
            if (p_term < 1.0) outcomes.push_back({lookup(next), o.probability * (1.0 - p_term)});
            GameState stopped = next;
            stopped.arrangement = released(next.arrangement);
            stopped.human_active = false;
            outcomes.push_back({lookup(stopped), o.probability * p_term});
          } else {
            outcomes.push_back({lookup(next), o.probability});
          }
        }
      }
      builder.add_choice(s, a.name, std::move(outcomes));
      mg.choice_actor.push_back(a.actor);
    }
  }
  mg.game = builder.finish(initial);
  return mg;
}

bool ValidationReport::has(std::string_view kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_game(const ManipulationGame& mg) {
  ValidationReport report;
  const auto& g = mg.game;
  const auto add = [&](std::optional<StateIndex> s, std::optional<std::size_t> c, std::string kind, std::string msg) {
    report.violations.push_back({s, c, std::move(kind), std::move(msg)});
  };
  const std::size_t n = g.num_states();
  if (mg.states.size() != n || mg.choice_actor.size() != g.num_choices() || g.choice_begin.size() != n + 1 ||
      g.transition_begin.size() != g.num_choices() + 1) {
    add(std::nullopt, std::nullopt, "shape", "state or choice tables have inconsistent sizes");
    return report;
  }
  const bool prob_term = std::holds_alternative<ProbTermination>(mg.turn_model);
  const auto* ratio = std::get_if<RatioTurns>(&mg.turn_model);
  const auto& w = mg.world;

  for (StateIndex s = 0; s < n; ++s) {
    const GameState& gs = mg.states[s];
    if (g.players[s] != gs.control) add(s, std::nullopt, "controller", "player table disagrees with state");
    if (ratio) {
      const int quota = gs.control == Player::Robot ? ratio->robot_quota : ratio->human_quota;
      if (gs.counter < 0 || gs.counter >= quota)
        add(s, std::nullopt, "counter", "counter " + std::to_string(gs.counter) + " outside quota");
    }
    if (prob_term && !gs.human_active && gs.control == Player::Human)
      add(s, std::nullopt, "termination", "human controls a state after stopping");

    Label expected = label_of(mg.propositions, gs.arrangement);
    if (prob_term && !gs.human_active) expected.insert(kHumanDone);
    if (g.label(s) != expected) add(s, std::nullopt, "labeling", "label " + to_string(g.label(s)) + " expected " + to_string(expected));

    if (g.num_choices(s) == 0) add(s, std::nullopt, "deadlock", "no choice available");
    const auto held = w.held_by_robot(gs.arrangement);
    for (std::size_t local = 0; local < g.num_choices(s); ++local) {
      const std::size_t c = g.first_choice(s) + local;
      const Actor actor = mg.choice_actor[c];
      if ((actor == Actor::Robot) != (gs.control == Player::Robot))
        add(s, local, "turn_partition", std::string(to_string(actor)) + " action '" + g.choice_action[c] + "' at a " +
                                            (gs.control == Player::Robot ? "robot" : "human") + " state");
      double sum = 0.0;
      for (const auto& t : g.outcomes(c)) {
        sum += t.probability;
        if (t.target >= n) {
          add(s, local, "dangling", "successor out of range");
          continue;
        }
        if (actor == Actor::Human && w.held_by_robot(mg.states[t.target].arrangement) != held)
          add(s, local, "end_effector", "human action '" + g.choice_action[c] + "' alters the robot gripper");
      }
      if (std::abs(sum - 1.0) > 1e-9)
        add(s, local, "normalization", "outcome mass " + std::to_string(sum) + " at choice '" + g.choice_action[c] + "'");
    }
  }
  return report;
}

}  // namespace hrs
