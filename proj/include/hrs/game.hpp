#pragma once

// Two-player turn-based stochastic game over a pick-and-place world.

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hrs/domain.hpp"
#include "hrs/stochastic_game.hpp"

namespace hrs {

/// r robot actions, then h human actions, repeating. Counters reset when
/// control changes, so 4:2 differs from 2:1.
struct RatioTurns {
  int robot_quota = 1;
  int human_quota = 1;
};

/// Strict alternation while the human is active; every human action is
/// followed by a permanent stop with probability `p_term`.
struct ProbTermination {
  double p_term = 0.05;
};

using TurnModel = std::variant<RatioTurns, ProbTermination>;

/// "ratio:2:1" or "prob:0.05".
std::string to_string(const TurnModel& tm);
/// Inverse of to_string; throws ParamError.
TurnModel parse_turn_model(std::string_view text);
void check(const TurnModel& tm);

/// Proposition carried by every state in which the human has stopped.
inline constexpr const char* kHumanDone = "human_done";

struct GameState {
  Arrangement arrangement;
  Player control = Player::Robot;
  int counter = 0;
  bool human_active = true;

  friend bool operator==(const GameState&, const GameState&) = default;
};

struct GameStateHash {
  std::size_t operator()(const GameState& s) const noexcept;
};

/// A built game together with the world-level meaning of its states and choices.
struct ManipulationGame {
  World world;
  std::vector<Proposition> propositions;
  TurnModel turn_model;
  StochasticGame game;
  std::vector<GameState> states;
  std::vector<Actor> choice_actor;

  std::unordered_map<GameState, StateIndex, GameStateHash> index;

  std::optional<StateIndex> find(const GameState& s) const;
};

/// Breadth-first construction from (init, robot to move, counter 0, human
/// active). A robot with nothing to do takes `stay`, which leaves the
/// arrangement as it is and passes the turn like any other action. When the
/// human stops while holding an object, the object is returned to `else`.
/// Throws CapacityError past `max_states`.
ManipulationGame build_game(const World& w, const Arrangement& init, const std::vector<PropositionDef>& props,
                            const TurnModel& tm, std::size_t max_states = 1'000'000);

struct Violation {
  std::optional<StateIndex> state;
  std::optional<std::size_t> choice;  // local choice index
  std::string kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(std::string_view kind) const;
};

/// Checks the structural invariants of the game plus: choices match the
/// controller, counters respect quotas, a stopped human never regains
/// control, no human choice changes what the robot holds, and labels agree
/// with arrangements.
ValidationReport validate_game(const ManipulationGame& g);

}  // namespace hrs
