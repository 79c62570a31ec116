#pragma once

// JSON scenario descriptions.
//
//   {"id": "arch", "kind": "pickplace", "description": "...",
//    "world": {"objects": [...], "locations": [...],
//              "robot_success": {"grasp": 0.95, "place": 0.9},
//              "robot_success_per_object": {"o": {"grasp": .., "place": ..}},
//              "human_success": 1.0,
//              "human_likelihood": [{"object", "from", "to", "weight"}],
//              "capacities": {"table": 2}, "stacking": [["lower", "upper"]],
//              "robot_can_place_else": true},
//    "init": {"object": "location"},
//    "propositions": [{"name": "p", "object": "o", "locations": ["l1", "l2"]}],
//    "turn_model": {"ratio": [2, 1]} | {"prob_termination": 0.05},
//    "formula": "F p", "objective": "max" | "min"}
//
//   {"id": "ttt", "kind": "tictactoe", "sigma": 1.0, "formula": "F RobotWin"}
//
//   {"id": "bench", "kind": "pickplace_generated", "objects": 2,
//    "locations": 5, "turn_model": {...}}
//
// Unknown keys are rejected.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrs/domain.hpp"
#include "hrs/game.hpp"
#include "hrs/scenarios.hpp"
#include "hrs/solver.hpp"

namespace hrs {

enum class ScenarioKind { PickPlace, TicTacToe };

struct ScenarioSpec {
  std::string id;
  ScenarioKind kind = ScenarioKind::PickPlace;
  std::string description;
  // pick-and-place
  WorldSpec world;
  std::map<std::string, std::string> init;
  std::vector<PropositionDef> propositions;
  TurnModel turn_model = RatioTurns{};
  // tic-tac-toe
  double sigma = 1.0;
  // default task
  std::string formula;
  Objective objective = Objective::Maximize;
};

/// Throws ParamError naming the offending key.
ScenarioSpec parse_scenario(std::string_view json_text);
/// Throws IoError or ParamError (prefixed with the file name).
ScenarioSpec load_scenario(const std::filesystem::path& file);
/// Every *.json file in `dir`, sorted by id. Throws ParamError on duplicate ids.
std::vector<ScenarioSpec> load_scenario_dir(const std::filesystem::path& dir);

std::string to_json(const ScenarioSpec& spec);

/// The game a scenario describes, with enough context to render its states.
struct ScenarioGame {
  StochasticGame game;
  std::optional<ManipulationGame> manipulation;
  std::optional<TicTacToe> tictactoe;
};

ScenarioGame build_scenario(const ScenarioSpec& spec, std::size_t max_states = 5'000'000);

/// Scenarios available without a scenario directory.
std::vector<ScenarioSpec> builtin_scenarios();

}  // namespace hrs
