#pragma once

// Case-study generators: parameterized pick-and-place worlds, trembling-hand
// tic-tac-toe, and the benchmark harness over the pick-and-place family.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrs/domain.hpp"
#include "hrs/game.hpp"
#include "hrs/ltlf.hpp"
#include "hrs/solver.hpp"

namespace hrs {

struct PickPlaceScenario {
  WorldSpec world;
  std::map<std::string, std::string> init;
  std::vector<PropositionDef> propositions;
  Formula formula;
  TurnModel turn_model;
};

/// Objects O1..On start in `else`; locations are the two grippers, `else`
/// and L1..L(m-3). The task asks for every Oi to be at Li at some point.
/// Robot grasps and places succeed with probability 0.9. Throws ParamError
/// unless num_objects >= 1 and num_locations >= num_objects + 3.
PickPlaceScenario gen_pickplace(int num_objects, int num_locations, const TurnModel& tm);

ManipulationGame build_pickplace(const PickPlaceScenario& sc, std::size_t max_states = 1'000'000);

// ---------------------------------------------------------------------------
// Tic-tac-toe

enum class Cell : std::uint8_t { Empty = 0, Robot = 1, Human = 2 };

struct TttState {
  std::array<Cell, 9> board{};
  Player turn = Player::Robot;

  friend bool operator==(const TttState&, const TttState&) = default;
};

/// Owner of a completed line, Cell::Empty if none.
Cell ttt_winner(const TttState& s);
bool ttt_full(const TttState& s);
bool ttt_terminal(const TttState& s);

/// Where a marker aimed at `intended` lands. Cells sit on a unit grid;
/// landing weight is exp(-d^2 / (2 sigma^2)) in the distance from the
/// intended cell, and each landing cell is moved to its nearest unoccupied
/// cell (lowest index on ties). sigma <= 0 puts all mass on `intended`.
/// Throws ParamError if `intended` is occupied or out of range.
std::array<double, 9> tremble_distribution(const TttState& s, int intended, double sigma);

struct TicTacToe {
  double sigma = 0.0;
  StochasticGame game;
  std::vector<TttState> states;
  Formula robot_wins;  // F RobotWin, robot maximizes
  Formula human_wins;  // F HumanWin, robot minimizes
};

/// Full reachable game from the empty board, robot first. Choices are
/// "place:k" for every empty cell k; finished boards only have `stay`.
/// Variables c0..c8 (0 empty, 1 robot, 2 human) and turn.
TicTacToe gen_tictactoe(double sigma);

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchCell {
  int objects = 1;
  int locations = 4;
  TurnModel turn_model;
};

struct BenchResult {
  std::string scenario = "pickplace";
  int objects = 0;
  int locations = 0;
  std::string turn_model;
  std::size_t game_states = 0;
  std::size_t game_transitions = 0;
  /// Product counts, which are what the CSV reports.
  std::size_t states = 0;
  std::size_t transitions = 0;
  double build_s = 0.0;
  double solve_s = 0.0;
  double value = 0.0;
  /// "ok", or the error kind and message for a failed cell.
  std::string status = "ok";
};

struct BenchOptions {
  SolverOptions solver;
  /// Cells solved concurrently.
  unsigned jobs = 1;
  std::size_t max_states = 5'000'000;
};

/// Cross product objects x locations x turn models, in that nesting order.
std::vector<BenchCell> bench_matrix(const std::vector<int>& objects, const std::vector<int>& locations,
                                    const std::vector<TurnModel>& turn_models);

/// Runs every cell; failures become rows with a status instead of throwing.
/// Rows come back in the order of `cells`. Throws ParamError on an empty matrix.
std::vector<BenchResult> run_bench(const std::vector<BenchCell>& cells, const BenchOptions& options = {});

/// Header plus one row per result. `with_timing` false blanks the two
/// timing columns, which makes the output reproducible.
std::string bench_csv(const std::vector<BenchResult>& rows, bool with_timing = true);

}  // namespace hrs
