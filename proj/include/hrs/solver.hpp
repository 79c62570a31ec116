#pragma once

// Reachability solving on turn-based stochastic games: graph precomputation
// (prob0, prob1, maximal end components), value iteration and memoryless
// strategy extraction.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hrs/errors.hpp"
#include "hrs/product.hpp"

namespace hrs {

/// How the robot treats the probability of reaching the target. The human
/// always plays the opposite sense.
enum class Objective { Maximize, Minimize };

using StateSet = std::vector<bool>;

/// States from which the target is reached with probability 0 under optimal play.
StateSet prob0(const ProductGame& pg, Objective objective = Objective::Maximize);
/// States from which the target is reached with probability 1 under optimal play.
StateSet prob1(const ProductGame& pg, Objective objective = Objective::Maximize);

/// A maximal end component: states and the global indices of the choices
/// that stay inside it.
struct EndComponent {
  std::vector<StateIndex> states;
  std::vector<std::size_t> choices;
};

/// Maximal end components of the game graph with both players' choices
/// treated as nondeterminism. Sorted by smallest state.
std::vector<EndComponent> find_mecs(const ProductGame& pg);

struct SolverOptions {
  double epsilon = 1e-6;
  std::size_t max_iterations = 100'000;
  Objective objective = Objective::Maximize;
  /// Worker threads for Jacobi sweeps. Results do not depend on it.
  unsigned threads = 1;
  /// Sweeps over fewer free states than this stay on one thread.
  std::size_t parallel_min_states = 4096;
  /// In-place sweeps in state order instead of Jacobi sweeps.
  bool gauss_seidel = false;
  /// Throw std::logic_error if a sweep decreases any value.
  bool check_monotone = false;
};

struct ValueVector {
  std::vector<double> values;
  double epsilon = 0.0;
  std::size_t iterations = 0;
  /// Largest per-state change in the last sweep.
  double residual = 0.0;
  bool converged = true;

  double operator[](StateIndex s) const { return values[s]; }
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Values start at 1 on target and prob1 states and 0 elsewhere; prob0 and
/// prob1 states stay pinned. Robot states take the best expected successor
/// value for its objective, human states the worst. Stops when the largest
/// change drops below epsilon; reaching max_iterations leaves
/// `converged == false`.
ValueVector value_iteration(const ProductGame& pg, const SolverOptions& options = {});

/// Throws NonConvergence when `v` did not converge.
void require_converged(const ValueVector& v);

/// Memoryless deterministic choices, as local choice indices (-1: none).
struct Strategy {
  std::vector<std::int32_t> choice;
  std::vector<Player> players;

  std::optional<std::size_t> robot_choice(StateIndex s) const;
  std::optional<std::size_t> human_choice(StateIndex s) const;
};

/// Picks, at every state, an action whose expected value is optimal for the
/// controller (within 10 * epsilon), preferring the lowest index. For the
/// player maximizing reachability, the choice among optimal actions is
/// restricted to ones that make progress toward the target, so that
/// following the strategy cannot cycle forever in a positive-value region.
Strategy extract_strategy(const ProductGame& pg, const ValueVector& v, Objective objective = Objective::Maximize);

/// Values obtained when the robot is fixed to `strat` and the human responds
/// optimally.
ValueVector strategy_values(const ProductGame& pg, const Strategy& strat, double epsilon,
                            Objective objective = Objective::Maximize);

/// True iff fixing the robot to `strat` yields `v` at every state within 10 * epsilon.
bool verify_strategy(const ProductGame& pg, const Strategy& strat, const ValueVector& v, double epsilon,
                     Objective objective = Objective::Maximize);

/// Expected successor value of every choice of `s`.
std::vector<double> choice_values(const StochasticGame& g, const std::vector<double>& v, StateIndex s);

}  // namespace hrs
