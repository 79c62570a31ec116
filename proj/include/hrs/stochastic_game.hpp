#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hrs/ltlf.hpp"

namespace hrs {

using StateIndex = std::uint32_t;

/// Controller of a state. The numeric values are the player ids of the
/// explicit `.pla` format.
enum class Player : std::uint8_t { Robot = 1, Human = 2 };

struct Transition {
  StateIndex target;
  double probability;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Explicit turn-based two-player stochastic game in compressed sparse form.
///
/// Choices of state s are [choice_begin[s], choice_begin[s+1]); outcomes of
/// choice c are transitions[transition_begin[c] .. transition_begin[c+1]),
/// sorted by target with no duplicates. Every state carries a valuation of
/// `variables` (used for display and the `.sta` file) and a sorted list of
/// indices into `propositions`. `target` is either empty or one flag per state.
struct StochasticGame {
  std::vector<std::string> variables;
  std::vector<std::vector<std::int64_t>> valuations;
  std::vector<Player> players;
  std::vector<std::size_t> choice_begin{0};
  std::vector<std::string> choice_action;
  std::vector<std::size_t> transition_begin{0};
  std::vector<Transition> transitions;
  StateIndex initial = 0;
  std::vector<std::string> propositions;
  std::vector<std::vector<std::uint32_t>> labels;
  std::vector<bool> target;

  std::size_t num_states() const { return players.size(); }
  std::size_t num_choices() const { return choice_action.size(); }
  std::size_t num_transitions() const { return transitions.size(); }

  std::size_t first_choice(StateIndex s) const { return choice_begin[s]; }
  std::size_t end_choice(StateIndex s) const { return choice_begin[s + 1]; }
  std::size_t num_choices(StateIndex s) const { return end_choice(s) - first_choice(s); }
  std::span<const Transition> outcomes(std::size_t choice) const {
    return {transitions.data() + transition_begin[choice], transition_begin[choice + 1] - transition_begin[choice]};
  }
  /// Outcomes of the `local`-th choice of state s.
  std::span<const Transition> outcomes(StateIndex s, std::size_t local) const { return outcomes(first_choice(s) + local); }
  const std::string& action(StateIndex s, std::size_t local) const { return choice_action[first_choice(s) + local]; }

  bool is_target(StateIndex s) const { return !target.empty() && target[s]; }
  Label label(StateIndex s) const;
  bool has_proposition(StateIndex s, std::string_view prop) const;
  /// "(v1,v2,...)".
  std::string valuation_string(StateIndex s) const;
};

/// Appends states and choices in state order; outcome lists are merged,
/// sorted and stripped of zero-probability entries.
class GameBuilder {
 public:
  GameBuilder(std::vector<std::string> variables, std::vector<std::string> propositions);

  StateIndex add_state(Player player, std::vector<std::int64_t> valuation, std::vector<std::uint32_t> label);
  /// Choices must be added for states in non-decreasing index order.
  void add_choice(StateIndex s, std::string action, std::vector<Transition> outcomes);
  std::size_t num_states() const { return game_.players.size(); }
  const StochasticGame& peek() const { return game_; }
  StochasticGame finish(StateIndex initial);

 private:
  void close_states_up_to(StateIndex s);

  StochasticGame game_;
  StateIndex open_state_ = 0;
};

/// Single-choice self-loop with probability one.
inline constexpr const char* kStayAction = "stay";

/// Reports every state without a choice and every choice whose outcome mass
/// deviates from one by more than `tolerance` or points outside the game.
std::vector<std::string> check_structure(const StochasticGame& g, double tolerance = 1e-9);

}  // namespace hrs
