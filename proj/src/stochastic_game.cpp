#include "hrs/stochastic_game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hrs {

Label StochasticGame::label(StateIndex s) const {
  std::vector<std::string> props;
  for (auto id : labels[s]) props.push_back(propositions[id]);
  return Label(std::move(props));
}

bool StochasticGame::has_proposition(StateIndex s, std::string_view prop) const {
  for (auto id : labels[s])
    if (propositions[id] == prop) return true;
  return false;
}

std::string StochasticGame::valuation_string(StateIndex s) const {
  std::string out = "(";
  const auto& v = valuations[s];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out + ")";
}

GameBuilder::GameBuilder(std::vector<std::string> variables, std::vector<std::string> propositions) {
  game_.variables = std::move(variables);
  game_.propositions = std::move(propositions);
}

StateIndex GameBuilder::add_state(Player player, std::vector<std::int64_t> valuation, std::vector<std::uint32_t> label) {
  if (valuation.size() != game_.variables.size()) throw std::logic_error("valuation size mismatch");
  std::sort(label.begin(), label.end());
  label.erase(std::unique(label.begin(), label.end()), label.end());
  game_.players.push_back(player);
  game_.valuations.push_back(std::move(valuation));
  game_.labels.push_back(std::move(label));
  return static_cast<StateIndex>(game_.players.size() - 1);
}

void GameBuilder::close_states_up_to(StateIndex s) {
  // choice_begin has one entry per closed state plus the leading zero.
  while (open_state_ < s) {
    game_.choice_begin.push_back(game_.choice_action.size());
    ++open_state_;
  }
}

void GameBuilder::add_choice(StateIndex s, std::string action, std::vector<Transition> outcomes) {
  if (s < open_state_) throw std::logic_error("choices must be added in state order");
  close_states_up_to(s);
  std::sort(outcomes.begin(), outcomes.end(), [](const Transition& a, const Transition& b) { return a.target < b.target; });
  std::vector<Transition> merged;
  for (const auto& t : outcomes) {
    if (t.probability == 0.0) continue;
    if (!merged.empty() && merged.back().target == t.target)
      merged.back().probability += t.probability;
    else
      merged.push_back(t);
  }
  game_.choice_action.push_back(std::move(action));
  game_.transitions.insert(game_.transitions.end(), merged.begin(), merged.end());
  game_.transition_begin.push_back(game_.transitions.size());
}

StochasticGame GameBuilder::finish(StateIndex initial) {
  close_states_up_to(static_cast<StateIndex>(game_.players.size()));
  game_.initial = initial;
  StochasticGame out = std::move(game_);
  game_ = StochasticGame{};
  open_state_ = 0;
  return out;
}

std::vector<std::string> check_structure(const StochasticGame& g, double tolerance) {
  std::vector<std::string> issues;
  const std::size_t n = g.num_states();
  if (g.choice_begin.size() != n + 1) issues.push_back("choice index has the wrong length");
  if (g.transition_begin.size() != g.num_choices() + 1) issues.push_back("transition index has the wrong length");
  if (!issues.empty()) return issues;
  if (n > 0 && g.initial >= n) issues.push_back("initial state out of range");
  for (StateIndex s = 0; s < n; ++s) {
    if (g.num_choices(s) == 0) issues.push_back("state " + std::to_string(s) + " has no choice");
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
      double sum = 0.0;
      for (const auto& t : g.outcomes(c)) {
        if (t.target >= n)
          issues.push_back("state " + std::to_string(s) + " choice " + std::to_string(c - g.first_choice(s)) +
                           " leads outside the game");
        sum += t.probability;
      }
      if (std::abs(sum - 1.0) > tolerance)
        issues.push_back("state " + std::to_string(s) + " choice " + std::to_string(c - g.first_choice(s)) +
                         " has outcome mass " + std::to_string(sum));
    }
  }
  return issues;
}

}  // namespace hrs
