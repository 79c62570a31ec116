#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "hrs/dfa.hpp"
#include "hrs/stochastic_game.hpp"

namespace hrs {

struct ProductState {
  StateIndex game_state;
  DfaState dfa_state;
  friend bool operator==(const ProductState&, const ProductState&) = default;
};

/// Reachability game: a StochasticGame whose `target` flags are set, plus the
/// (game, automaton) pair behind each state when it came from a product.
struct ProductGame {
  StochasticGame game;
  std::vector<ProductState> pairs;

  std::size_t num_states() const { return game.num_states(); }
  bool is_target(StateIndex s) const { return game.is_target(s); }
};

inline constexpr const char* kAbsorbAction = "absorb";

struct ProductOptions {
  /// Replace the choices of target states with a single self-loop.
  bool absorb_targets = true;
  std::size_t max_states = 20'000'000;
};

/// Reachable part of g x d. The automaton first reads the label of the
/// initial game state; every move then feeds it the label of the state
/// entered. Labels are projected onto the automaton's universe before lookup.
/// Throws AlphabetError when a projected label is missing from the alphabet.
ProductGame build_product(const StochasticGame& g, const Dfa& d, ProductOptions options = {});

/// Wraps a game with an explicit target set (pairs left empty).
ProductGame reachability_game(StochasticGame g, std::vector<bool> target);

/// Copy of `g` in which every target state has only the `absorb` self-loop.
StochasticGame make_targets_absorbing(const StochasticGame& g);

/// Distinct labels of `g`'s states projected onto `universe`, sorted. This is
/// the smallest alphabet a product with `g` needs.
std::vector<Label> game_alphabet(const StochasticGame& g, const std::set<std::string>& universe);

}  // namespace hrs
