#include "hrs/product.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "hrs/errors.hpp"

namespace hrs {

ProductGame build_product(const StochasticGame& g, const Dfa& d, ProductOptions options) {
  const std::size_t n = g.num_states();
  std::vector<std::size_t> letter(n);
  for (StateIndex s = 0; s < n; ++s) {
    const Label projected = d.project(g.label(s));
    auto l = d.find_letter(projected);
    if (!l)
      throw AlphabetError("game state " + std::to_string(s) + " emits " + to_string(projected) +
                          ", which the automaton alphabet lacks");
    letter[s] = *l;
  }

  std::vector<std::string> vars = g.variables;
  vars.push_back("q");
  GameBuilder builder(std::move(vars), g.propositions);
  ProductGame pg;
  std::vector<bool> target;
  std::unordered_map<std::uint64_t, StateIndex> index;
  std::deque<StateIndex> queue;

  const auto lookup = [&](StateIndex s, DfaState q) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | q;
    auto [it, inserted] = index.emplace(key, static_cast<StateIndex>(pg.pairs.size()));
    if (inserted) {
      if (pg.pairs.size() >= options.max_states)
        throw CapacityError("product exceeds " + std::to_string(options.max_states) + " states");
      auto valuation = g.valuations[s];
      valuation.push_back(q);
      builder.add_state(g.players[s], std::move(valuation), g.labels[s]);
      pg.pairs.push_back({s, q});
      target.push_back(d.accepting(q));
      queue.push_back(it->second);
    }
    return it->second;
  };

  const StateIndex initial = lookup(g.initial, d.step(d.initial(), letter[g.initial]));
  while (!queue.empty()) {
    const StateIndex p = queue.front();
    queue.pop_front();
    const auto [s, q] = pg.pairs[p];
    if (options.absorb_targets && target[p]) {
      builder.add_choice(p, kAbsorbAction, {{p, 1.0}});
      continue;
    }
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
      std::vector<Transition> outcomes;
      for (const auto& t : g.outcomes(c)) outcomes.push_back({lookup(t.target, d.step(q, letter[t.target])), t.probability});
      builder.add_choice(p, g.choice_action[c], std::move(outcomes));
    }
  }
  pg.game = builder.finish(initial);
  pg.game.target = std::move(target);
  return pg;
}

ProductGame reachability_game(StochasticGame g, std::vector<bool> target) {
  if (target.size() != g.num_states()) throw ParamError("target flags must cover every state");
  g.target = std::move(target);
  return ProductGame{std::move(g), {}};
}

StochasticGame make_targets_absorbing(const StochasticGame& g) {
  GameBuilder builder(g.variables, g.propositions);
  for (StateIndex s = 0; s < g.num_states(); ++s) builder.add_state(g.players[s], g.valuations[s], g.labels[s]);
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    if (g.is_target(s)) {
      builder.add_choice(s, kAbsorbAction, {{s, 1.0}});
      continue;
    }
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
      auto out = g.outcomes(c);
      builder.add_choice(s, g.choice_action[c], std::vector<Transition>(out.begin(), out.end()));
    }
  }
  StochasticGame out = builder.finish(g.initial);
  out.target = g.target;
  return out;
}

std::vector<Label> game_alphabet(const StochasticGame& g, const std::set<std::string>& universe) {
  std::set<Label> seen;
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    std::vector<std::string> kept;
    for (auto id : g.labels[s])
      if (universe.contains(g.propositions[id])) kept.push_back(g.propositions[id]);
    seen.insert(Label(std::move(kept)));
  }
  return {seen.begin(), seen.end()};
}

}  // namespace hrs
