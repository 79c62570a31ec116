#include "hrs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hrs {

namespace {

// Predecessor structure: for every state, the global indices of the choices
// that can lead into it.
struct Predecessors {
  std::vector<std::size_t> begin;
  std::vector<std::size_t> choices;
  std::vector<StateIndex> owner;  // state owning each choice

  explicit Predecessors(const StochasticGame& g) {
    const std::size_t n = g.num_states();
    owner.resize(g.num_choices());
    for (StateIndex s = 0; s < n; ++s)
      for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) owner[c] = s;
    begin.assign(n + 1, 0);
    for (const auto& t : g.transitions) ++begin[t.target + 1];
    for (std::size_t i = 0; i < n; ++i) begin[i + 1] += begin[i];
    choices.resize(g.transitions.size());
    std::vector<std::size_t> fill(begin.begin(), begin.end() - 1);
    for (std::size_t c = 0; c < g.num_choices(); ++c)
      for (const auto& t : g.outcomes(c)) choices[fill[t.target]++] = c;
  }

  template <typename F>
  void for_each(StateIndex s, F&& f) const {
    for (std::size_t i = begin[s]; i < begin[s + 1]; ++i) f(choices[i]);
  }
};

bool maximizes(const StochasticGame& g, StateIndex s, Objective objective) {
  return (g.players[s] == Player::Robot) == (objective == Objective::Maximize);
}

// States that can reach `seed` with positive probability: the maximizer needs
// one choice hitting the set, the minimizer must hit it with every choice.
// Only choices flagged in `allowed` count (all choices when empty).
StateSet positive_attractor(const StochasticGame& g, const Predecessors& pred, const StateSet& seed,
                            const std::vector<bool>& allowed, const StateSet& domain, Objective objective) {
  const std::size_t n = g.num_states();
  StateSet in = seed;
  std::vector<std::size_t> remaining(n);
  std::vector<bool> choice_hit(g.num_choices(), false);
  for (StateIndex s = 0; s < n; ++s) {
    std::size_t count = 0;
    bool all_allowed = true;
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
      if (allowed.empty() || allowed[c]) ++count;
      else all_allowed = false;
    }
    // A minimizer with an escaping choice never joins.
    remaining[s] = (!maximizes(g, s, objective) && !all_allowed) ? static_cast<std::size_t>(-1) : count;
  }
  std::vector<StateIndex> stack;
  for (StateIndex s = 0; s < n; ++s)
    if (in[s]) stack.push_back(s);
  while (!stack.empty()) {
    const StateIndex t = stack.back();
    stack.pop_back();
    pred.for_each(t, [&](std::size_t c) {
      const StateIndex s = pred.owner[c];
      if (in[s] || !domain[s] || choice_hit[c]) return;
      if (!allowed.empty() && !allowed[c]) return;
      choice_hit[c] = true;
      if (maximizes(g, s, objective)) {
        in[s] = true;
        stack.push_back(s);
      } else if (remaining[s] != static_cast<std::size_t>(-1) && --remaining[s] == 0) {
        in[s] = true;
        stack.push_back(s);
      }
    });
  }
  return in;
}

StateSet target_set(const StochasticGame& g) {
  StateSet t(g.num_states(), false);
  for (StateIndex s = 0; s < g.num_states(); ++s) t[s] = g.is_target(s);
  return t;
}

}  // namespace

StateSet prob0(const ProductGame& pg, Objective objective) {
  const auto& g = pg.game;
  const Predecessors pred(g);
  const StateSet everywhere(g.num_states(), true);
  StateSet reach = positive_attractor(g, pred, target_set(g), {}, everywhere, objective);
  reach.flip();
  return reach;
}

StateSet prob1(const ProductGame& pg, Objective objective) {
  const auto& g = pg.game;
  const std::size_t n = g.num_states();
  const Predecessors pred(g);
  const StateSet target = target_set(g);
  StateSet y(n, true);
  while (true) {
    // Choices whose whole support stays in Y.
    std::vector<bool> inside(g.num_choices(), true);
    for (std::size_t c = 0; c < g.num_choices(); ++c)
      for (const auto& t : g.outcomes(c))
        if (!y[t.target]) inside[c] = false;
    StateSet x = positive_attractor(g, pred, target, inside, y, objective);
    if (x == y) return y;
    y = std::move(x);
  }
}

std::vector<EndComponent> find_mecs(const ProductGame& pg) {
  const auto& g = pg.game;
  const std::size_t n = g.num_states();
  std::vector<bool> active(g.num_choices(), true);
  std::vector<bool> alive(n, true);
  std::vector<std::int64_t> scc(n, -1);

  // Iterative Tarjan over alive states and active choices.
  const auto compute_sccs = [&]() {
    std::fill(scc.begin(), scc.end(), -1);
    std::vector<std::int64_t> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<StateIndex> stack;
    std::int64_t counter = 0, components = 0;
    struct Frame {
      StateIndex s;
      std::size_t choice;
      std::size_t trans;
    };
    std::vector<Frame> call;
    for (StateIndex root = 0; root < n; ++root) {
      if (!alive[root] || index[root] >= 0) continue;
      call.push_back({root, g.first_choice(root), 0});
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!call.empty()) {
        Frame& f = call.back();
        bool descended = false;
        while (f.choice < g.end_choice(f.s)) {
          if (!active[f.choice]) {
            ++f.choice;
            f.trans = 0;
            continue;
          }
          auto out = g.outcomes(f.choice);
          if (f.trans >= out.size()) {
            ++f.choice;
            f.trans = 0;
            continue;
          }
          const StateIndex t = out[f.trans++].target;
          if (!alive[t]) continue;
          if (index[t] < 0) {
            index[t] = low[t] = counter++;
            stack.push_back(t);
            on_stack[t] = true;
            call.push_back({t, g.first_choice(t), 0});
            descended = true;
            break;
          }
          if (on_stack[t]) low[f.s] = std::min(low[f.s], index[t]);
        }
        if (descended) continue;
        const StateIndex s = f.s;
        call.pop_back();
        if (!call.empty()) low[call.back().s] = std::min(low[call.back().s], low[s]);
        if (low[s] == index[s]) {
          StateIndex w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            scc[w] = components;
          } while (w != s);
          ++components;
        }
      }
    }
  };

  bool changed = true;
  while (changed) {
    changed = false;
    compute_sccs();
    for (StateIndex s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      bool any = false;
      for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
        if (!active[c]) continue;
        for (const auto& t : g.outcomes(c)) {
          if (!alive[t.target] || scc[t.target] != scc[s]) {
            active[c] = false;
            changed = true;
            break;
          }
        }
        any = any || active[c];
      }
      if (!any) {
        alive[s] = false;
        changed = true;
      }
    }
  }

  std::vector<EndComponent> mecs;
  std::vector<std::int64_t> slot(n, -1);
  std::vector<std::int64_t> mec_of_scc;
  for (StateIndex s = 0; s < n; ++s) {
    if (!alive[s]) continue;
    const auto id = static_cast<std::size_t>(scc[s]);
    if (mec_of_scc.size() <= id) mec_of_scc.resize(id + 1, -1);
    if (mec_of_scc[id] < 0) {
      mec_of_scc[id] = static_cast<std::int64_t>(mecs.size());
      mecs.emplace_back();
    }
    auto& m = mecs[static_cast<std::size_t>(mec_of_scc[id])];
    m.states.push_back(s);
    for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c)
      if (active[c]) m.choices.push_back(c);
  }
  return mecs;
}

std::vector<double> choice_values(const StochasticGame& g, const std::vector<double>& v, StateIndex s) {
  std::vector<double> out;
  out.reserve(g.num_choices(s));
  for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
    double sum = 0.0;
    for (const auto& t : g.outcomes(c)) sum += t.probability * v[t.target];
    out.push_back(sum);
  }
  return out;
}

namespace {

double backup(const StochasticGame& g, const std::vector<double>& v, StateIndex s, bool maximize) {
  double best = maximize ? -1.0 : 2.0;
  for (std::size_t c = g.first_choice(s); c < g.end_choice(s); ++c) {
    double sum = 0.0;
    for (const auto& t : g.outcomes(c)) sum += t.probability * v[t.target];
    best = maximize ? std::max(best, sum) : std::min(best, sum);
  }
  return best;
}

}  // namespace

ValueVector value_iteration(const ProductGame& pg, const SolverOptions& options) {
  if (!(options.epsilon > 0.0)) throw ParamError("epsilon must be positive");
  if (options.max_iterations < 1) throw ParamError("max_iterations must be at least 1");
  const auto& g = pg.game;
  const std::size_t n = g.num_states();
  const StateSet zero = prob0(pg, options.objective);
  const StateSet one = prob1(pg, options.objective);

  ValueVector result;
  result.epsilon = options.epsilon;
  result.values.assign(n, 0.0);
  std::vector<StateIndex> free_states;
  std::vector<bool> maximize(n);
  for (StateIndex s = 0; s < n; ++s) {
    maximize[s] = maximizes(g, s, options.objective);
    if (g.is_target(s) || one[s]) result.values[s] = 1.0;
    else if (!zero[s]) free_states.push_back(s);
  }

  auto& v = result.values;
  std::vector<double> next = v;
  const unsigned threads = options.gauss_seidel ? 1u : std::max(1u, options.threads);

  const auto sweep = [&](std::size_t lo, std::size_t hi) {
    double delta = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const StateIndex s = free_states[i];
      const double updated = backup(g, options.gauss_seidel ? next : v, s, maximize[s]);
      delta = std::max(delta, std::abs(updated - v[s]));
      next[s] = updated;
    }
    return delta;
  };

  result.converged = free_states.empty();
  while (!free_states.empty() && result.iterations < options.max_iterations) {
    double delta = 0.0;
    if (threads == 1 || free_states.size() < options.parallel_min_states) {
      delta = sweep(0, free_states.size());
    } else {
      std::vector<double> partial(threads, 0.0);
      {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (free_states.size() + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
          const std::size_t lo = std::min(free_states.size(), k * chunk);
          const std::size_t hi = std::min(free_states.size(), lo + chunk);
          pool.emplace_back([&, k, lo, hi] { partial[k] = sweep(lo, hi); });
        }
      }
      delta = *std::max_element(partial.begin(), partial.end());
    }
    if (options.check_monotone) {
      for (StateIndex s : free_states)
        if (next[s] < v[s]) throw std::logic_error("value iteration decreased the value of state " + std::to_string(s));
    }
    if (options.gauss_seidel) {
      for (StateIndex s : free_states) v[s] = next[s];
    } else {
      std::swap(v, next);
      for (StateIndex s : free_states) next[s] = v[s];
    }
    ++result.iterations;
    result.residual = delta;
    if (delta < options.epsilon) {
      result.converged = true;
      break;
    }
  }
  return result;
}

void require_converged(const ValueVector& v) {
  if (!v.converged)
    throw NonConvergence("value iteration stopped after " + std::to_string(v.iterations) +
                         " sweeps with residual " + std::to_string(v.residual));
}

std::optional<std::size_t> Strategy::robot_choice(StateIndex s) const {
  if (players[s] != Player::Robot || choice[s] < 0) return std::nullopt;
  return static_cast<std::size_t>(choice[s]);
}

std::optional<std::size_t> Strategy::human_choice(StateIndex s) const {
  if (players[s] != Player::Human || choice[s] < 0) return std::nullopt;
  return static_cast<std::size_t>(choice[s]);
}

Strategy extract_strategy(const ProductGame& pg, const ValueVector& v, Objective objective) {
  const auto& g = pg.game;
  const std::size_t n = g.num_states();
  const double tol = std::max(10.0 * v.epsilon, 1e-12);
  Strategy strat;
  strat.players = g.players;
  strat.choice.assign(n, -1);

  std::vector<std::vector<double>> q(n);
  std::vector<double> best(n, 0.0);
  std::vector<bool> maximize(n);
  for (StateIndex s = 0; s < n; ++s) {
    if (g.num_choices(s) == 0) continue;
    maximize[s] = maximizes(g, s, objective);
    q[s] = choice_values(g, v.values, s);
    best[s] = maximize[s] ? *std::max_element(q[s].begin(), q[s].end()) : *std::min_element(q[s].begin(), q[s].end());
    // Lowest optimal index; maximizer states may be overridden below.
    for (std::size_t c = 0; c < q[s].size(); ++c) {
      if (std::abs(q[s][c] - best[s]) <= tol) {
        strat.choice[s] = static_cast<std::int32_t>(c);
        break;
      }
    }
  }

  // Layered attractor toward the target over value-optimal maximizer choices.
  const StateSet zero = prob0(pg, objective);
  StateSet reached = target_set(g);
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<StateIndex, std::int32_t>> joined;
    for (StateIndex s = 0; s < n; ++s) {
      if (reached[s] || zero[s] || g.num_choices(s) == 0) continue;
      const auto hits = [&](std::size_t c) {
        for (const auto& t : g.outcomes(g.first_choice(s) + c))
          if (reached[t.target]) return true;
        return false;
      };
      if (maximize[s]) {
        for (std::size_t c = 0; c < q[s].size(); ++c) {
          if (q[s][c] >= best[s] - tol && hits(c)) {
            joined.emplace_back(s, static_cast<std::int32_t>(c));
            break;
          }
        }
      } else {
        bool all = true;
        for (std::size_t c = 0; c < q[s].size() && all; ++c) all = hits(c);
        if (all) joined.emplace_back(s, -1);
      }
    }
    for (const auto& [s, c] : joined) {
      reached[s] = true;
      if (c >= 0) strat.choice[s] = c;
      grew = true;
    }
  }
  return strat;
}

ValueVector strategy_values(const ProductGame& pg, const Strategy& strat, double epsilon, Objective objective) {
  const auto& g = pg.game;
  GameBuilder builder(g.variables, g.propositions);
  for (StateIndex s = 0; s < g.num_states(); ++s) builder.add_state(g.players[s], g.valuations[s], g.labels[s]);
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    const auto fixed = strat.robot_choice(s);
    for (std::size_t c = 0; c < g.num_choices(s); ++c) {
      if (g.players[s] == Player::Robot && fixed && *fixed != c) continue;
      auto out = g.outcomes(s, c);
      builder.add_choice(s, g.action(s, c), std::vector<Transition>(out.begin(), out.end()));
    }
  }
  ProductGame restricted{builder.finish(g.initial), pg.pairs};
  restricted.game.target = g.target;
  SolverOptions options;
  options.epsilon = epsilon;
  options.objective = objective;
  options.max_iterations = 10'000'000;
  return value_iteration(restricted, options);
}

bool verify_strategy(const ProductGame& pg, const Strategy& strat, const ValueVector& v, double epsilon,
                     Objective objective) {
  const ValueVector fixed = strategy_values(pg, strat, epsilon / 100.0, objective);
  for (StateIndex s = 0; s < pg.num_states(); ++s)
    if (std::abs(fixed[s] - v[s]) > 10.0 * epsilon) return false;
  return true;
}

}  // namespace hrs
