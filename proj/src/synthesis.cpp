#include "hrs/synthesis.hpp"

#include <algorithm>
#include <chrono>

#include "hrs/errors.hpp"

namespace hrs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Synthesis synthesize(const StochasticGame& g, const Formula& f, const SolverOptions& options) {
  const std::set<std::string> universe = f.propositions();
  for (const auto& p : universe)
    if (std::find(g.propositions.begin(), g.propositions.end(), p) == g.propositions.end())
      throw ParamError("formula mentions '" + p + "', which the game does not label");

  SynthesisTimings t;
  auto start = std::chrono::steady_clock::now();
  Dfa dfa = to_dfa(f, universe, game_alphabet(g, universe));
  t.dfa_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  ProductGame pg = build_product(g, dfa);
  t.product_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  StateSet zero = prob0(pg, options.objective);
  StateSet one = prob1(pg, options.objective);
  auto mecs = find_mecs(pg);
  ValueVector values = value_iteration(pg, options);
  require_converged(values);
  Strategy strategy = extract_strategy(pg, values, options.objective);
  t.solve_s = seconds_since(start);

  return Synthesis{f,
                   std::move(dfa),
                   std::move(pg),
                   std::move(zero),
                   std::move(one),
                   std::move(mecs),
                   std::move(values),
                   std::move(strategy),
                   t};
}

}  // namespace hrs
