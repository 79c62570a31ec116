#pragma once

// Formula -> automaton -> product -> solve -> strategy, in one call.

#include <string>
#include <vector>

#include "hrs/dfa.hpp"
#include "hrs/ltlf.hpp"
#include "hrs/product.hpp"
#include "hrs/solver.hpp"

namespace hrs {

struct SynthesisTimings {
  double dfa_s = 0.0;
  double product_s = 0.0;
  double solve_s = 0.0;
};

struct Synthesis {
  Formula formula;
  Dfa dfa;
  ProductGame product;
  StateSet zero;
  StateSet one;
  std::vector<EndComponent> mecs;
  ValueVector values;
  Strategy strategy;
  SynthesisTimings timings;

  double initial_value() const { return values[product.game.initial]; }
};

/// The automaton is built over the propositions of `f`, restricted to the
/// labels `g` actually emits. Throws ParamError when `f` names a proposition
/// the game does not have, NonConvergence when value iteration runs out of
/// sweeps.
Synthesis synthesize(const StochasticGame& g, const Formula& f, const SolverOptions& options = {});

}  // namespace hrs
