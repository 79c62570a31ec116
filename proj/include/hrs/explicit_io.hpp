#pragma once

// Explicit-state file bundle:
//
//   model.sta   (v1,v2,...)            then  idx:(x1,x2,...)
//   model.tra   numStates numChoices numTransitions
//               then  src choice dst prob action   sorted by (src, choice, dst)
//   model.lab   0="init" 1="target" 2="p" ...   then  idx: id id ...
//   model.pla   idx player                      (1 = robot, 2 = human)
//   model.str   idx action                      (optional strategy)
//
// Probabilities are written as the shortest decimal that reads back to the
// same double, so export -> import -> export is byte-identical.

#include <filesystem>
#include <string>

#include "hrs/solver.hpp"
#include "hrs/stochastic_game.hpp"

namespace hrs {

struct ExplicitBundle {
  std::filesystem::path sta;
  std::filesystem::path tra;
  std::filesystem::path lab;
  std::filesystem::path pla;
  std::filesystem::path str;  // empty unless a strategy was written
};

/// Writes the four model files into `dir` (created if missing). Throws IoError.
ExplicitBundle export_explicit(const StochasticGame& g, const std::filesystem::path& dir);

/// Reads the bundle in `dir`. Throws FormatError with file and line on
/// malformed content and IoError when a file is missing.
StochasticGame import_explicit(const std::filesystem::path& dir);

/// Writes `model.str`: one line per state with a choice.
std::filesystem::path export_strategy(const StochasticGame& g, const Strategy& strat, const std::filesystem::path& dir);
Strategy import_strategy(const StochasticGame& g, const std::filesystem::path& dir);

/// In-memory forms of the individual files.
std::string write_sta(const StochasticGame& g);
std::string write_tra(const StochasticGame& g);
std::string write_lab(const StochasticGame& g);
std::string write_pla(const StochasticGame& g);

/// Shortest round-trip decimal.
std::string format_probability(double p);

}  // namespace hrs
