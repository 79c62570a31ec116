#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hrs/ltlf.hpp"

namespace hrs {

using DfaState = std::uint32_t;

/// Complete deterministic automaton over an explicit alphabet of labels.
/// Every label of the alphabet is a subset of `universe`.
class Dfa {
 public:
  Dfa(std::vector<std::string> universe, std::vector<Label> alphabet, DfaState initial,
      std::vector<bool> accepting, std::vector<DfaState> delta);

  const std::vector<std::string>& universe() const { return universe_; }
  const std::vector<Label>& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return accepting_.size(); }
  DfaState initial() const { return initial_; }
  bool accepting(DfaState q) const { return accepting_[q]; }

  /// Index of `label` in the alphabet; throws AlphabetError when absent.
  std::size_t letter(const Label& label) const;
  std::optional<std::size_t> find_letter(const Label& label) const;
  /// Drops propositions outside the universe.
  Label project(const Label& label) const;

  DfaState step(DfaState q, std::size_t letter) const { return delta_[q * alphabet_.size() + letter]; }
  DfaState step(DfaState q, const Label& label) const { return step(q, letter(label)); }

 private:
  std::vector<std::string> universe_;
  std::vector<Label> alphabet_;
  std::map<Label, std::size_t> letter_index_;
  DfaState initial_;
  std::vector<bool> accepting_;
  std::vector<DfaState> delta_;
};

struct DfaOptions {
  std::size_t max_states = 1'000'000;
};

/// Compiles `f` into a DFA accepting exactly the non-empty traces that satisfy
/// it. With no explicit alphabet, all 2^|universe| labels are used. The
/// result is minimal, with state 0 initial and the rest numbered breadth-first.
/// Throws AlphabetError if `f` mentions a proposition outside `universe` (or a
/// given label does), CapacityError past `options.max_states`.
Dfa to_dfa(const Formula& f, const std::set<std::string>& universe,
           std::optional<std::vector<Label>> alphabet = std::nullopt, DfaOptions options = {});

/// Runs the automaton over `t`; throws AlphabetError on a label outside the alphabet.
bool dfa_accepts(const Dfa& d, const Trace& t);

}  // namespace hrs
