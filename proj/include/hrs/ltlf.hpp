#pragma once

// LTLf formulas: syntax tree, concrete syntax, negation normal form and the
// direct finite-trace semantics used as the reference for automaton
// construction.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hrs {

enum class Op {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  WeakNext,
  Until,
  Release,
  Eventually,
  Globally,
};

/// Immutable LTLf syntax tree. Copies share structure; equality and ordering
/// are structural.
class Formula {
 public:
  static Formula truth();
  static Formula falsity();
  static Formula atom(std::string name);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula next(Formula f);
  static Formula weak_next(Formula f);
  static Formula until(Formula lhs, Formula rhs);
  static Formula release(Formula lhs, Formula rhs);
  static Formula eventually(Formula f);
  static Formula globally(Formula f);

  Op op() const;
  /// Proposition name; only meaningful for Op::Atom.
  const std::string& name() const;
  /// Operand of a unary operator or left operand of a binary one.
  const Formula& lhs() const;
  const Formula& rhs() const;

  bool is_unary() const;
  bool is_binary() const;

  /// Every proposition mentioned, sorted.
  std::set<std::string> propositions() const;
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node);
  static Formula make(Op op, std::string name, Formula lhs, Formula rhs);
  std::shared_ptr<const Node> node_;
};

/// Parses the concrete syntax
///   true false ! & | -> X N U R F G ( ) and identifiers.
/// Precedence from tightest: unary (! X N F G), U/R (right associative),
/// & , | , -> (right associative). Throws SyntaxError.
Formula parse(std::string_view text);

/// Prints in a form `parse` reads back to a structurally equal formula.
std::string to_string(const Formula& f);

/// Negation normal form over {true, false, atoms, negated atoms, &, |, X, N, U, R}.
Formula to_nnf(const Formula& f);

/// A set of propositions observed at one step of a trace.
class Label {
 public:
  Label() = default;
  Label(std::initializer_list<std::string> props);
  explicit Label(std::vector<std::string> props);

  bool contains(std::string_view prop) const;
  void insert(std::string prop);
  const std::vector<std::string>& props() const { return props_; }
  bool empty() const { return props_.empty(); }
  std::size_t size() const { return props_.size(); }

  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;

 private:
  std::vector<std::string> props_;  // sorted, unique
};

std::string to_string(const Label& label);

/// Non-empty finite sequence of labels.
class Trace {
 public:
  /// Throws ParamError on an empty step list.
  explicit Trace(std::vector<Label> steps);
  Trace(std::initializer_list<Label> steps);

  std::size_t size() const { return steps_.size(); }
  const Label& operator[](std::size_t i) const { return steps_[i]; }
  const std::vector<Label>& steps() const { return steps_; }

 private:
  std::vector<Label> steps_;
};

/// Finite-trace satisfaction of `f` at position `i`. Throws IndexError when
/// `i` is outside the trace.
bool eval_trace(const Formula& f, const Trace& rho, std::size_t i = 0);

}  // namespace hrs
