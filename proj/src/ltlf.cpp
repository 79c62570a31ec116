#include "hrs/ltlf.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <utility>

#include "hrs/errors.hpp"

namespace hrs {

struct Formula::Node {
  Op op;
  std::string name;
  Formula lhs;
  Formula rhs;
};

Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Formula Formula::make(Op op, std::string name, Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{op, std::move(name), std::move(lhs), std::move(rhs)}));
}

Formula Formula::truth() {
  static const Formula f = make(Op::True, {}, Formula(nullptr), Formula(nullptr));
  return f;
}

Formula Formula::falsity() {
  static const Formula f = make(Op::False, {}, Formula(nullptr), Formula(nullptr));
  return f;
}

Formula Formula::atom(std::string name) { return make(Op::Atom, std::move(name), Formula(nullptr), Formula(nullptr)); }

Formula Formula::negation(Formula f) { return make(Op::Not, {}, std::move(f), Formula(nullptr)); }

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make(Op::And, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return make(Op::Or, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  return make(Op::Implies, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::next(Formula f) { return make(Op::Next, {}, std::move(f), Formula(nullptr)); }

Formula Formula::weak_next(Formula f) { return make(Op::WeakNext, {}, std::move(f), Formula(nullptr)); }

Formula Formula::until(Formula lhs, Formula rhs) {
  return make(Op::Until, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::release(Formula lhs, Formula rhs) {
  return make(Op::Release, {}, std::move(lhs), std::move(rhs));
}

Formula Formula::eventually(Formula f) { return make(Op::Eventually, {}, std::move(f), Formula(nullptr)); }

Formula Formula::globally(Formula f) { return make(Op::Globally, {}, std::move(f), Formula(nullptr)); }

Op Formula::op() const { return node_->op; }
const std::string& Formula::name() const { return node_->name; }

const Formula& Formula::lhs() const { return node_->lhs; }
const Formula& Formula::rhs() const { return node_->rhs; }

bool Formula::is_unary() const {
  switch (op()) {
    case Op::Not:
    case Op::Next:
    case Op::WeakNext:
    case Op::Eventually:
    case Op::Globally:
      return true;
    default:
      return false;
  }
}

bool Formula::is_binary() const {
  switch (op()) {
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Until:
    case Op::Release:
      return true;
    default:
      return false;
  }
}

std::set<std::string> Formula::propositions() const {
  std::set<std::string> out;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.op() == Op::Atom) out.insert(f.name());
    if (f.is_unary() || f.is_binary()) walk(f.lhs());
    if (f.is_binary()) walk(f.rhs());
  };
  walk(*this);
  return out;
}

std::size_t Formula::size() const {
  std::size_t n = 1;
  if (is_unary() || is_binary()) n += lhs().size();
  if (is_binary()) n += rhs().size();
  return n;
}

bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.op() <=> b.op(); c != 0) return c;
  if (a.op() == Op::Atom) return a.name() <=> b.name();
  if (a.is_unary() || a.is_binary()) {
    if (auto c = a.lhs() <=> b.lhs(); c != 0) return c;
  }
  if (a.is_binary()) return a.rhs() <=> b.rhs();
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { True, False, Ident, Not, And, Or, Implies, Next, WeakNext, Until, Release, Eventually, Globally, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    switch (c) {
      case '!': out.push_back({Tok::Not, start, "!"}); ++i; continue;
      case '&': out.push_back({Tok::And, start, "&"}); ++i; continue;
      case '|': out.push_back({Tok::Or, start, "|"}); ++i; continue;
      case '(': out.push_back({Tok::LParen, start, "("}); ++i; continue;
      case ')': out.push_back({Tok::RParen, start, ")"}); ++i; continue;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          out.push_back({Tok::Implies, start, "->"});
          i += 2;
          continue;
        }
        throw SyntaxError(start, "expected '->'");
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      std::string word(s.substr(start, i - start));
      Tok kind = Tok::Ident;
      if (word == "true") kind = Tok::True;
      else if (word == "false") kind = Tok::False;
      else if (word == "X") kind = Tok::Next;
      else if (word == "N") kind = Tok::WeakNext;
      else if (word == "U") kind = Tok::Until;
      else if (word == "R") kind = Tok::Release;
      else if (word == "F") kind = Tok::Eventually;
      else if (word == "G") kind = Tok::Globally;
      out.push_back({kind, start, std::move(word)});
      continue;
    }
    throw SyntaxError(start, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, s.size(), ""});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Formula parse_all() {
    Formula f = implication();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after formula");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(peek().pos, message); }

  Formula implication() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Implies) {
      take();
      return Formula::implication(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::Or) {
      take();
      f = Formula::disjunction(std::move(f), conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = temporal_binary();
    while (peek().kind == Tok::And) {
      take();
      f = Formula::conjunction(std::move(f), temporal_binary());
    }
    return f;
  }

  Formula temporal_binary() {
    Formula lhs = unary();
    if (peek().kind == Tok::Until) {
      take();
      return Formula::until(std::move(lhs), temporal_binary());
    }
    if (peek().kind == Tok::Release) {
      take();
      return Formula::release(std::move(lhs), temporal_binary());
    }
    return lhs;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::Not: take(); return Formula::negation(unary());
      case Tok::Next: take(); return Formula::next(unary());
      case Tok::WeakNext: take(); return Formula::weak_next(unary());
      case Tok::Eventually: take(); return Formula::eventually(unary());
      case Tok::Globally: take(); return Formula::globally(unary());
      default: return primary();
    }
  }

  Formula primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::True: take(); return Formula::truth();
      case Tok::False: take(); return Formula::falsity();
      case Tok::Ident: take(); return Formula::atom(t.text);
      case Tok::LParen: {
        take();
        Formula f = implication();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        take();
        return f;
      }
      case Tok::End: fail("unexpected end of formula");
      default: fail("expected a formula, found '" + t.text + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

std::string to_string(const Formula& f) {
  const auto child = [](const Formula& c) { return to_string(c); };
  switch (f.op()) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return f.name();
    case Op::Not: return "!" + child(f.lhs());
    case Op::Next: return "X " + child(f.lhs());
    case Op::WeakNext: return "N " + child(f.lhs());
    case Op::Eventually: return "F " + child(f.lhs());
    case Op::Globally: return "G " + child(f.lhs());
    case Op::And: return "(" + child(f.lhs()) + " & " + child(f.rhs()) + ")";
    case Op::Or: return "(" + child(f.lhs()) + " | " + child(f.rhs()) + ")";
    case Op::Implies: return "(" + child(f.lhs()) + " -> " + child(f.rhs()) + ")";
    case Op::Until: return "(" + child(f.lhs()) + " U " + child(f.rhs()) + ")";
    case Op::Release: return "(" + child(f.lhs()) + " R " + child(f.rhs()) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace {

Formula nnf(const Formula& f, bool negated) {
  using F = Formula;
  switch (f.op()) {
    case Op::True: return negated ? F::falsity() : F::truth();
    case Op::False: return negated ? F::truth() : F::falsity();
    case Op::Atom: return negated ? F::negation(f) : f;
    case Op::Not: return nnf(f.lhs(), !negated);
    case Op::And:
      return negated ? F::disjunction(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : F::conjunction(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Op::Or:
      return negated ? F::conjunction(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : F::disjunction(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Op::Implies:
      return negated ? F::conjunction(nnf(f.lhs(), false), nnf(f.rhs(), true))
                     : F::disjunction(nnf(f.lhs(), true), nnf(f.rhs(), false));
    case Op::Next: return negated ? F::weak_next(nnf(f.lhs(), true)) : F::next(nnf(f.lhs(), false));
    case Op::WeakNext: return negated ? F::next(nnf(f.lhs(), true)) : F::weak_next(nnf(f.lhs(), false));
    case Op::Until:
      return negated ? F::release(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : F::until(nnf(f.lhs(), false), nnf(f.rhs(), false));
    case Op::Release:
      return negated ? F::until(nnf(f.lhs(), true), nnf(f.rhs(), true))
                     : F::release(nnf(f.lhs(), false), nnf(f.rhs(), false));
    // F a = true U a, G a = false R a
    case Op::Eventually:
      return negated ? F::release(F::falsity(), nnf(f.lhs(), true)) : F::until(F::truth(), nnf(f.lhs(), false));
    case Op::Globally:
      return negated ? F::until(F::truth(), nnf(f.lhs(), true)) : F::release(F::falsity(), nnf(f.lhs(), false));
  }
  return f;
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

// ---------------------------------------------------------------------------
// Labels, traces and semantics

Label::Label(std::initializer_list<std::string> props) : Label(std::vector<std::string>(props)) {}

Label::Label(std::vector<std::string> props) : props_(std::move(props)) {
  std::sort(props_.begin(), props_.end());
  props_.erase(std::unique(props_.begin(), props_.end()), props_.end());
}

bool Label::contains(std::string_view prop) const {
  return std::binary_search(props_.begin(), props_.end(), prop, std::less<>{});
}

void Label::insert(std::string prop) {
  auto it = std::lower_bound(props_.begin(), props_.end(), prop);
  if (it == props_.end() || *it != prop) props_.insert(it, std::move(prop));
}

std::string to_string(const Label& label) {
  std::string out = "{";
  for (std::size_t i = 0; i < label.props().size(); ++i) {
    if (i) out += ",";
    out += label.props()[i];
  }
  return out + "}";
}

Trace::Trace(std::vector<Label> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw ParamError("a trace needs at least one step");
}

Trace::Trace(std::initializer_list<Label> steps) : Trace(std::vector<Label>(steps)) {}

namespace {

bool holds(const Formula& f, const Trace& rho, std::size_t i) {
  const std::size_t n = rho.size();
  switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return rho[i].contains(f.name());
    case Op::Not: return !holds(f.lhs(), rho, i);
    case Op::And: return holds(f.lhs(), rho, i) && holds(f.rhs(), rho, i);
    case Op::Or: return holds(f.lhs(), rho, i) || holds(f.rhs(), rho, i);
    case Op::Implies: return !holds(f.lhs(), rho, i) || holds(f.rhs(), rho, i);
    case Op::Next: return n > i + 1 && holds(f.lhs(), rho, i + 1);
    case Op::WeakNext: return n == i + 1 || holds(f.lhs(), rho, i + 1);
    case Op::Until:
      for (std::size_t j = i; j < n; ++j) {
        if (holds(f.rhs(), rho, j)) return true;
        if (!holds(f.lhs(), rho, j)) return false;
      }
      return false;
    case Op::Release:
      for (std::size_t j = i; j < n; ++j) {
        if (!holds(f.rhs(), rho, j)) return false;
        if (holds(f.lhs(), rho, j)) return true;
      }
      return true;
    case Op::Eventually:
      for (std::size_t j = i; j < n; ++j)
        if (holds(f.lhs(), rho, j)) return true;
      return false;
    case Op::Globally:
      for (std::size_t j = i; j < n; ++j)
        if (!holds(f.lhs(), rho, j)) return false;
      return true;
  }
  return false;
}

}  // namespace

bool eval_trace(const Formula& f, const Trace& rho, std::size_t i) {
  if (i >= rho.size())
    throw IndexError("position " + std::to_string(i) + " outside trace of length " + std::to_string(rho.size()));
  return holds(f, rho, i);
}

}  // namespace hrs
