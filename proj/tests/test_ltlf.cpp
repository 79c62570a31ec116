#include <doctest.h>

#include "hrs/dfa.hpp"
#include "hrs/errors.hpp"
#include "hrs/ltlf.hpp"
#include "oracles/ltl_oracle.hpp"

using namespace hrs;
using F = Formula;

namespace {

bool only_atoms_negated(const Formula& f) {
  switch (f.op()) {
    case Op::Not: return f.lhs().op() == Op::Atom;
    case Op::Eventually:
    case Op::Globally:
    case Op::Implies: return false;
    default: break;
  }
  if (f.is_unary()) return only_atoms_negated(f.lhs());
  if (f.is_binary()) return only_atoms_negated(f.lhs()) && only_atoms_negated(f.rhs());
  return true;
}

std::vector<std::string> sorted_props(const Formula& f) {
  auto s = f.propositions();
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
  CHECK(parse("F p") == F::eventually(F::atom("p")));
  CHECK(parse("p U q") == F::until(F::atom("p"), F::atom("q")));
  CHECK(parse("true") == F::truth());
  CHECK(parse("!p & q") == F::conjunction(F::negation(F::atom("p")), F::atom("q")));
  // U binds tighter than &, & tighter than |, | tighter than ->
  CHECK(parse("a & b U c") == F::conjunction(F::atom("a"), F::until(F::atom("b"), F::atom("c"))));
  CHECK(parse("a | b & c") == F::disjunction(F::atom("a"), F::conjunction(F::atom("b"), F::atom("c"))));
  CHECK(parse("a -> b | c") == F::implication(F::atom("a"), F::disjunction(F::atom("b"), F::atom("c"))));
  // right associative U and ->, left associative &
  CHECK(parse("a U b U c") == F::until(F::atom("a"), F::until(F::atom("b"), F::atom("c"))));
  CHECK(parse("a -> b -> c") == F::implication(F::atom("a"), F::implication(F::atom("b"), F::atom("c"))));
  CHECK(parse("a & b & c") == F::conjunction(F::conjunction(F::atom("a"), F::atom("b")), F::atom("c")));
  CHECK(parse("X !p") == F::next(F::negation(F::atom("p"))));
  CHECK(parse("N(p)") == F::weak_next(F::atom("p")));
  CHECK(parse("p_O1_L1") == F::atom("p_O1_L1"));
}

TEST_CASE("arch task shape") {
  const Formula f = parse("F(c1 & c2 & b) & G(!(c1 & c2) -> !b)");
  REQUIRE(f.op() == Op::And);
  CHECK(f.lhs().op() == Op::Eventually);
  CHECK(f.rhs().op() == Op::Globally);
  CHECK(f.rhs().lhs().op() == Op::Implies);
  CHECK(f.rhs().lhs().lhs() == F::negation(F::conjunction(F::atom("c1"), F::atom("c2"))));
  CHECK(sorted_props(f) == std::vector<std::string>{"b", "c1", "c2"});
}

TEST_CASE("syntax errors carry positions") {
  const auto pos = [](std::string_view text) -> std::size_t {
    try {
      parse(text);
    } catch (const SyntaxError& e) {
      return e.position();
    }
    return 9999;
  };
  CHECK(pos("U p") == 0);
  CHECK(pos("p &") == 3);
  CHECK(pos("(p | q") == 6);
  CHECK(pos("p q") == 2);
  CHECK(pos("") == 0);
  CHECK(pos("p $ q") == 2);
  CHECK(pos("p)") == 1);
}

TEST_CASE("printing round-trips through the parser") {
  for (const auto& text : oracle::formula_pool()) {
    const Formula f = parse(text);
    CAPTURE(text);
    CHECK(parse(to_string(f)) == f);
  }
  CHECK(to_string(parse("p U q")) == "(p U q)");
  CHECK(to_string(parse("!X p")) == "!X p");
}

TEST_CASE("structural equality and ordering") {
  CHECK(parse("p & q") == parse("(p & q)"));
  CHECK(parse("p & q") != parse("q & p"));
  CHECK((parse("p") < parse("q")) != (parse("q") < parse("p")));
  CHECK(parse("F (p & X q)").size() == 5);
}

TEST_CASE("nnf examples") {
  CHECK(to_nnf(parse("!(p & q)")) == parse("!p | !q"));
  CHECK(to_nnf(parse("!X p")) == parse("N !p"));
  CHECK(to_nnf(parse("G p")) == parse("false R p"));
  CHECK(to_nnf(parse("F p")) == parse("true U p"));
  CHECK(to_nnf(parse("!(p U q)")) == parse("!p R !q"));
}

TEST_CASE("nnf preserves semantics on bounded traces") {
  const std::vector<std::string> props = {"p", "q", "r"};
  const auto alphabet = oracle::all_labels(props);
  for (const auto& text : oracle::formula_pool()) {
    const Formula f = parse(text);
    if (f.propositions().count("c1")) continue;
    const Formula g = to_nnf(f);
    CAPTURE(text);
    CHECK(only_atoms_negated(g));
    std::size_t mismatches = 0;
    oracle::for_each_trace(alphabet, 3, [&](const Trace& t) {
      if (eval_trace(f, t) != eval_trace(g, t)) ++mismatches;
    });
    CHECK(mismatches == 0);
  }
}

TEST_CASE("trace semantics examples") {
  CHECK_FALSE(eval_trace(parse("X p"), Trace{{"p"}}));
  CHECK(eval_trace(parse("N p"), Trace{{"p"}}));
  CHECK(eval_trace(parse("N p"), Trace{Label{}}));
  CHECK(eval_trace(parse("F p"), Trace{Label{}, Label{"p"}}));
  CHECK(eval_trace(parse("p U q"), Trace{{"p"}, {"p"}, {"q"}}));
  CHECK_FALSE(eval_trace(parse("p U q"), Trace{{"p"}, {"p"}}));
  CHECK_FALSE(eval_trace(parse("G p"), Trace{Label{"p"}, Label{}}));
  CHECK(eval_trace(parse("G p"), Trace{{"p"}, {"p"}}));
  CHECK(eval_trace(parse("X p"), Trace{Label{}, Label{"p"}}, 0));
  CHECK(eval_trace(parse("p"), Trace{Label{}, Label{"p"}}, 1));
  CHECK_THROWS_AS(eval_trace(parse("p"), Trace{{"p"}}, 1), IndexError);
  CHECK_THROWS_AS(Trace(std::vector<Label>{}), ParamError);
}

TEST_CASE("library evaluator agrees with the table oracle") {
  const auto alphabet = oracle::all_labels({"p", "q", "r"});
  for (const auto& text : oracle::formula_pool()) {
    const Formula f = parse(text);
    if (f.propositions().count("c1")) continue;
    std::size_t mismatches = 0;
    oracle::for_each_trace(alphabet, 3, [&](const Trace& t) {
      if (eval_trace(f, t) != oracle::holds(f, t)) ++mismatches;
    });
    CAPTURE(text);
    CHECK(mismatches == 0);
  }
}

TEST_CASE("labels are sorted sets") {
  Label l{"b", "a", "b"};
  CHECK(l.props() == std::vector<std::string>{"a", "b"});
  CHECK(to_string(l) == "{a,b}");
  CHECK(to_string(Label{}) == "{}");
  l.insert("c");
  CHECK(l.contains("c"));
  CHECK_FALSE(l.contains("d"));
}

TEST_CASE("dfa for F p") {
  const Dfa d = to_dfa(parse("F p"), {"p"});
  CHECK(d.num_states() == 2);
  CHECK_FALSE(d.accepting(d.initial()));
  const DfaState q = d.initial();
  CHECK(d.step(q, Label{}) == q);
  const DfaState acc = d.step(q, Label{"p"});
  CHECK(d.accepting(acc));
  CHECK(d.step(acc, Label{}) == acc);
  CHECK(d.step(acc, Label{"p"}) == acc);
  CHECK(dfa_accepts(d, Trace{{"p"}}));
  CHECK_FALSE(dfa_accepts(d, Trace{Label{}, Label{}}));
}

TEST_CASE("dfa for true and false") {
  const Dfa t = to_dfa(parse("true"), {"p"});
  CHECK(t.num_states() == 1);
  CHECK(t.accepting(t.initial()));
  const Dfa f = to_dfa(parse("false"), {"p"});
  CHECK(f.num_states() == 1);
  CHECK_FALSE(f.accepting(f.initial()));
}

TEST_CASE("dfa for p U q") {
  const Dfa d = to_dfa(parse("p U q"), {"p", "q"});
  CHECK(dfa_accepts(d, Trace{{"p"}, {"q"}}));
  CHECK_FALSE(dfa_accepts(d, Trace{{"p"}, {"p"}}));
}

TEST_CASE("dfa is total, deterministic and reachable") {
  for (const auto& text : oracle::formula_pool()) {
    const Formula f = parse(text);
    const Dfa d = to_dfa(f, f.propositions());
    CAPTURE(text);
    CHECK(d.alphabet().size() == (1u << f.propositions().size()));
    std::vector<bool> seen(d.num_states(), false);
    std::vector<DfaState> stack{d.initial()};
    seen[d.initial()] = true;
    while (!stack.empty()) {
      const DfaState q = stack.back();
      stack.pop_back();
      for (std::size_t a = 0; a < d.alphabet().size(); ++a) {
        const DfaState r = d.step(q, a);
        REQUIRE(r < d.num_states());
        if (!seen[r]) seen[r] = true, stack.push_back(r);
      }
    }
    CHECK(std::count(seen.begin(), seen.end(), true) == static_cast<long>(d.num_states()));
  }
}

TEST_CASE("dfa matches the semantics on all short traces") {
  for (const auto& text : oracle::formula_pool()) {
    const Formula f = parse(text);
    const auto props = sorted_props(f);
    const Dfa d = to_dfa(f, f.propositions());
    std::size_t mismatches = 0;
    oracle::for_each_trace(oracle::all_labels(props), 4, [&](const Trace& t) {
      if (dfa_accepts(d, t) != oracle::holds(f, t)) ++mismatches;
    });
    CAPTURE(text);
    CHECK(mismatches == 0);
  }
}

TEST_CASE("restricted alphabets and universe checks") {
  const Formula f = parse("F(p & q)");
  const Dfa d = to_dfa(f, {"p", "q", "r"}, std::vector<Label>{Label{}, Label{"p"}, Label{"p", "q"}});
  CHECK(d.alphabet().size() == 3);
  CHECK(dfa_accepts(d, Trace{Label{"p"}, Label{"p", "q"}}));
  CHECK_THROWS_AS(dfa_accepts(d, Trace{{"q"}}), AlphabetError);
  CHECK(d.project(Label{"p", "z"}) == Label{"p"});
  CHECK_THROWS_AS(to_dfa(f, {"p"}), AlphabetError);
  CHECK_THROWS_AS(to_dfa(parse("F p"), {"p"}, std::vector<Label>{Label{"z"}}), AlphabetError);
  CHECK_THROWS_AS(to_dfa(parse("F p & F q & F r & X X X p"), {"p", "q", "r"}, std::nullopt, DfaOptions{3}),
                  CapacityError);
}
