#include "hrs/dfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <utility>

#include "hrs/errors.hpp"

namespace hrs {

Dfa::Dfa(std::vector<std::string> universe, std::vector<Label> alphabet, DfaState initial,
         std::vector<bool> accepting, std::vector<DfaState> delta)
    : universe_(std::move(universe)),
      alphabet_(std::move(alphabet)),
      initial_(initial),
      accepting_(std::move(accepting)),
      delta_(std::move(delta)) {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) letter_index_.emplace(alphabet_[i], i);
}

std::optional<std::size_t> Dfa::find_letter(const Label& label) const {
  auto it = letter_index_.find(label);
  if (it == letter_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dfa::letter(const Label& label) const {
  if (auto i = find_letter(label)) return *i;
  throw AlphabetError("label " + to_string(label) + " is not in the automaton alphabet");
}

Label Dfa::project(const Label& label) const {
  std::vector<std::string> kept;
  for (const auto& p : label.props())
    if (std::binary_search(universe_.begin(), universe_.end(), p)) kept.push_back(p);
  return Label(std::move(kept));
}

namespace {

// Residual obligations on the unread suffix of a trace are kept as a DNF over
// two kinds of literal: kEnd ("the suffix is empty") and now(k) ("the suffix
// is non-empty and interned NNF formula k holds at its first position").
using Literal = std::uint32_t;
using Clause = std::vector<Literal>;  // sorted conjunction
using Dnf = std::vector<Clause>;      // sorted, subsumption-free disjunction

constexpr Literal kEnd = 0;
Literal now(std::uint32_t formula) { return formula + 1; }

const Dnf kTrue{Clause{}};
const Dnf kFalse{};

void minimize(Dnf& d) {
  // kEnd together with any now(k) is contradictory.
  std::erase_if(d, [](const Clause& c) { return c.size() > 1 && c.front() == kEnd; });
  std::sort(d.begin(), d.end(), [](const Clause& a, const Clause& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  d.erase(std::unique(d.begin(), d.end()), d.end());
  Dnf kept;
  for (auto& c : d) {
    bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
      return std::includes(c.begin(), c.end(), k.begin(), k.end());
    });
    if (!subsumed) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end());
  d = std::move(kept);
}

Dnf dnf_or(const Dnf& a, const Dnf& b) {
  Dnf out = a;
  out.insert(out.end(), b.begin(), b.end());
  minimize(out);
  return out;
}

Dnf dnf_and(const Dnf& a, const Dnf& b) {
  Dnf out;
  out.reserve(a.size() * b.size());
  for (const auto& ca : a) {
    for (const auto& cb : b) {
      Clause c;
      std::set_union(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(c));
      out.push_back(std::move(c));
    }
  }
  minimize(out);
  return out;
}

bool accepts_empty_suffix(const Dnf& d) {
  return std::any_of(d.begin(), d.end(), [](const Clause& c) { return c.empty() || (c.size() == 1 && c[0] == kEnd); });
}

class Progression {
 public:
  Progression(const std::vector<std::string>& universe) : universe_(universe) {}

  std::uint32_t intern(const Formula& f) {
    Node n{f.op(), 0, 0, 0};
    switch (f.op()) {
      case Op::Atom: {
        auto it = std::lower_bound(universe_.begin(), universe_.end(), f.name());
        if (it == universe_.end() || *it != f.name())
          throw AlphabetError("proposition '" + f.name() + "' is not in the universe");
        n.atom = static_cast<std::uint32_t>(it - universe_.begin());
        break;
      }
      case Op::Not:
      case Op::Next:
      case Op::WeakNext:
        n.lhs = intern(f.lhs());
        break;
      case Op::And:
      case Op::Or:
      case Op::Until:
      case Op::Release:
        n.lhs = intern(f.lhs());
        n.rhs = intern(f.rhs());
        break;
      default:
        break;
    }
    auto [it, inserted] = ids_.emplace(n, static_cast<std::uint32_t>(nodes_.size()));
    if (inserted) nodes_.push_back(n);
    return it->second;
  }

  // Obligation left for the suffix after reading `letter` at a position where
  // formula `id` must hold.
  const Dnf& formula(std::uint32_t id, std::uint32_t letter) {
    const auto key = std::make_pair(id, letter);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Node n = nodes_[id];
    Dnf out;
    switch (n.op) {
      case Op::True: out = kTrue; break;
      case Op::False: out = kFalse; break;
      case Op::Atom: out = (letter >> n.atom) & 1u ? kTrue : kFalse; break;
      case Op::Not: out = (letter >> nodes_[n.lhs].atom) & 1u ? kFalse : kTrue; break;
      case Op::And: out = dnf_and(formula(n.lhs, letter), formula(n.rhs, letter)); break;
      case Op::Or: out = dnf_or(formula(n.lhs, letter), formula(n.rhs, letter)); break;
      case Op::Next: out = Dnf{Clause{now(n.lhs)}}; break;
      case Op::WeakNext: out = Dnf{Clause{kEnd}, Clause{now(n.lhs)}}; break;
      case Op::Until:
        // a U b  ==  b | (a & X(a U b))
        out = dnf_or(formula(n.rhs, letter), dnf_and(formula(n.lhs, letter), Dnf{Clause{now(id)}}));
        break;
      case Op::Release:
        // a R b  ==  b & (a | N(a R b))
        out = dnf_and(formula(n.rhs, letter), dnf_or(formula(n.lhs, letter), Dnf{Clause{kEnd}, Clause{now(id)}}));
        break;
      default:
        break;
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  Dnf residual(const Dnf& d, std::uint32_t letter) {
    Dnf out = kFalse;
    for (const auto& clause : d) {
      Dnf c = kTrue;
      for (Literal lit : clause) {
        if (lit == kEnd) {
          c = kFalse;
          break;
        }
        c = dnf_and(c, formula(lit - 1, letter));
        if (c.empty()) break;
      }
      out = dnf_or(out, c);
    }
    return out;
  }

 private:
  struct Node {
    Op op;
    std::uint32_t atom;
    std::uint32_t lhs;
    std::uint32_t rhs;
    friend auto operator<=>(const Node&, const Node&) = default;
  };

  const std::vector<std::string>& universe_;
  std::vector<Node> nodes_;
  std::map<Node, std::uint32_t> ids_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Dnf> memo_;
};

}  // namespace

namespace {

struct Minimized {
  std::vector<bool> accepting;
  std::vector<DfaState> delta;
};

// Moore partition refinement; classes are renumbered in breadth-first order
// from the initial state, which becomes state 0.
Minimized minimize(const std::vector<bool>& accepting, const std::vector<DfaState>& delta, std::size_t k,
                   DfaState initial) {
  const std::size_t n = accepting.size();
  std::vector<std::uint32_t> cls(n);
  for (std::size_t q = 0; q < n; ++q) cls[q] = accepting[q] ? 1 : 0;
  std::size_t count = 0;
  while (true) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> sig_index;
    std::vector<std::uint32_t> next(n);
    std::vector<std::uint32_t> sig(k + 1);
    for (std::size_t q = 0; q < n; ++q) {
      sig[0] = cls[q];
      for (std::size_t a = 0; a < k; ++a) sig[a + 1] = cls[delta[q * k + a]];
      next[q] = sig_index.emplace(sig, static_cast<std::uint32_t>(sig_index.size())).first->second;
    }
    const std::size_t refined = sig_index.size();
    cls = std::move(next);
    if (refined == count) break;
    count = refined;
  }
  std::vector<DfaState> rep(count, 0), order(count, static_cast<DfaState>(-1));
  for (std::size_t q = n; q-- > 0;) rep[cls[q]] = static_cast<DfaState>(q);
  std::vector<std::uint32_t> bfs{cls[initial]};
  order[cls[initial]] = 0;
  for (std::size_t i = 0; i < bfs.size(); ++i)
    for (std::size_t a = 0; a < k; ++a) {
      const std::uint32_t c = cls[delta[rep[bfs[i]] * k + a]];
      if (order[c] == static_cast<DfaState>(-1)) {
        order[c] = static_cast<DfaState>(bfs.size());
        bfs.push_back(c);
      }
    }
  Minimized m;
  m.accepting.resize(bfs.size());
  m.delta.resize(bfs.size() * k);
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    const DfaState q = rep[bfs[i]];
    m.accepting[i] = accepting[q];
    for (std::size_t a = 0; a < k; ++a) m.delta[i * k + a] = order[cls[delta[q * k + a]]];
  }
  return m;
}

}  // namespace

Dfa to_dfa(const Formula& f, const std::set<std::string>& universe_set, std::optional<std::vector<Label>> alphabet,
           DfaOptions options) {
  std::vector<std::string> universe(universe_set.begin(), universe_set.end());
  if (universe.size() > 31) throw CapacityError("at most 31 propositions per automaton");

  std::vector<Label> letters;
  std::vector<std::uint32_t> masks;
  if (alphabet) {
    letters = std::move(*alphabet);
    std::sort(letters.begin(), letters.end());
    letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
    for (const auto& label : letters) {
      std::uint32_t mask = 0;
      for (const auto& p : label.props()) {
        auto it = std::lower_bound(universe.begin(), universe.end(), p);
        if (it == universe.end() || *it != p)
          throw AlphabetError("label " + to_string(label) + " mentions '" + p + "' outside the universe");
        mask |= 1u << (it - universe.begin());
      }
      masks.push_back(mask);
    }
  } else {
    if (universe.size() > 20) throw CapacityError("full alphabet over more than 20 propositions");
    const std::uint32_t count = 1u << universe.size();
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      std::vector<std::string> props;
      for (std::size_t b = 0; b < universe.size(); ++b)
        if ((mask >> b) & 1u) props.push_back(universe[b]);
      letters.emplace_back(std::move(props));
      masks.push_back(mask);
    }
  }

  Progression prog(universe);
  const std::uint32_t root = prog.intern(to_nnf(f));

  std::map<Dnf, DfaState> index;
  std::vector<const Dnf*> states;
  std::vector<DfaState> delta;
  std::deque<DfaState> queue;
  const auto lookup = [&](Dnf d) -> DfaState {
    auto [it, inserted] = index.emplace(std::move(d), static_cast<DfaState>(states.size()));
    if (inserted) {
      if (states.size() >= options.max_states)
        throw CapacityError("automaton exceeds " + std::to_string(options.max_states) + " states");
      states.push_back(&it->first);
      queue.push_back(it->second);
    }
    return it->second;
  };

  const DfaState initial = lookup(Dnf{Clause{now(root)}});
  while (!queue.empty()) {
    const DfaState q = queue.front();
    queue.pop_front();
    delta.resize(std::max<std::size_t>(delta.size(), (q + 1) * letters.size()));
    for (std::size_t a = 0; a < letters.size(); ++a) {
      Dnf next = prog.residual(*states[q], masks[a]);
      const DfaState target = lookup(std::move(next));
      delta[q * letters.size() + a] = target;
    }
  }
  delta.resize(states.size() * letters.size());

  std::vector<bool> accepting(states.size());
  for (std::size_t q = 0; q < states.size(); ++q) accepting[q] = accepts_empty_suffix(*states[q]);

  // Traces are never empty, so the flag of an initial state without incoming
  // edges is never read; pick whichever value minimizes better.
  const std::size_t k = letters.size();
  const bool reentered = std::find(delta.begin(), delta.end(), initial) != delta.end();
  Minimized best = minimize(accepting, delta, k, initial);
  if (!reentered) {
    auto flipped = accepting;
    flipped[initial] = !flipped[initial];
    Minimized alt = minimize(flipped, delta, k, initial);
    if (alt.accepting.size() < best.accepting.size()) best = std::move(alt);
  }
  return Dfa(std::move(universe), std::move(letters), 0, std::move(best.accepting), std::move(best.delta));
}

bool dfa_accepts(const Dfa& d, const Trace& t) {
  DfaState q = d.initial();
  for (const auto& label : t.steps()) q = d.step(q, label);
  return d.accepting(q);
}

}  // namespace hrs
