#pragma once

// Table-filling LTLf evaluator: sat[node][i] computed from the last position
// backwards. Shares nothing with the library evaluator beyond the AST.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hrs/ltlf.hpp"

namespace oracle {

inline std::vector<bool> sat_table(const hrs::Formula& f, const std::vector<std::vector<std::string>>& trace) {
  using hrs::Op;
  const std::size_t n = trace.size();
  std::vector<bool> out(n, false);
  auto has = [&](std::size_t i, const std::string& p) {
    for (const auto& q : trace[i])
      if (q == p) return true;
    return false;
  };
  switch (f.op()) {
    case Op::True: out.assign(n, true); break;
    case Op::False: break;
    case Op::Atom:
      for (std::size_t i = 0; i < n; ++i) out[i] = has(i, f.name());
      break;
    case Op::Not: {
      auto a = sat_table(f.lhs(), trace);
      for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
      break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
      auto a = sat_table(f.lhs(), trace), b = sat_table(f.rhs(), trace);
      for (std::size_t i = 0; i < n; ++i)
        out[i] = f.op() == Op::And ? (a[i] && b[i]) : f.op() == Op::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
      break;
    }
    case Op::Next:
    case Op::WeakNext: {
      auto a = sat_table(f.lhs(), trace);
      for (std::size_t i = 0; i < n; ++i) out[i] = i + 1 < n ? a[i + 1] : f.op() == Op::WeakNext;
      break;
    }
    case Op::Until:
    case Op::Eventually: {
      const bool ev = f.op() == Op::Eventually;
      std::vector<bool> a = ev ? std::vector<bool>(n, true) : sat_table(f.lhs(), trace);
      std::vector<bool> b = sat_table(ev ? f.lhs() : f.rhs(), trace);
      bool later = false;
      for (std::size_t k = n; k-- > 0;) {
        out[k] = b[k] || (a[k] && later);
        later = out[k];
      }
      break;
    }
    case Op::Release:
    case Op::Globally: {
      const bool gl = f.op() == Op::Globally;
      std::vector<bool> a = gl ? std::vector<bool>(n, false) : sat_table(f.lhs(), trace);
      std::vector<bool> b = sat_table(gl ? f.lhs() : f.rhs(), trace);
      bool later = true;  // past the end the obligation is discharged
      for (std::size_t k = n; k-- > 0;) {
        out[k] = b[k] && (a[k] || later);
        later = out[k];
      }
      break;
    }
  }
  return out;
}

inline bool holds(const hrs::Formula& f, const hrs::Trace& t) {
  std::vector<std::vector<std::string>> raw;
  for (const auto& l : t.steps()) raw.push_back(l.props());
  return sat_table(f, raw)[0];
}

/// All labels over `props` (2^|props| of them), in bitmask order.
inline std::vector<hrs::Label> all_labels(const std::vector<std::string>& props) {
  std::vector<hrs::Label> out;
  for (unsigned m = 0; m < (1u << props.size()); ++m) {
    std::vector<std::string> l;
    for (std::size_t i = 0; i < props.size(); ++i)
      if (m >> i & 1u) l.push_back(props[i]);
    out.emplace_back(std::move(l));
  }
  return out;
}

/// Calls `fn` on every trace of length 1..max_len over `alphabet`.
inline void for_each_trace(const std::vector<hrs::Label>& alphabet, std::size_t max_len,
                           const std::function<void(const hrs::Trace&)>& fn) {
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::size_t> idx(len, 0);
    while (true) {
      std::vector<hrs::Label> steps;
      for (auto i : idx) steps.push_back(alphabet[i]);
      fn(hrs::Trace(std::move(steps)));
      std::size_t k = 0;
      while (k < len && ++idx[k] == alphabet.size()) idx[k++] = 0;
      if (k == len) break;
    }
  }
}

/// The formula pool shared by the ltlf unit tests and the acceptance suite.
inline std::vector<std::string> formula_pool() {
  return {
      "F p",
      "G p",
      "p U q",
      "X p",
      "N p",
      "F(p & X q)",
      "p R q",
      "(p U q) U r",
      "p U (q R r)",
      "G(p -> F q)",
      "F G p",
      "G F p",
      "X X p",
      "N N !p",
      "!(p U q)",
      "F(c1 & c2 & b) & G(!(c1 & c2) -> !b)",
      "true",
      "false",
      "p -> X q",
      "G(p -> N q)",
      "(p R q) & F r",
      "X (p U N q)",
      "!F p | G q",
      "F(p & F(q & F r))",
      "G(!q) | (p U (q & X r))",
  };
}

}  // namespace oracle
