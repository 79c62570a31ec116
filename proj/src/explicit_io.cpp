#include "hrs/explicit_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hrs/errors.hpp"

namespace hrs {

namespace fs = std::filesystem;

std::string format_probability(double p) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, res.ptr);
}

namespace {

void check_token(const std::string& s, const char* what) {
  if (s.empty() || s.find_first_of(" \t\r\n\"") != std::string::npos)
    throw ParamError(std::string(what) + " '" + s + "' cannot be written to an explicit file");
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Line-aware reader for one file of the bundle.
class Reader {
 public:
  Reader(const fs::path& dir, const char* name) : name_(name), lines_(split_lines(read_file(dir / name))) {}

  std::size_t size() const { return lines_.size(); }
  const std::string& line(std::size_t i) const { return lines_[i]; }
  [[noreturn]] void fail(std::size_t index, const std::string& message) const { throw FormatError(name_, index + 1, message); }

  template <typename T>
  T number(std::size_t index, std::string_view token) const {
    T value{};
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
      fail(index, "expected a number, found '" + std::string(token) + "'");
    return value;
  }

 private:
  std::string name_;
  std::vector<std::string> lines_;
};

}  // namespace

std::string write_sta(const StochasticGame& g) {
  std::string out = "(";
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    check_token(g.variables[i], "variable");
    if (i) out += ',';
    out += g.variables[i];
  }
  out += ")\n";
  for (StateIndex s = 0; s < g.num_states(); ++s) out += std::to_string(s) + ":" + g.valuation_string(s) + "\n";
  return out;
}

std::string write_tra(const StochasticGame& g) {
  std::string out = std::to_string(g.num_states()) + " " + std::to_string(g.num_choices()) + " " +
                    std::to_string(g.num_transitions()) + "\n";
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    for (std::size_t local = 0; local < g.num_choices(s); ++local) {
      const auto& action = g.action(s, local);
      check_token(action, "action");
      const std::string prefix = std::to_string(s) + " " + std::to_string(local) + " ";
      for (const auto& t : g.outcomes(s, local))
        out += prefix + std::to_string(t.target) + " " + format_probability(t.probability) + " " + action + "\n";
    }
  }
  return out;
}

std::string write_lab(const StochasticGame& g) {
  std::string out = "0=\"init\" 1=\"target\"";
  for (std::size_t i = 0; i < g.propositions.size(); ++i) {
    check_token(g.propositions[i], "proposition");
    out += " " + std::to_string(i + 2) + "=\"" + g.propositions[i] + "\"";
  }
  out += "\n";
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    std::string ids;
    if (s == g.initial) ids += " 0";
    if (g.is_target(s)) ids += " 1";
    for (auto id : g.labels[s]) ids += " " + std::to_string(id + 2);
    if (!ids.empty()) out += std::to_string(s) + ":" + ids + "\n";
  }
  return out;
}

std::string write_pla(const StochasticGame& g) {
  std::string out;
  for (StateIndex s = 0; s < g.num_states(); ++s)
    out += std::to_string(s) + " " + std::to_string(static_cast<int>(g.players[s])) + "\n";
  return out;
}

ExplicitBundle export_explicit(const StochasticGame& g, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  ExplicitBundle b{dir / "model.sta", dir / "model.tra", dir / "model.lab", dir / "model.pla", {}};
  write_file(b.sta, write_sta(g));
  write_file(b.tra, write_tra(g));
  write_file(b.lab, write_lab(g));
  write_file(b.pla, write_pla(g));
  return b;
}

StochasticGame import_explicit(const fs::path& dir) {
  StochasticGame g;

  // States and valuations.
  {
    Reader r(dir, "model.sta");
    if (r.size() == 0) r.fail(0, "missing variable header");
    const std::string& head = r.line(0);
    if (head.size() < 2 || head.front() != '(' || head.back() != ')') r.fail(0, "expected (var1,var2,...)");
    std::string inner = head.substr(1, head.size() - 2);
    std::stringstream ss(inner);
    for (std::string var; std::getline(ss, var, ',');) {
      if (var.empty()) r.fail(0, "empty variable name");
      g.variables.push_back(var);
    }
    if (g.variables.empty()) r.fail(0, "no variables declared");
    for (std::size_t i = 1; i < r.size(); ++i) {
      const std::string& line = r.line(i);
      const auto colon = line.find(':');
      if (colon == std::string::npos) r.fail(i, "expected idx:(values)");
      const auto idx = r.number<std::size_t>(i, std::string_view(line).substr(0, colon));
      if (idx != i - 1) r.fail(i, "state index " + std::to_string(idx) + " out of sequence");
      std::string_view vals = std::string_view(line).substr(colon + 1);
      if (vals.size() < 2 || vals.front() != '(' || vals.back() != ')') r.fail(i, "expected (values)");
      vals = vals.substr(1, vals.size() - 2);
      std::vector<std::int64_t> valuation;
      std::size_t start = 0;
      while (true) {
        const auto comma = vals.find(',', start);
        valuation.push_back(r.number<std::int64_t>(i, vals.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (valuation.size() != g.variables.size())
        r.fail(i, "expected " + std::to_string(g.variables.size()) + " values, found " + std::to_string(valuation.size()));
      g.valuations.push_back(std::move(valuation));
    }
  }
  const std::size_t n = g.valuations.size();
  if (n == 0) throw FormatError("model.sta", 0, "no states");

  // Players.
  {
    Reader r(dir, "model.pla");
    if (r.size() != n) r.fail(r.size() < n ? (r.size() ? r.size() - 1 : 0) : n, "expected " + std::to_string(n) + " player lines");
    for (std::size_t i = 0; i < n; ++i) {
      const auto tok = split_ws(r.line(i));
      if (tok.size() != 2) r.fail(i, "expected 'idx player'");
      if (r.number<std::size_t>(i, tok[0]) != i) r.fail(i, "state index out of sequence");
      const int p = r.number<int>(i, tok[1]);
      if (p != 1 && p != 2) r.fail(i, "player must be 1 or 2");
      g.players.push_back(static_cast<Player>(p));
    }
  }

  // Transitions.
  {
    Reader r(dir, "model.tra");
    if (r.size() == 0) r.fail(0, "missing header");
    const auto head = split_ws(r.line(0));
    if (head.size() != 3) r.fail(0, "expected 'numStates numChoices numTransitions'");
    const auto ns = r.number<std::size_t>(0, head[0]);
    const auto nc = r.number<std::size_t>(0, head[1]);
    const auto nt = r.number<std::size_t>(0, head[2]);
    if (ns != n) r.fail(0, "header declares " + std::to_string(ns) + " states, model.sta has " + std::to_string(n));
    if (r.size() - 1 != nt)
      r.fail(0, "header declares " + std::to_string(nt) + " transitions, body has " + std::to_string(r.size() - 1));

    g.choice_begin.assign(1, 0);
    std::size_t cur_src = 0, cur_choice = 0, choice_line = 0;
    bool have_choice = false;
    double mass = 0.0;
    const auto close_choice = [&]() {
      if (have_choice && std::abs(mass - 1.0) > 1e-6)
        r.fail(choice_line, "choice (" + std::to_string(cur_src) + ", " + std::to_string(cur_choice) +
                                ") has probability mass " + format_probability(mass));
    };
    for (std::size_t i = 1; i < r.size(); ++i) {
      const auto tok = split_ws(r.line(i));
      if (tok.size() != 5) r.fail(i, "expected 'src choice dst prob action'");
      const auto src = r.number<std::size_t>(i, tok[0]);
      const auto choice = r.number<std::size_t>(i, tok[1]);
      const auto dst = r.number<std::size_t>(i, tok[2]);
      const auto prob = r.number<double>(i, tok[3]);
      if (src >= n) r.fail(i, "source state " + std::to_string(src) + " out of range");
      if (dst >= n) r.fail(i, "target state " + std::to_string(dst) + " out of range");
      if (!(prob > 0.0 && prob <= 1.0)) r.fail(i, "probability must lie in (0,1]");
      const bool same_choice = have_choice && src == cur_src && choice == cur_choice;
      if (same_choice) {
        if (dst <= g.transitions.back().target) r.fail(i, "transitions not sorted by target");
        if (tok[4] != g.choice_action.back()) r.fail(i, "action name changes within a choice");
      } else {
        close_choice();
        const bool next_in_state = have_choice && src == cur_src && choice == cur_choice + 1;
        const bool first_of_state = choice == 0 && (!have_choice ? src == 0 : src == cur_src + 1);
        if (!next_in_state && !first_of_state) {
          if (!have_choice || src != cur_src + 1 || choice != 0)
            r.fail(i, "choices must be numbered consecutively per state, sorted, with every state present");
        }
        if (have_choice && src != cur_src) g.choice_begin.push_back(g.choice_action.size());
        g.transition_begin.push_back(g.transitions.size());
        if (g.transition_begin.size() == 2 && g.transition_begin[0] == 0 && g.transition_begin[1] == 0)
          g.transition_begin.pop_back();
        g.choice_action.push_back(tok[4]);
        cur_src = src;
        cur_choice = choice;
        choice_line = i;
        have_choice = true;
        mass = 0.0;
      }
      g.transitions.push_back({static_cast<StateIndex>(dst), prob});
      mass += prob;
    }
    close_choice();
    if (!have_choice || cur_src != n - 1) r.fail(0, "every state needs at least one choice");
    g.choice_begin.push_back(g.choice_action.size());
    g.transition_begin.push_back(g.transitions.size());
    if (g.num_choices() != nc)
      r.fail(0, "header declares " + std::to_string(nc) + " choices, body has " + std::to_string(g.num_choices()));
  }

  // Labels.
  {
    Reader r(dir, "model.lab");
    if (r.size() == 0) r.fail(0, "missing label header");
    const auto head = split_ws(r.line(0));
    for (std::size_t k = 0; k < head.size(); ++k) {
      const auto& tok = head[k];
      const auto eq = tok.find('=');
      if (eq == std::string::npos || tok.size() < eq + 3 || tok[eq + 1] != '"' || tok.back() != '"')
        r.fail(0, "expected id=\"name\"");
      if (r.number<std::size_t>(0, std::string_view(tok).substr(0, eq)) != k) r.fail(0, "label ids must be 0,1,2,...");
      std::string name = tok.substr(eq + 2, tok.size() - eq - 3);
      if (k == 0 && name != "init") r.fail(0, "label 0 must be \"init\"");
      if (k == 1 && name != "target") r.fail(0, "label 1 must be \"target\"");
      if (k >= 2) g.propositions.push_back(std::move(name));
    }
    if (head.size() < 2) r.fail(0, "labels \"init\" and \"target\" are required");
    g.labels.assign(n, {});
    std::vector<bool> target(n, false);
    bool any_target = false, have_init = false;
    std::int64_t last = -1;
    for (std::size_t i = 1; i < r.size(); ++i) {
      const std::string& line = r.line(i);
      const auto colon = line.find(':');
      if (colon == std::string::npos) r.fail(i, "expected 'idx: id id ...'");
      const auto s = r.number<std::size_t>(i, std::string_view(line).substr(0, colon));
      if (s >= n) r.fail(i, "state " + std::to_string(s) + " out of range");
      if (static_cast<std::int64_t>(s) <= last) r.fail(i, "label lines must be sorted by state");
      last = static_cast<std::int64_t>(s);
      const auto ids = split_ws(line.substr(colon + 1));
      if (ids.empty()) r.fail(i, "empty label line");
      std::int64_t prev = -1;
      for (const auto& tok : ids) {
        const auto id = r.number<std::size_t>(i, tok);
        if (id >= head.size()) r.fail(i, "unknown label id " + tok);
        if (static_cast<std::int64_t>(id) <= prev) r.fail(i, "label ids must be increasing");
        prev = static_cast<std::int64_t>(id);
        if (id == 0) {
          if (have_init) r.fail(i, "more than one initial state");
          have_init = true;
          g.initial = static_cast<StateIndex>(s);
        } else if (id == 1) {
          target[s] = true;
          any_target = true;
        } else {
          g.labels[s].push_back(static_cast<std::uint32_t>(id - 2));
        }
      }
    }
    if (!have_init) r.fail(0, "no state carries \"init\"");
    if (any_target) g.target = std::move(target);
  }
  return g;
}

fs::path export_strategy(const StochasticGame& g, const Strategy& strat, const fs::path& dir) {
  std::string out;
  for (StateIndex s = 0; s < g.num_states(); ++s) {
    if (strat.choice[s] < 0) continue;
    out += std::to_string(s) + " " + g.action(s, static_cast<std::size_t>(strat.choice[s])) + "\n";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / "model.str";
  write_file(path, out);
  return path;
}

Strategy import_strategy(const StochasticGame& g, const fs::path& dir) {
  Reader r(dir, "model.str");
  Strategy strat;
  strat.players = g.players;
  strat.choice.assign(g.num_states(), -1);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto tok = split_ws(r.line(i));
    if (tok.size() != 2) r.fail(i, "expected 'idx action'");
    const auto s = r.number<std::size_t>(i, tok[0]);
    if (s >= g.num_states()) r.fail(i, "state out of range");
    std::int32_t found = -1;
    for (std::size_t c = 0; c < g.num_choices(static_cast<StateIndex>(s)); ++c)
      if (g.action(static_cast<StateIndex>(s), c) == tok[1]) {
        found = static_cast<std::int32_t>(c);
        break;
      }
    if (found < 0) r.fail(i, "state " + tok[0] + " has no action '" + tok[1] + "'");
    strat.choice[s] = found;
  }
  return strat;
}

}  // namespace hrs
