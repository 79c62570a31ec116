#include "hrs/exec_service.hpp"

#include <charconv>
#include <cstdio>

namespace hrs {

using nlohmann::json;

int ServiceError::http_status() const {
  if (code_ == "unknown_scenario" || code_ == "unknown_session") return 404;
  if (code_ == "not_your_turn" || code_ == "terminal") return 409;
  if (code_ == "illegal_move" || code_ == "synthesis_error") return 422;
  return 400;
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct ExecService::CacheEntry {
  std::once_flag once;
  std::shared_ptr<const SolvedTask> task;
};

struct HistoryEntry {
  std::string actor;
  std::string action;
  StateIndex from;
  StateIndex to;
  double probability;
  bool interrupted;
};

struct ExecService::Session {
  std::mutex mutex;
  std::string id;
  std::shared_ptr<const SolvedTask> task;
  std::uint64_t seed = 0;
  std::mt19937_64 rng;
  StateIndex current = 0;
  bool interruptible = false;
  std::vector<HistoryEntry> history;
};

namespace {

const char* player_name(Player p) { return p == Player::Robot ? "robot" : "human"; }

const StochasticGame& pgame(const SolvedTask& t) { return t.synthesis.product.game; }

bool is_terminal(const SolvedTask& t, StateIndex p) {
  const auto& g = pgame(t);
  if (g.is_target(p)) return true;
  for (std::size_t c = g.first_choice(p); c < g.end_choice(p); ++c) {
    const auto out = g.outcomes(c);
    if (out.size() != 1 || out[0].target != p) return false;
  }
  return true;
}

json render(const SolvedTask& t, StateIndex p) {
  const StateIndex s = t.synthesis.product.pairs[p].game_state;
  if (t.built.tictactoe) {
    const TttState& ts = t.built.tictactoe->states[s];
    json board = json::array();
    for (Cell c : ts.board) board.push_back(static_cast<int>(c));
    const Cell w = ttt_winner(ts);
    return {{"kind", "tictactoe"},
            {"board", board},
            {"turn", player_name(ts.turn)},
            {"winner", w == Cell::Robot ? json("robot") : w == Cell::Human ? json("human") : json(nullptr)}};
  }
  const ManipulationGame& mg = *t.built.manipulation;
  const GameState& gs = mg.states[s];
  json arrangement = json::object();
  for (std::size_t o = 0; o < mg.world.num_objects(); ++o)
    arrangement[mg.world.object_name(o)] = mg.world.location_name(gs.arrangement[o]);
  json out = {{"kind", "pickplace"},
              {"arrangement", arrangement},
              {"locations", mg.world.spec().locations},
              {"turn", player_name(gs.control)}};
  if (std::holds_alternative<RatioTurns>(mg.turn_model)) out["counter"] = gs.counter;
  else out["human_active"] = gs.human_active;
  return out;
}

/// Cell whose content differs between two boards, -1 for other scenarios.
int landed_cell(const SolvedTask& t, StateIndex from, StateIndex to) {
  if (!t.built.tictactoe) return -1;
  const auto& states = t.built.tictactoe->states;
  const auto& a = states[t.synthesis.product.pairs[from].game_state].board;
  const auto& b = states[t.synthesis.product.pairs[to].game_state].board;
  for (int c = 0; c < 9; ++c)
    if (a[c] != b[c]) return c;
  return -1;
}

int intended_cell(const std::string& action) {
  if (action.rfind("place:", 0) != 0 || action.size() != 7) return -1;
  return action[6] - '0';
}

json outcome_doc(const SolvedTask& t, StateIndex from, StateIndex to, double probability) {
  json o = {{"state", to}, {"probability", probability}, {"render", render(t, to)},
            {"labels", pgame(t).label(to).props()}};
  const int cell = landed_cell(t, from, to);
  if (cell >= 0) o["cell"] = cell;
  return o;
}

std::optional<std::size_t> find_action(const StochasticGame& g, StateIndex p, const std::string& action) {
  for (std::size_t c = 0; c < g.num_choices(p); ++c)
    if (g.action(p, c) == action) return c;
  return std::nullopt;
}

/// The human-controlled state a robot-turn state maps to when the human
/// interrupts: same arrangement and automaton state, human to move with a
/// fresh counter.
std::optional<StateIndex> interrupt_target(const SolvedTask& t, StateIndex p) {
  if (!t.built.manipulation) return std::nullopt;
  const ManipulationGame& mg = *t.built.manipulation;
  const ProductState ps = t.synthesis.product.pairs[p];
  GameState gs = mg.states[ps.game_state];
  if (!gs.human_active) return std::nullopt;
  gs.control = Player::Human;
  gs.counter = 0;
  const auto g = mg.find(gs);
  if (!g) return std::nullopt;
  const auto it = t.pair_index.find({*g, ps.dfa_state});
  if (it == t.pair_index.end()) return std::nullopt;
  return it->second;
}

StateIndex sample(const StochasticGame& g, std::size_t choice, std::mt19937_64& rng, double& probability) {
  const auto out = g.outcomes(choice);
  const double u = unit_draw(rng);
  double acc = 0.0;
  for (const auto& tr : out) {
    acc += tr.probability;
    if (u < acc) {
      probability = tr.probability;
      return tr.target;
    }
  }
  probability = out.back().probability;
  return out.back().target;
}

std::string format_key(const std::string& scenario, const Formula& f, Objective obj, double eps) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, eps);
  return scenario + "\n" + to_string(f) + "\n" + (obj == Objective::Maximize ? "max" : "min") + "\n" +
         std::string(buf, res.ptr);
}

json view(const ExecService::Session& s) {
  const SolvedTask& t = *s.task;
  const auto& g = pgame(t);
  const StateIndex p = s.current;
  const ProductState ps = t.synthesis.product.pairs[p];
  json doc = {{"session_id", s.id},
              {"scenario", t.scenario.id},
              {"formula", to_string(t.synthesis.formula)},
              {"objective", t.scenario.objective == Objective::Maximize ? "max" : "min"},
              {"seed", s.seed},
              {"interruptible", s.interruptible},
              {"state", p},
              {"game_state", ps.game_state},
              {"dfa_state", ps.dfa_state},
              {"controller", player_name(g.players[p])},
              {"value", t.synthesis.values[p]},
              {"target_reached", g.is_target(p)},
              {"terminal", is_terminal(t, p)},
              {"labels", g.label(p).props()},
              {"render", render(t, p)}};
  json history = json::array();
  for (const auto& h : s.history) {
    json e = {{"actor", h.actor}, {"action", h.action}, {"from", h.from}, {"state", h.to}, {"probability", h.probability}};
    if (h.interrupted) e["interrupted"] = true;
    const int intended = intended_cell(h.action);
    if (intended >= 0) e["intended"] = intended;
    const int cell = landed_cell(t, h.from, h.to);
    if (cell >= 0) e["cell"] = cell;
    history.push_back(std::move(e));
  }
  doc["history"] = std::move(history);
  if (g.players[p] == Player::Robot && !is_terminal(t, p)) {
    const auto values = choice_values(g, t.synthesis.values.values, p);
    json actions = json::array();
    for (std::size_t c = 0; c < values.size(); ++c)
      actions.push_back({{"action", g.action(p, c)}, {"index", c}, {"expected_value", values[c]}});
    doc["robot_actions"] = std::move(actions);
    if (const auto choice = t.synthesis.strategy.robot_choice(p)) doc["robot_choice"] = g.action(p, *choice);
  }
  return doc;
}

}  // namespace

ExecService::ExecService(std::vector<ScenarioSpec> scenarios, ServiceOptions options)
    : options_(std::move(options)), id_rng_(std::random_device{}()) {
  for (auto& s : scenarios) {
    const std::string id = s.id;
    scenarios_.insert_or_assign(id, std::move(s));
  }
}

json ExecService::scenarios() const {
  json list = json::array();
  for (const auto& [id, s] : scenarios_) {
    list.push_back({{"id", id},
                    {"kind", s.kind == ScenarioKind::TicTacToe ? "tictactoe" : "pickplace"},
                    {"description", s.description},
                    {"formula", s.formula},
                    {"objective", s.objective == Objective::Maximize ? "max" : "min"}});
  }
  return {{"scenarios", list}};
}

const ScenarioSpec& ExecService::scenario_spec(const std::string& id) const {
  const auto it = scenarios_.find(id);
  if (it == scenarios_.end()) throw ServiceError("unknown_scenario", "no scenario named '" + id + "'", {{"scenario", id}});
  return it->second;
}

std::shared_ptr<const SolvedTask> ExecService::solve(const std::string& scenario, const std::optional<std::string>& formula,
                                                     std::optional<Objective> objective) {
  const ScenarioSpec& spec = scenario_spec(scenario);
  const std::string text = formula.value_or(spec.formula);
  std::optional<Formula> f;
  try {
    f = parse(text);
  } catch (const SyntaxError& e) {
    throw ServiceError("synthesis_error", e.what(),
                       {{"kind", "syntax_error"}, {"position", e.position()}, {"formula", text}});
  }
  const Objective obj = objective.value_or(spec.objective);
  const std::string key = format_key(scenario, *f, obj, options_.solver.epsilon);

  std::shared_ptr<CacheEntry> entry;
  {
    std::lock_guard lock(cache_mutex_);
    auto& slot = cache_[key];
    if (!slot) slot = std::make_shared<CacheEntry>();
    entry = slot;
  }
  std::call_once(entry->once, [&] {
    try {
      ScenarioGame built = build_scenario(spec, options_.max_states);
      SolverOptions so = options_.solver;
      so.objective = obj;
      Synthesis syn = synthesize(built.game, *f, so);
      std::map<std::pair<StateIndex, DfaState>, StateIndex> pair_index;
      for (StateIndex p = 0; p < syn.product.pairs.size(); ++p)
        pair_index.emplace(std::pair{syn.product.pairs[p].game_state, syn.product.pairs[p].dfa_state}, p);
      ScenarioSpec copy = spec;
      copy.objective = obj;
      entry->task = std::make_shared<const SolvedTask>(
          SolvedTask{std::move(copy), std::move(built), std::move(syn), std::move(pair_index)});
    } catch (const Error& e) {
      throw ServiceError("synthesis_error", e.what(), {{"kind", "solver"}, {"formula", text}});
    }
  });
  return entry->task;
}

std::size_t ExecService::cached_tasks() const {
  std::lock_guard lock(cache_mutex_);
  std::size_t n = 0;
  for (const auto& [_, e] : cache_)
    if (e->task) ++n;
  return n;
}

std::string ExecService::new_session(const SessionConfig& config) {
  auto task = solve(config.scenario, config.formula, config.objective);
  auto s = std::make_shared<Session>();
  s->task = std::move(task);
  if (config.seed) {
    s->seed = *config.seed;
  } else {
    std::random_device rd;
    s->seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  s->rng.seed(s->seed);
  s->current = s->task->synthesis.product.game.initial;
  s->interruptible = config.interruptible;

  std::unique_lock lock(sessions_mutex_);
  do {
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(id_rng_()));
    s->id = buf;
  } while (sessions_.contains(s->id));
  sessions_.emplace(s->id, s);
  return s->id;
}

std::shared_ptr<ExecService::Session> ExecService::session(const std::string& id) {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError("unknown_session", "no session '" + id + "'", {{"session_id", id}});
  return it->second;
}

json ExecService::state_view(const std::string& id) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  return view(*s);
}

json ExecService::legal_moves(const std::string& id) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  const SolvedTask& t = *s->task;
  const auto& g = pgame(t);
  StateIndex p = s->current;
  json doc = {{"session_id", s->id}, {"state", p}, {"moves", json::array()}};
  if (is_terminal(t, p)) return doc;
  if (g.players[p] == Player::Robot) {
    const auto mapped = s->interruptible ? interrupt_target(t, p) : std::nullopt;
    if (!mapped) throw ServiceError("not_your_turn", "the robot is to move", {{"state", p}});
    p = *mapped;
    doc["interrupt_state"] = p;
  }
  const auto values = choice_values(g, t.synthesis.values.values, p);
  for (std::size_t c = 0; c < g.num_choices(p); ++c) {
    json outcomes = json::array();
    for (const auto& tr : g.outcomes(p, c)) outcomes.push_back(outcome_doc(t, p, tr.target, tr.probability));
    json move = {{"action", g.action(p, c)}, {"index", c}, {"expected_value", values[c]}, {"outcomes", outcomes}};
    const int intended = intended_cell(g.action(p, c));
    if (intended >= 0) move["intended"] = intended;
    doc["moves"].push_back(std::move(move));
  }
  return doc;
}

json ExecService::apply_human_move(const std::string& id, const std::string& action) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  const SolvedTask& t = *s->task;
  const auto& g = pgame(t);
  StateIndex p = s->current;
  if (is_terminal(t, p)) throw ServiceError("terminal", "the game is over", {{"state", p}});
  bool interrupted = false;
  if (g.players[p] == Player::Robot) {
    const auto mapped = s->interruptible ? interrupt_target(t, p) : std::nullopt;
    if (!mapped) throw ServiceError("not_your_turn", "the robot is to move", {{"state", p}});
    p = *mapped;
    interrupted = true;
  }
  const auto local = find_action(g, p, action);
  if (!local) throw ServiceError("illegal_move", "'" + action + "' is not available", {{"state", p}, {"action", action}});
  double probability = 0.0;
  const StateIndex next = sample(g, g.first_choice(p) + *local, s->rng, probability);
  s->history.push_back({"human", action, p, next, probability, interrupted});
  s->current = next;
  json doc = {{"action", action}, {"outcome", outcome_doc(t, p, next, probability)}, {"view", view(*s)}};
  if (interrupted) doc["interrupted"] = true;
  return doc;
}

json ExecService::robot_step(const std::string& id) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  const SolvedTask& t = *s->task;
  const auto& g = pgame(t);
  const StateIndex p = s->current;
  if (is_terminal(t, p)) throw ServiceError("terminal", "the game is over", {{"state", p}});
  if (g.players[p] != Player::Robot) throw ServiceError("not_your_turn", "the human is to move", {{"state", p}});
  const std::size_t local = t.synthesis.strategy.robot_choice(p).value_or(0);
  const std::string& action = g.action(p, local);
  const double expected = choice_values(g, t.synthesis.values.values, p)[local];
  double probability = 0.0;
  const StateIndex next = sample(g, g.first_choice(p) + local, s->rng, probability);
  s->history.push_back({"robot", action, p, next, probability, false});
  s->current = next;
  return {{"action", action},
          {"expected_value", expected},
          {"outcome", outcome_doc(t, p, next, probability)},
          {"view", view(*s)}};
}

}  // namespace hrs
