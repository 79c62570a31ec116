#include "hrs/scenarios.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <thread>
#include <unordered_map>

#include "hrs/errors.hpp"
#include "hrs/explicit_io.hpp"
#include "hrs/synthesis.hpp"

namespace hrs {

PickPlaceScenario gen_pickplace(int num_objects, int num_locations, const TurnModel& tm) {
  if (num_objects < 1) throw ParamError("pick-and-place needs at least one object");
  if (num_locations < num_objects + 3)
    throw ParamError("pick-and-place with " + std::to_string(num_objects) + " objects needs at least " +
                     std::to_string(num_objects + 3) + " locations, got " + std::to_string(num_locations));
  check(tm);

  WorldSpec w;
  w.locations = {std::string(kRobotGripper), std::string(kHumanGripper), std::string(kElse)};
  for (int l = 1; l <= num_locations - 3; ++l) w.locations.push_back("L" + std::to_string(l));
  w.robot_success = {0.9, 0.9};

  std::map<std::string, std::string> init;
  std::vector<PropositionDef> props;
  std::optional<Formula> task;
  for (int o = 1; o <= num_objects; ++o) {
    const std::string obj = "O" + std::to_string(o);
    const std::string loc = "L" + std::to_string(o);
    w.objects.push_back(obj);
    init[obj] = std::string(kElse);
    const std::string name = "p_" + obj + "_" + loc;
    props.push_back({name, obj, {loc}});
    Formula goal = Formula::eventually(Formula::atom(name));
    task = task ? Formula::conjunction(*task, goal) : goal;
  }
  return {std::move(w), std::move(init), std::move(props), *task, tm};
}

ManipulationGame build_pickplace(const PickPlaceScenario& sc, std::size_t max_states) {
  World world(sc.world);
  const Arrangement init = world.arrangement(sc.init);
  return build_game(world, init, sc.propositions, sc.turn_model, max_states);
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

double dist2(int a, int b) {
  const int dr = a / 3 - b / 3, dc = a % 3 - b % 3;
  return static_cast<double>(dr * dr + dc * dc);
}

std::uint32_t encode(const TttState& s) {
  std::uint32_t code = 0;
  for (Cell c : s.board) code = code * 3 + static_cast<std::uint32_t>(c);
  return code * 2 + (s.turn == Player::Human ? 1u : 0u);
}

}  // namespace

Cell ttt_winner(const TttState& s) {
  for (const auto& line : kLines) {
    const Cell c = s.board[line[0]];
    if (c != Cell::Empty && c == s.board[line[1]] && c == s.board[line[2]]) return c;
  }
  return Cell::Empty;
}

bool ttt_full(const TttState& s) {
  for (Cell c : s.board)
    if (c == Cell::Empty) return false;
  return true;
}

bool ttt_terminal(const TttState& s) { return ttt_winner(s) != Cell::Empty || ttt_full(s); }

std::array<double, 9> tremble_distribution(const TttState& s, int intended, double sigma) {
  if (intended < 0 || intended > 8) throw ParamError("cell index " + std::to_string(intended) + " out of range");
  if (s.board[intended] != Cell::Empty) throw ParamError("cell " + std::to_string(intended) + " is occupied");
  std::array<double, 9> out{};
  if (!(sigma > 0.0)) {
    out[intended] = 1.0;
    return out;
  }
  std::array<double, 9> weight{};
  double total = 0.0;
  for (int c = 0; c < 9; ++c) {
    weight[c] = std::exp(-dist2(c, intended) / (2.0 * sigma * sigma));
    total += weight[c];
  }
  for (int c = 0; c < 9; ++c) {
    int land = c;
    if (s.board[c] != Cell::Empty) {
      land = -1;
      for (int e = 0; e < 9; ++e)
        if (s.board[e] == Cell::Empty && (land < 0 || dist2(c, e) < dist2(c, land))) land = e;
    }
    out[land] += weight[c] / total;
  }
  return out;
}

TicTacToe gen_tictactoe(double sigma) {
  if (sigma < 0.0 || std::isnan(sigma)) throw ParamError("sigma must be non-negative");
  std::vector<std::string> vars;
  for (int c = 0; c < 9; ++c) vars.push_back("c" + std::to_string(c));
  vars.push_back("turn");
  const std::vector<std::string> props = {"RobotWin", "HumanWin", "Draw"};
  GameBuilder builder(vars, props);

  std::vector<TttState> states;
  std::unordered_map<std::uint32_t, StateIndex> index;
  std::deque<StateIndex> queue;
  const auto lookup = [&](const TttState& s) {
    auto [it, inserted] = index.emplace(encode(s), static_cast<StateIndex>(states.size()));
    if (inserted) {
      std::vector<std::int64_t> valuation;
      for (Cell c : s.board) valuation.push_back(static_cast<std::int64_t>(c));
      valuation.push_back(static_cast<std::int64_t>(s.turn));
      std::vector<std::uint32_t> label;
      const Cell w = ttt_winner(s);
      if (w == Cell::Robot) label.push_back(0);
      if (w == Cell::Human) label.push_back(1);
      if (w == Cell::Empty && ttt_full(s)) label.push_back(2);
      builder.add_state(s.turn, std::move(valuation), std::move(label));
      states.push_back(s);
      queue.push_back(it->second);
    }
    return it->second;
  };

  const StateIndex initial = lookup(TttState{});
  while (!queue.empty()) {
    const StateIndex p = queue.front();
    queue.pop_front();
    const TttState s = states[p];
    if (ttt_terminal(s)) {
      builder.add_choice(p, kStayAction, {{p, 1.0}});
      continue;
    }
    const Cell mark = s.turn == Player::Robot ? Cell::Robot : Cell::Human;
    for (int k = 0; k < 9; ++k) {
      if (s.board[k] != Cell::Empty) continue;
      const auto dist = tremble_distribution(s, k, sigma);
      std::vector<Transition> outcomes;
      for (int c = 0; c < 9; ++c) {
        if (dist[c] <= 0.0) continue;
        TttState next = s;
        next.board[c] = mark;
        next.turn = s.turn == Player::Robot ? Player::Human : Player::Robot;
        outcomes.push_back({lookup(next), dist[c]});
      }
      builder.add_choice(p, "place:" + std::to_string(k), std::move(outcomes));
    }
  }
  return TicTacToe{sigma, builder.finish(initial), std::move(states), parse("F RobotWin"), parse("F HumanWin")};
}

// ---------------------------------------------------------------------------

std::vector<BenchCell> bench_matrix(const std::vector<int>& objects, const std::vector<int>& locations,
                                    const std::vector<TurnModel>& turn_models) {
  std::vector<BenchCell> cells;
  for (int o : objects)
    for (int l : locations)
      for (const auto& tm : turn_models) cells.push_back({o, l, tm});
  return cells;
}

namespace {

BenchResult run_cell(const BenchCell& cell, const BenchOptions& options) {
  BenchResult r;
  r.objects = cell.objects;
  r.locations = cell.locations;
  r.turn_model = to_string(cell.turn_model);
  try {
    const auto start = std::chrono::steady_clock::now();
    const PickPlaceScenario sc = gen_pickplace(cell.objects, cell.locations, cell.turn_model);
    const ManipulationGame mg = build_pickplace(sc, options.max_states);
    const double game_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.game_states = mg.game.num_states();
    r.game_transitions = mg.game.num_transitions();
    const Synthesis syn = synthesize(mg.game, sc.formula, options.solver);
    r.states = syn.product.num_states();
    r.transitions = syn.product.game.num_transitions();
    r.build_s = game_s + syn.timings.dfa_s + syn.timings.product_s;
    r.solve_s = syn.timings.solve_s;
    r.value = syn.initial_value();
  } catch (const ParamError& e) {
    r.status = std::string("param_error: ") + e.what();
  } catch (const CapacityError& e) {
    r.status = std::string("capacity_error: ") + e.what();
  } catch (const NonConvergence& e) {
    r.status = std::string("non_convergence: ") + e.what();
  } catch (const Error& e) {
    r.status = std::string("error: ") + e.what();
  }
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

}  // namespace

std::vector<BenchResult> run_bench(const std::vector<BenchCell>& cells, const BenchOptions& options) {
  if (cells.empty()) throw ParamError("benchmark matrix is empty");
  std::vector<BenchResult> results(cells.size());
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(cells.size())));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_cell(cells[i], options);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  return results;
}

std::string bench_csv(const std::vector<BenchResult>& rows, bool with_timing) {
  std::string out = "scenario,objects,locations,turn_model,states,transitions,build_s,solve_s,value,status\n";
  for (const auto& r : rows) {
    const bool ok = r.status == "ok";
    out += csv_field(r.scenario) + "," + std::to_string(r.objects) + "," + std::to_string(r.locations) + "," +
           csv_field(r.turn_model) + ",";
    if (ok) {
      out += std::to_string(r.states) + "," + std::to_string(r.transitions) + ",";
      out += with_timing ? seconds(r.build_s) + "," + seconds(r.solve_s) + "," : ",,";
      out += format_probability(r.value);
    } else {
      out += ",,,,";
    }
    out += "," + csv_field(r.status) + "\n";
  }
  return out;
}

}  // namespace hrs
