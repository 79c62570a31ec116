// hrsynth: build, solve, export and serve human-robot manipulation games.

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "hrs/errors.hpp"
#include "hrs/explicit_io.hpp"
#include "hrs/http_api.hpp"
#include "hrs/scenario_file.hpp"
#include "hrs/scenarios.hpp"
#include "hrs/synthesis.hpp"

using namespace hrs;

namespace {

// "1..3", "2" or "1,2,5".
std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots)), hi = std::stoi(text.substr(dots + 2));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      std::size_t start = 0;
      while (start <= text.size()) {
        const auto comma = text.find(',', start);
        out.push_back(std::stoi(text.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  } catch (const std::logic_error&) {
    throw ParamError("bad range '" + text + "'");
  }
  if (out.empty()) throw ParamError("empty range '" + text + "'");
  return out;
}

ScenarioSpec find_scenario(const std::string& name) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name, ec)) return load_scenario(name);
  for (auto& s : builtin_scenarios())
    if (s.id == name) return s;
  throw ParamError("'" + name + "' is neither a scenario file nor a built-in scenario");
}

Objective objective_of(const std::string& s, Objective fallback) {
  if (s.empty()) return fallback;
  if (s == "max") return Objective::Maximize;
  if (s == "min") return Objective::Minimize;
  throw ParamError("objective must be max or min");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategy synthesis for human-robot manipulation games"};
  app.require_subcommand(1);

  std::string scenario, formula, objective, out_dir = "out";
  double eps = 1e-6;
  unsigned threads = 1;

  auto* synth = app.add_subcommand("synth", "Solve a scenario and write its strategy");
  synth->add_option("--scenario", scenario, "Scenario file or built-in id")->required();
  synth->add_option("--formula", formula, "LTLf task (defaults to the scenario's)");
  synth->add_option("--objective", objective, "max or min (defaults to the scenario's)");
  synth->add_option("--eps", eps, "Convergence threshold");
  synth->add_option("--threads", threads, "Value-iteration threads");
  synth->add_option("--out", out_dir, "Directory for model and strategy files");

  auto* exp = app.add_subcommand("export", "Write a scenario's game (or product, with --formula) in explicit form");
  exp->add_option("--scenario", scenario, "Scenario file or built-in id")->required();
  exp->add_option("--formula", formula, "Export the product with this formula's automaton");
  exp->add_option("--out", out_dir, "Output directory");

  std::string in_dir;
  auto* imp = app.add_subcommand("import", "Read an explicit model, check it and solve it if it has targets");
  imp->add_option("--dir", in_dir, "Directory with model.sta/tra/lab/pla")->required();
  imp->add_option("--eps", eps, "Convergence threshold");
  imp->add_option("--objective", objective, "max or min");

  std::string objects = "1..3", locations = "5..8", csv;
  std::vector<std::string> turn_models;
  unsigned jobs = 1;
  bool no_timing = false;
  auto* bench = app.add_subcommand("bench", "Pick-and-place scaling benchmark");
  bench->add_option("--objects", objects, "Object counts, e.g. 1..3");
  bench->add_option("--locations", locations, "Location counts, e.g. 5..8");
  bench->add_option("--turn-model", turn_models, "ratio:R:H or prob:P (repeatable; default both ratio:1:1 and prob:0.05)");
  bench->add_option("--csv", csv, "Write the CSV here instead of stdout");
  bench->add_option("--jobs", jobs, "Cells solved in parallel");
  bench->add_option("--eps", eps, "Convergence threshold");
  bench->add_flag("--no-timing", no_timing, "Leave timing columns empty");

  int port = 8080;
  std::string host = "127.0.0.1", scenario_dir, static_dir = "web";
  auto* serve = app.add_subcommand("serve", "Run the play service");
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--scenarios", scenario_dir, "Directory of scenario JSON files (added to the built-ins)");
  serve->add_option("--static", static_dir, "Directory served at /");
  serve->add_option("--eps", eps, "Convergence threshold");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const ScenarioSpec spec = find_scenario(scenario);
      SolverOptions so;
      so.epsilon = eps;
      so.threads = threads;
      so.objective = objective_of(objective, spec.objective);
      const ScenarioGame built = build_scenario(spec);
      const Synthesis syn = synthesize(built.game, parse(formula.empty() ? spec.formula : formula), so);
      export_explicit(syn.product.game, out_dir);
      const auto str = export_strategy(syn.product.game, syn.strategy, out_dir);
      std::printf("scenario %s\nformula %s\n", spec.id.c_str(), to_string(syn.formula).c_str());
      std::printf("game states %zu, automaton states %zu, product states %zu, transitions %zu\n", built.game.num_states(),
                  syn.dfa.num_states(), syn.product.num_states(), syn.product.game.num_transitions());
      std::printf("value iteration: %zu sweeps, residual %.3g\n", syn.values.iterations, syn.values.residual);
      std::printf("value %.9f\n", syn.initial_value());
      std::printf("strategy written to %s\n", str.string().c_str());
    } else if (exp->parsed()) {
      const ScenarioSpec spec = find_scenario(scenario);
      const ScenarioGame built = build_scenario(spec);
      if (formula.empty()) {
        export_explicit(built.game, out_dir);
        std::printf("game with %zu states written to %s\n", built.game.num_states(), out_dir.c_str());
      } else {
        const Formula f = parse(formula);
        const auto universe = f.propositions();
        const ProductGame pg = build_product(built.game, to_dfa(f, universe, game_alphabet(built.game, universe)));
        export_explicit(pg.game, out_dir);
        std::printf("product with %zu states written to %s\n", pg.num_states(), out_dir.c_str());
      }
    } else if (imp->parsed()) {
      const StochasticGame g = import_explicit(in_dir);
      const auto issues = check_structure(g);
      std::printf("states %zu, choices %zu, transitions %zu, propositions %zu\n", g.num_states(), g.num_choices(),
                  g.num_transitions(), g.propositions.size());
      for (const auto& i : issues) std::printf("issue: %s\n", i.c_str());
      if (!g.target.empty()) {
        SolverOptions so;
        so.epsilon = eps;
        so.objective = objective_of(objective, Objective::Maximize);
        const ProductGame pg = reachability_game(g, g.target);
        const ValueVector v = value_iteration(pg, so);
        require_converged(v);
        std::printf("value %.9f\n", v[g.initial]);
      }
      return issues.empty() ? 0 : 1;
    } else if (bench->parsed()) {
      std::vector<TurnModel> tms;
      for (const auto& t : turn_models) tms.push_back(parse_turn_model(t));
      if (tms.empty()) tms = {RatioTurns{1, 1}, ProbTermination{0.05}};
      BenchOptions bo;
      bo.jobs = jobs;
      bo.solver.epsilon = eps;
      const auto rows = run_bench(bench_matrix(parse_range(objects), parse_range(locations), tms), bo);
      const std::string text = bench_csv(rows, !no_timing);
      if (csv.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        std::ofstream out(csv);
        if (!(out << text)) throw IoError("cannot write " + csv);
      }
    } else if (serve->parsed()) {
      std::vector<ScenarioSpec> specs = builtin_scenarios();
      if (!scenario_dir.empty()) {
        auto more = load_scenario_dir(scenario_dir);
        specs.insert(specs.end(), more.begin(), more.end());
      }
      ServiceOptions so;
      so.solver.epsilon = eps;
      ExecService service(std::move(specs), so);
      httplib::Server server;
      mount_api(server, service, static_dir);
      std::printf("listening on http://%s:%d/\n", host.c_str(), port);
      std::fflush(stdout);
      if (!server.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const SyntaxError& e) {
    std::fprintf(stderr, "formula %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
