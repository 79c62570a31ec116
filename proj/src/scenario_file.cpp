#include "hrs/scenario_file.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hrs/errors.hpp"

namespace hrs {

using nlohmann::json;

namespace {

void only_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParamError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ParamError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ParamError(std::string("missing key '") + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParamError(std::string("key '") + key + "' in " + where + " has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, const char* where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

SuccessRates parse_rates(const json& j, const char* where) {
  only_keys(j, where, {"grasp", "place"});
  return {get_or<double>(j, "grasp", where, 1.0), get_or<double>(j, "place", where, 1.0)};
}

WorldSpec parse_world(const json& j) {
  only_keys(j, "world",
            {"objects", "locations", "robot_success", "robot_success_per_object", "human_success", "human_likelihood",
             "capacities", "stacking", "robot_can_place_else"});
  WorldSpec w;
  w.objects = get<std::vector<std::string>>(j, "objects", "world");
  w.locations = get<std::vector<std::string>>(j, "locations", "world");
  if (j.contains("robot_success")) w.robot_success = parse_rates(j["robot_success"], "robot_success");
  if (j.contains("robot_success_per_object")) {
    const auto& per = j["robot_success_per_object"];
    if (!per.is_object()) throw ParamError("robot_success_per_object must be an object");
    for (const auto& [obj, rates] : per.items()) w.robot_success_per_object[obj] = parse_rates(rates, "robot_success_per_object");
  }
  w.human_success = get_or<double>(j, "human_success", "world", 1.0);
  if (j.contains("human_likelihood")) {
    if (!j["human_likelihood"].is_array()) throw ParamError("human_likelihood must be an array");
    for (const auto& h : j["human_likelihood"]) {
      only_keys(h, "human_likelihood entry", {"object", "from", "to", "weight"});
      w.human_likelihood.push_back({get<std::string>(h, "object", "human_likelihood entry"),
                                    get<std::string>(h, "from", "human_likelihood entry"),
                                    get<std::string>(h, "to", "human_likelihood entry"),
                                    get_or<double>(h, "weight", "human_likelihood entry", 1.0)});
    }
  }
  if (j.contains("capacities")) w.capacities = get<std::map<std::string, int>>(j, "capacities", "world");
  if (j.contains("stacking")) {
    for (const auto& pair : get<std::vector<std::vector<std::string>>>(j, "stacking", "world")) {
      if (pair.size() != 2) throw ParamError("stacking entries are [lower, upper] pairs");
      w.stacking.emplace_back(pair[0], pair[1]);
    }
  }
  w.robot_can_place_else = get_or<bool>(j, "robot_can_place_else", "world", true);
  return w;
}

TurnModel parse_turn(const json& j) {
  only_keys(j, "turn_model", {"ratio", "prob_termination"});
  if (j.size() != 1) throw ParamError("turn_model needs exactly one of 'ratio' or 'prob_termination'");
  TurnModel tm;
  if (j.contains("ratio")) {
    const auto r = get<std::vector<int>>(j, "ratio", "turn_model");
    if (r.size() != 2) throw ParamError("ratio is [robot, human]");
    tm = RatioTurns{r[0], r[1]};
  } else {
    tm = ProbTermination{get<double>(j, "prob_termination", "turn_model")};
  }
  check(tm);
  return tm;
}

Objective parse_objective(const std::string& s) {
  if (s == "max") return Objective::Maximize;
  if (s == "min") return Objective::Minimize;
  throw ParamError("objective must be \"max\" or \"min\", got \"" + s + "\"");
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParamError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParamError("scenario must be a JSON object");
  const std::string kind = get<std::string>(j, "kind", "scenario");
  ScenarioSpec s;
  if (kind == "pickplace") {
    only_keys(j, "scenario",
              {"id", "kind", "description", "world", "init", "propositions", "turn_model", "formula", "objective"});
    s.kind = ScenarioKind::PickPlace;
    s.world = parse_world(get<json>(j, "world", "scenario"));
    s.init = get<std::map<std::string, std::string>>(j, "init", "scenario");
    for (const auto& p : get<json>(j, "propositions", "scenario")) {
      only_keys(p, "proposition", {"name", "object", "location", "locations"});
      PropositionDef def{get<std::string>(p, "name", "proposition"), get<std::string>(p, "object", "proposition"), {}};
      if (p.contains("location")) def.locations.push_back(get<std::string>(p, "location", "proposition"));
      if (p.contains("locations")) {
        auto more = get<std::vector<std::string>>(p, "locations", "proposition");
        def.locations.insert(def.locations.end(), more.begin(), more.end());
      }
      s.propositions.push_back(std::move(def));
    }
    s.turn_model = parse_turn(get<json>(j, "turn_model", "scenario"));
    s.formula = get<std::string>(j, "formula", "scenario");
  } else if (kind == "pickplace_generated") {
    only_keys(j, "scenario", {"id", "kind", "description", "objects", "locations", "turn_model", "objective"});
    const TurnModel tm = j.contains("turn_model") ? parse_turn(j["turn_model"]) : TurnModel{RatioTurns{}};
    PickPlaceScenario g =
        gen_pickplace(get<int>(j, "objects", "scenario"), get<int>(j, "locations", "scenario"), tm);
    s.kind = ScenarioKind::PickPlace;
    s.world = std::move(g.world);
    s.init = std::move(g.init);
    s.propositions = std::move(g.propositions);
    s.turn_model = tm;
    s.formula = to_string(g.formula);
  } else if (kind == "tictactoe") {
    only_keys(j, "scenario", {"id", "kind", "description", "sigma", "formula", "objective"});
    s.kind = ScenarioKind::TicTacToe;
    s.sigma = get_or<double>(j, "sigma", "scenario", 1.0);
    if (!(s.sigma >= 0.0)) throw ParamError("sigma must be non-negative");
    s.formula = get_or<std::string>(j, "formula", "scenario", "F RobotWin");
  } else {
    throw ParamError("unknown scenario kind '" + kind + "'");
  }
  s.id = get<std::string>(j, "id", "scenario");
  if (s.id.empty() || s.id.find_first_of("/ \t") != std::string::npos) throw ParamError("invalid scenario id '" + s.id + "'");
  s.description = get_or<std::string>(j, "description", "scenario", "");
  s.objective = parse_objective(get_or<std::string>(j, "objective", "scenario", "max"));
  parse(s.formula);  // reject bad formulas at load time
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const SyntaxError& e) {
    throw ParamError(file.filename().string() + ": formula: " + e.what());
  } catch (const ParamError& e) {
    throw ParamError(file.filename().string() + ": " + e.what());
  }
}

std::vector<ScenarioSpec> load_scenario_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<ScenarioSpec> out;
  std::set<std::string> ids;
  for (const auto& f : files) {
    out.push_back(load_scenario(f));
    if (!ids.insert(out.back().id).second) throw ParamError("duplicate scenario id '" + out.back().id + "'");
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::string to_json(const ScenarioSpec& s) {
  json j;
  j["id"] = s.id;
  j["description"] = s.description;
  j["formula"] = s.formula;
  j["objective"] = s.objective == Objective::Maximize ? "max" : "min";
  if (s.kind == ScenarioKind::TicTacToe) {
    j["kind"] = "tictactoe";
    j["sigma"] = s.sigma;
  } else {
    j["kind"] = "pickplace";
    j["objects"] = s.world.objects;
    j["locations"] = s.world.locations;
    j["turn_model"] = to_string(s.turn_model);
    json props = json::array();
    for (const auto& p : s.propositions) props.push_back({{"name", p.name}, {"object", p.object}, {"locations", p.locations}});
    j["propositions"] = props;
  }
  return j.dump();
}

ScenarioGame build_scenario(const ScenarioSpec& spec, std::size_t max_states) {
  ScenarioGame out;
  if (spec.kind == ScenarioKind::TicTacToe) {
    out.tictactoe = gen_tictactoe(spec.sigma);
    out.game = out.tictactoe->game;
  } else {
    World world(spec.world);
    const Arrangement init = world.arrangement(spec.init);
    out.manipulation = build_game(world, init, spec.propositions, spec.turn_model, max_states);
    out.game = out.manipulation->game;
  }
  return out;
}

std::vector<ScenarioSpec> builtin_scenarios() {
  std::vector<ScenarioSpec> out;
  for (double sigma : {1.0, 0.0}) {
    ScenarioSpec s;
    s.id = sigma > 0 ? "tictactoe" : "tictactoe-exact";
    s.kind = ScenarioKind::TicTacToe;
    s.description = sigma > 0 ? "Tic-tac-toe where markers may slip into neighboring cells" : "Tic-tac-toe without slips";
    s.sigma = sigma;
    s.formula = "F RobotWin";
    out.push_back(std::move(s));
  }
  for (const TurnModel& tm : {TurnModel{RatioTurns{1, 1}}, TurnModel{ProbTermination{0.05}}}) {
    PickPlaceScenario g = gen_pickplace(2, 5, tm);
    ScenarioSpec s;
    s.id = std::holds_alternative<RatioTurns>(tm) ? "pickplace-ratio" : "pickplace-termination";
    s.description = "Two objects to L1 and L2, turn model " + to_string(tm);
    s.world = std::move(g.world);
    s.init = std::move(g.init);
    s.propositions = std::move(g.propositions);
    s.turn_model = tm;
    s.formula = to_string(g.formula);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

}  // namespace hrs
