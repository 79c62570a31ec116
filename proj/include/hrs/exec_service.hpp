#pragma once

// Play sessions in which a human acts against a synthesized robot strategy.
// Every public call returns a JSON document; failures are ServiceError
// carrying a machine-readable code.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrs/errors.hpp"
#include "hrs/scenario_file.hpp"
#include "hrs/synthesis.hpp"

namespace hrs {

/// Error document {code, message, detail}. Codes: not_your_turn,
/// illegal_move, terminal, unknown_scenario, unknown_session,
/// synthesis_error, bad_request.
class ServiceError : public Error {
 public:
  ServiceError(std::string code, const std::string& message, nlohmann::json detail = nlohmann::json::object())
      : Error(message), code_(std::move(code)), detail_(std::move(detail)) {}
  const std::string& code() const { return code_; }
  const nlohmann::json& detail() const { return detail_; }
  nlohmann::json to_json() const { return {{"code", code_}, {"message", what()}, {"detail", detail_}}; }
  /// HTTP status for the code.
  int http_status() const;

 private:
  std::string code_;
  nlohmann::json detail_;
};

/// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
double unit_draw(std::mt19937_64& rng);

/// A solved scenario/formula pair. Immutable and shared between sessions.
struct SolvedTask {
  ScenarioSpec scenario;
  ScenarioGame built;
  Synthesis synthesis;
  /// Product state for a (game state, automaton state) pair.
  std::map<std::pair<StateIndex, DfaState>, StateIndex> pair_index;
};

struct ServiceOptions {
  SolverOptions solver;
  std::size_t max_states = 5'000'000;
};

struct SessionConfig {
  std::string scenario;
  std::optional<std::string> formula;
  std::optional<std::uint64_t> seed;
  /// Defaults to the scenario's objective.
  std::optional<Objective> objective;
  /// Accept human moves during the robot's turn.
  bool interruptible = false;
};

class ExecService {
 public:
  ExecService(std::vector<ScenarioSpec> scenarios, ServiceOptions options = {});

  nlohmann::json scenarios() const;

  /// Returns the session id. Throws unknown_scenario, synthesis_error.
  std::string new_session(const SessionConfig& config);
  nlohmann::json state_view(const std::string& id);
  nlohmann::json legal_moves(const std::string& id);
  nlohmann::json apply_human_move(const std::string& id, const std::string& action);
  nlohmann::json robot_step(const std::string& id);

  /// Solves (or fetches) the task; exposed for tests and the CLI.
  std::shared_ptr<const SolvedTask> solve(const std::string& scenario, const std::optional<std::string>& formula,
                                          std::optional<Objective> objective = std::nullopt);
  std::size_t cached_tasks() const;

  // Defined in the implementation file.
  struct Session;
  struct CacheEntry;

 private:

  std::shared_ptr<Session> session(const std::string& id);
  const ScenarioSpec& scenario_spec(const std::string& id) const;

  std::map<std::string, ScenarioSpec> scenarios_;
  ServiceOptions options_;

  mutable std::mutex cache_mutex_;
  std::map<std::string, std::shared_ptr<CacheEntry>> cache_;

  std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 id_rng_;
};

}  // namespace hrs
