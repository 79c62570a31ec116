#include "hrs/http_api.hpp"

#include <httplib.h>

namespace hrs {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      send(res, e.http_status(), e.to_json());
    } catch (const json::exception& e) {
      send(res, 400, {{"code", "bad_request"}, {"message", e.what()}, {"detail", json::object()}});
    } catch (const std::exception& e) {
      send(res, 500, {{"code", "internal"}, {"message", e.what()}, {"detail", json::object()}});
    }
  };
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw ServiceError("bad_request", "request body must be a JSON object");
  return j;
}

}  // namespace

void mount_api(httplib::Server& server, ExecService& service, const std::filesystem::path& static_dir) {
  ExecService* svc = &service;

  server.Get("/api/v1/scenarios", guarded([svc](const auto&, auto& res) { send(res, 200, svc->scenarios()); }));

  server.Post("/api/v1/sessions", guarded([svc](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                if (!body.contains("scenario") || !body["scenario"].is_string())
                  throw ServiceError("bad_request", "'scenario' is required");
                SessionConfig cfg;
                cfg.scenario = body["scenario"].get<std::string>();
                if (body.contains("formula") && !body["formula"].is_null()) cfg.formula = body["formula"].get<std::string>();
                if (body.contains("seed") && !body["seed"].is_null()) cfg.seed = body["seed"].get<std::uint64_t>();
                if (body.contains("objective")) {
                  const auto obj = body["objective"].get<std::string>();
                  if (obj != "max" && obj != "min") throw ServiceError("bad_request", "objective must be max or min");
                  cfg.objective = obj == "max" ? Objective::Maximize : Objective::Minimize;
                }
                cfg.interruptible = body.value("interruptible", false);
                send(res, 201, {{"session_id", svc->new_session(cfg)}});
              }));

  server.Get(R"(/api/v1/sessions/([A-Za-z0-9]+))", guarded([svc](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, svc->state_view(req.matches[1]));
             }));

  server.Get(R"(/api/v1/sessions/([A-Za-z0-9]+)/moves)",
             guarded([svc](const httplib::Request& req, httplib::Response& res) {
               send(res, 200, svc->legal_moves(req.matches[1]));
             }));

  server.Post(R"(/api/v1/sessions/([A-Za-z0-9]+)/human)",
              guarded([svc](const httplib::Request& req, httplib::Response& res) {
                const json body = body_of(req);
                if (!body.contains("action") || !body["action"].is_string())
                  throw ServiceError("bad_request", "'action' is required");
                send(res, 200, svc->apply_human_move(req.matches[1], body["action"].get<std::string>()));
              }));

  server.Post(R"(/api/v1/sessions/([A-Za-z0-9]+)/robot)",
              guarded([svc](const httplib::Request& req, httplib::Response& res) {
                send(res, 200, svc->robot_step(req.matches[1]));
              }));

  std::error_code ec;
  if (!static_dir.empty() && std::filesystem::is_directory(static_dir, ec)) server.set_mount_point("/", static_dir.string());

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (req.path.rfind("/api/", 0) == 0 && res.body.empty())
      send(res, res.status, {{"code", "not_found"}, {"message", "no route for " + req.method + " " + req.path},
                             {"detail", json::object()}});
  });
}

}  // namespace hrs
