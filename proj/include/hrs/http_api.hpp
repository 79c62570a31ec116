#pragma once

// JSON-over-HTTP front end of ExecService, all under /api/v1:
//
//   POST /sessions               {scenario, formula?, seed?, objective?, interruptible?}
//   GET  /sessions/{id}          state view
//   GET  /sessions/{id}/moves    legal human moves with outcome distributions
//   POST /sessions/{id}/human    {action}
//   POST /sessions/{id}/robot
//   GET  /scenarios
//
// Errors come back as {code, message, detail} with a matching status.

#include <filesystem>

#include "hrs/exec_service.hpp"

namespace httplib {
class Server;
}

namespace hrs {

/// Registers the API routes, and serves `static_dir` at / when it is a directory.
void mount_api(httplib::Server& server, ExecService& service, const std::filesystem::path& static_dir = {});

}  // namespace hrs
