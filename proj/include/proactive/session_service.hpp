// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "proactive/agent.hpp"
#include "proactive/policy.hpp"

namespace httplib {
class Server;
}

namespace proactive {

inline constexpr int kApiVersion = 1;

// An error with the HTTP status it maps to.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct ApiReply {
  int status = 200;
  nlohmann::ordered_json body;
};

// Live human-vs-policy dialogues. Handlers return the JSON body and status;
// failures are reported as ApiError.
class SessionService {
 public:
  SessionService(const TopicWorld& world, std::uint64_t seed);
  ~SessionService();

  ApiReply create_session(const nlohmann::json& request);
  ApiReply respond(const std::string& session_id, const nlohmann::json& request);
  ApiReply get_state(const std::string& session_id) const;
  ApiReply graph_neighbors(const std::string& label, const std::string& hops) const;

  std::size_t session_count() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<const GoalWeightModel> load_model(const std::string& path, PolicyType type);

  const TopicWorld* world_;
  std::uint64_t seed_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<const GoalWeightModel>> models_;
  std::uint64_t next_ = 0;
};

// Wraps every reply as UTF-8 JSON and maps ApiError to its status.
void register_routes(httplib::Server& server, SessionService& service);

}  // namespace proactive
