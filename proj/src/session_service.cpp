// SPDX-License-Identifier: Apache-2.0
#include "proactive/session_service.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <set>

#include <httplib.h>

#include "proactive/checkpoint.hpp"
#include "proactive/errors.hpp"

namespace proactive {

namespace {

using ojson = nlohmann::ordered_json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ojson factors_json(const FactorVector& f) {
  return {{"turn", f.turn_norm}, {"gcd", f.gcd_norm}, {"eus", f.eus}, {"cd", f.cd}};
}

ojson gw_json(const std::optional<double>& gw) { return gw ? ojson(*gw) : ojson(nullptr); }

const std::string& require_string(const nlohmann::json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string())
    throw ApiError(400, std::string("field '") + key + "' must be a string");
  return it->get_ref<const std::string&>();
}

}  // namespace

struct SessionService::Session {
  Session(std::string id_, Policy p, TopicId start, TopicId goal, int max_turns, std::uint64_t seed)
      : id(std::move(id_)), policy(std::move(p)), history(start, goal, max_turns), rng(seed) {}

  std::string id;
  Policy policy;
  DialogueHistory history;
  Rng rng;
  std::string created_at;
  std::optional<double> tolerance_hint;
  std::string checkpoint;
  std::vector<ojson> diagnostics;  // one per agent turn
  std::vector<CandidateScore> last_scores;
  std::optional<double> last_gw;
  mutable std::mutex mu;
};

SessionService::SessionService(const TopicWorld& world, std::uint64_t seed)
    : world_(&world), seed_(seed) {}

SessionService::~SessionService() = default;

std::size_t SessionService::session_count() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session '" + id + "'");
  return it->second;
}

std::shared_ptr<const GoalWeightModel> SessionService::load_model(const std::string& path,
                                                                  PolicyType type) {
  const auto kind = type == PolicyType::kProi ? GoalWeightModel::Kind::kProi
                                              : GoalWeightModel::Kind::kDegrade;
  const std::string key = std::string(policy_type_name(type)) + "\n" + path;
  {
    std::shared_lock lock(mu_);
    if (const auto it = models_.find(key); it != models_.end()) return it->second;
  }
  std::shared_ptr<const GoalWeightModel> model;
  try {
    model = std::make_shared<const GoalWeightModel>(load_checkpoint(path, kind).model);
  } catch (const ShapeError& e) {
    throw ApiError(422, std::string("checkpoint shape mismatch: ") + e.what());
  } catch (const Error& e) {
    throw ApiError(400, std::string("cannot load checkpoint: ") + e.what());
  }
  std::unique_lock lock(mu_);
  models_.emplace(key, model);
  return model;
}

namespace {

// Runs the agent's next decision on `s`. Returns false when the dialogue
// hit a dead end instead.
template <typename SessionT>
bool agent_turn(const TopicWorld& world, SessionT& s) {
  const auto view = observe(world, s.history);
  if (view.state.candidates.empty()) {
    s.history.end_as_failure();
    return false;
  }
  const auto d = select_topic(s.policy, view.state, s.rng, 0.0);
  const auto& g = world.graph();
  ojson diag;
  diag["turn"] = s.history.size() + 1;
  diag["agent_topic"] = g.label(d.topic);
  diag["gw"] = gw_json(d.gw);
  diag["factors"] = factors_json(d.factors);
  diag["est_distance"] = view.state.candidates[d.index].est_distance;
  diag["est_goal_distance"] = view.gcd;
  diag["est_satisfaction"] = view.eus;
  s.diagnostics.push_back(std::move(diag));
  s.last_scores = d.scores;
  s.last_gw = d.gw;
  s.history.add_agent_topic(d.topic);
  return true;
}

ojson status_fields(const DialogueHistory& h) {
  ojson j;
  j["status"] = h.ended() ? "ended" : "active";
  j["outcome"] = h.ended() ? ojson(std::string(outcome_name(h.outcome()))) : ojson(nullptr);
  return j;
}

ojson scores_json(const KnowledgeGraph& g, const std::vector<CandidateScore>& scores,
                  const std::optional<double>& gw) {
  ojson cands = ojson::array();
  for (const auto& c : scores)
    cands.push_back({{"label", g.label(c.topic)},
                     {"est_distance", c.est_distance},
                     {"est_preference", c.est_preference},
                     {"rank_d", c.rank_d},
                     {"rank_p", c.rank_p},
                     {"score", c.score}});
  return {{"gw", gw_json(gw)}, {"candidates", std::move(cands)}};
}

}  // namespace

ApiReply SessionService::create_session(const nlohmann::json& request) {
  if (!request.is_object()) throw ApiError(400, "request body must be a JSON object");
  const auto& g = world_->graph();
  const auto& start_label = require_string(request, "start");
  const auto& goal_label = require_string(request, "goal");
  const auto& policy_name = require_string(request, "policy");
  for (const auto* label : {&start_label, &goal_label})
    if (!g.contains(*label)) throw ApiError(400, "unknown topic label '" + *label + "'");
  if (start_label == goal_label) throw ApiError(400, "start and goal must differ");

  PolicyType type;
  try {
    type = policy_type_from_name(policy_name);
  } catch (const ConfigError&) {
    throw ApiError(400, "unknown policy '" + policy_name + "'");
  }
  std::string checkpoint;
  if (const auto it = request.find("checkpoint"); it != request.end() && !it->is_null()) {
    if (!it->is_string()) throw ApiError(400, "field 'checkpoint' must be a string");
    checkpoint = it->get<std::string>();
  }
  Policy policy = Policy::baseline(PolicyType::kRandom);
  if (type == PolicyType::kProi || type == PolicyType::kDegrade) {
    if (checkpoint.empty()) throw ApiError(400, "checkpoint required for policy '" + policy_name + "'");
    policy.type = type;
    policy.model = load_model(checkpoint, type);
  } else {
    policy = Policy::baseline(type);
  }
  std::optional<double> hint;
  if (const auto it = request.find("tolerance_hint"); it != request.end() && !it->is_null()) {
    if (!it->is_number() || !(it->get<double>() > 0))
      throw ApiError(400, "field 'tolerance_hint' must be a positive number");
    hint = it->get<double>();
  }

  std::uint64_t n;
  {
    std::unique_lock lock(mu_);
    n = next_++;
  }
  char id[17];
  std::snprintf(id, sizeof id, "%016llx",
                static_cast<unsigned long long>(derive_seed(seed_, {n, 1})));
  auto s = std::make_shared<Session>(id, std::move(policy), g.find(start_label), g.find(goal_label),
                                     world_->config().max_turns, derive_seed(seed_, {n, 2}));
  s->created_at = utc_now();
  s->tolerance_hint = hint;
  s->checkpoint = checkpoint;

  ApiReply reply;
  reply.status = 201;
  {
    std::lock_guard lock(s->mu);
    agent_turn(*world_, *s);
    reply.body["api_version"] = kApiVersion;
    reply.body["session_id"] = s->id;
    reply.body.update(status_fields(s->history));
    reply.body["agent_topic"] = s->history.size() > 0
                                    ? ojson(g.label(s->history.turns().back().agent_topic))
                                    : ojson(nullptr);
    reply.body["diagnostics"] = s->diagnostics.empty() ? ojson(nullptr) : s->diagnostics.back();
  }
  std::unique_lock lock(mu_);
  sessions_.emplace(s->id, std::move(s));
  return reply;
}

ApiReply SessionService::respond(const std::string& session_id, const nlohmann::json& request) {
  auto s = find(session_id);
  std::lock_guard lock(s->mu);
  if (s->history.ended())
    throw ApiError(409, "session has ended (" + std::string(outcome_name(s->history.outcome())) + ")");
  if (!request.is_object()) throw ApiError(400, "request body must be a JSON object");
  const auto& g = world_->graph();
  const auto& mode = require_string(request, "mode");

  UserResponse response;
  if (mode == "cooperative") {
    // A cooperating human names no preference; the neutral value stands in
    // unless the client sends one.
    double pref = kColdStartPreference;
    if (const auto p = request.find("preference"); p != request.end() && !p->is_null()) {
      if (!p->is_number() || !(p->get<double>() >= 0 && p->get<double>() <= 1))
        throw ApiError(400, "preference must be a number in [0,1]");
      pref = p->get<double>();
    }
    response = Cooperative{s->history.turns().back().agent_topic, pref};
  } else if (mode == "quit") {
    response = Quit{};
  } else if (mode == "topics") {
    const auto it = request.find("mentions");
    if (it == request.end() || !it->is_array())
      throw ApiError(400, "field 'mentions' must be an array");
    if (it->empty()) throw ApiError(400, "mentions must name at least one topic");
    if (it->size() > 3) throw ApiError(400, "at most 3 mentions are allowed");
    const TopicId last = s->history.turns().back().agent_topic;
    const auto ball = khop_ball(g, last, 3);
    NonCooperative nc;
    std::vector<std::string> out_of_scope;
    std::set<std::string> seen;
    for (const auto& m : *it) {
      if (!m.is_object()) throw ApiError(400, "each mention must be an object");
      const auto& label = require_string(m, "label");
      const auto p = m.find("preference");
      if (p == m.end() || !p->is_number())
        throw ApiError(400, "mention '" + label + "' needs a numeric preference");
      const double pref = p->get<double>();
      if (!(pref >= 0 && pref <= 1))
        throw ApiError(400, "preference of '" + label + "' must lie in [0,1]");
      if (!g.contains(label)) throw ApiError(400, "unknown topic label '" + label + "'");
      if (!seen.insert(label).second) throw ApiError(400, "topic '" + label + "' mentioned twice");
      const TopicId t = g.find(label);
      if (!ball.contains(t)) {
        out_of_scope.push_back(label);
        continue;
      }
      nc.mentions.push_back({t, pref});
    }
    if (!out_of_scope.empty()) {
      std::string list;
      for (const auto& l : out_of_scope) list += (list.empty() ? "" : ", ") + l;
      throw ApiError(400, "mentions outside 3 hops of '" + g.label(last) + "': " + list);
    }
    response = std::move(nc);
  } else {
    throw ApiError(400, "unknown mode '" + mode + "' (expected cooperative, topics or quit)");
  }

  s->history.add_response(std::move(response));
  bool moved = false;
  if (!s->history.ended()) moved = agent_turn(*world_, *s);

  ApiReply reply;
  reply.body["api_version"] = kApiVersion;
  reply.body["session_id"] = s->id;
  reply.body.update(status_fields(s->history));
  reply.body["agent_topic"] =
      moved ? ojson(g.label(s->history.turns().back().agent_topic)) : ojson(nullptr);
  reply.body["diagnostics"] = moved ? s->diagnostics.back() : ojson(nullptr);
  return reply;
}

ApiReply SessionService::get_state(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mu);
  const auto& g = world_->graph();
  const auto& h = s->history;

  ApiReply reply;
  auto& b = reply.body;
  b["api_version"] = kApiVersion;
  b["session_id"] = s->id;
  b["policy"] = std::string(s->policy.name());
  b.update(status_fields(h));
  b["created_at"] = s->created_at;
  b["start"] = g.label(h.start());
  b["goal"] = g.label(h.goal());
  b["max_turns"] = h.max_turns();
  b["tolerance_hint"] = s->tolerance_hint ? ojson(*s->tolerance_hint) : ojson(nullptr);

  ojson turns = ojson::array();
  int responses = 0;
  for (std::size_t i = 0; i < h.turns().size(); ++i) {
    const auto& t = h.turns()[i];
    ojson row;
    row["turn"] = i + 1;
    row["agent_topic"] = g.label(t.agent_topic);
    if (t.response) {
      ++responses;
      ojson r;
      r["mode"] = std::string(response_kind(*t.response));
      ojson mentions = ojson::array();
      if (const auto* c = std::get_if<Cooperative>(&*t.response))
        r["preference"] = c->preference;
      if (const auto* nc = std::get_if<NonCooperative>(&*t.response))
        for (const auto& m : nc->mentions)
          mentions.push_back({{"label", g.label(m.topic)}, {"preference", m.preference}});
      r["mentions"] = std::move(mentions);
      row["response"] = std::move(r);
    } else {
      row["response"] = nullptr;
    }
    turns.push_back(std::move(row));
  }
  b["agent_turns"] = h.size();
  b["user_responses"] = responses;
  b["history"] = std::move(turns);
  ojson diags = ojson::array();
  for (const auto& d : s->diagnostics) diags.push_back(d);
  b["diagnostics"] = std::move(diags);
  b["last_decision"] = scores_json(g, s->last_scores, s->last_gw);

  // What the agent would weigh next if the user cooperated now.
  b["next_preview"] = nullptr;
  if (!h.ended() && h.awaiting_response()) {
    DialogueHistory preview = h;
    preview.add_response(Cooperative{});
    if (!preview.ended()) {
      const auto view = observe(*world_, preview);
      if (!view.state.candidates.empty()) {
        Rng rng = s->rng;
        const auto d = select_topic(s->policy, view.state, rng, 0.0);
        auto p = scores_json(g, d.scores, d.gw);
        ojson out;
        out["assumed_response"] = "cooperative";
        out["agent_topic"] = g.label(d.topic);
        out["gw"] = p["gw"];
        out["candidates"] = p["candidates"];
        b["next_preview"] = std::move(out);
      }
    }
  }
  return reply;
}

ApiReply SessionService::graph_neighbors(const std::string& label, const std::string& hops) const {
  const auto& g = world_->graph();
  int radius = 0;
  const auto [ptr, ec] = std::from_chars(hops.data(), hops.data() + hops.size(), radius);
  if (ec != std::errc{} || ptr != hops.data() + hops.size() || radius < 1 || radius > 3)
    throw ApiError(400, "hops must be 1, 2 or 3");
  if (!g.contains(label)) throw ApiError(404, "unknown topic label '" + label + "'");
  const TopicId center = g.find(label);
  std::vector<std::pair<int, std::string>> rows;
  for (const auto& [t, d] : khop_ball(g, center, radius))
    if (t != center) rows.emplace_back(d, g.label(t));
  std::sort(rows.begin(), rows.end());
  ApiReply reply;
  reply.body["api_version"] = kApiVersion;
  reply.body["topic"] = label;
  reply.body["hops"] = radius;
  ojson list = ojson::array();
  for (const auto& [d, l] : rows) list.push_back({{"label", l}, {"hop", d}});
  reply.body["neighbors"] = std::move(list);
  return reply;
}

namespace {

template <typename Fn>
void serve_json(httplib::Response& res, Fn&& fn) {
  ApiReply reply;
  try {
    reply = fn();
  } catch (const ApiError& e) {
    reply.status = e.status();
    reply.body = {{"api_version", kApiVersion}, {"error", e.what()}};
  } catch (const std::exception& e) {
    reply.status = 500;
    reply.body = {{"api_version", kApiVersion}, {"error", e.what()}};
  }
  res.status = reply.status;
  res.set_content(reply.body.dump(), "application/json; charset=utf-8");
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error&) {
    throw ApiError(400, "request body is not valid JSON");
  }
}

}  // namespace

void register_routes(httplib::Server& server, SessionService& service) {
  server.Post("/api/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    serve_json(res, [&] { return service.create_session(parse_body(req)); });
  });
  server.Post(R"(/api/sessions/([^/]+)/respond)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                serve_json(res, [&] { return service.respond(req.matches[1], parse_body(req)); });
              });
  server.Get(R"(/api/sessions/([^/]+))",
             [&service](const httplib::Request& req, httplib::Response& res) {
               serve_json(res, [&] { return service.get_state(req.matches[1]); });
             });
  server.Get("/api/graph/neighbors", [&service](const httplib::Request& req, httplib::Response& res) {
    serve_json(res, [&] {
      if (!req.has_param("topic")) throw ApiError(400, "query parameter 'topic' is required");
      const auto hops = req.has_param("hops") ? req.get_param_value("hops") : std::string("1");
      return service.graph_neighbors(req.get_param_value("topic"), hops);
    });
  });
}

}  // namespace proactive
