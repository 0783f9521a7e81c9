// SPDX-License-Identifier: Apache-2.0
#include "proactive/episode.hpp"

#include <json.hpp>

namespace proactive {

using nlohmann::ordered_json;

std::string episode_to_json(const EpisodeRecord& r, const KnowledgeGraph& graph,
                            const std::string& policy, int round) {
  ordered_json doc;
  doc["policy"] = policy;
  doc["round"] = round;
  doc["start"] = graph.label(r.start);
  doc["goal"] = graph.label(r.goal);
  doc["tolerance"] = r.tolerance;
  doc["outcome"] = std::string(outcome_name(r.outcome));
  doc["turns"] = r.turn_count();
  doc["success"] = r.success() ? 1 : 0;
  doc["final_us"] = r.final_us;
  doc["total_reward"] = r.total_reward;
  ordered_json turns = ordered_json::array();
  for (const auto& t : r.turns) {
    ordered_json jt;
    jt["turn"] = t.turn;
    jt["agent_topic"] = graph.label(t.agent_topic);
    jt["agent_preference"] = t.agent_preference;
    if (t.response) {
      jt["response"] = std::string(response_kind(*t.response));
      ordered_json mentions = ordered_json::array();
      if (const auto* n = std::get_if<NonCooperative>(&*t.response))
        for (const auto& m : n->mentions)
          mentions.push_back({{"topic", graph.label(m.topic)}, {"preference", m.preference}});
      jt["mentions"] = mentions;
    } else {
      jt["response"] = nullptr;
      jt["mentions"] = ordered_json::array();
    }
    jt["us"] = t.us;
    jt["gw"] = t.gw ? ordered_json(*t.gw) : ordered_json(nullptr);
    jt["factors"] = {{"turn", t.factors.turn_norm},
                     {"gcd", t.factors.gcd_norm},
                     {"eus", t.factors.eus},
                     {"cd", t.factors.cd}};
    jt["est_distance"] = t.est_distance;
    jt["explored"] = t.explored;
    turns.push_back(std::move(jt));
  }
  doc["per_turn"] = turns;
  return doc.dump();
}

void write_transcript_line(std::ostream& out, const EpisodeRecord& record,
                           const KnowledgeGraph& graph, const std::string& policy, int round) {
  out << episode_to_json(record, graph, policy, round) << '\n';
}

}  // namespace proactive
