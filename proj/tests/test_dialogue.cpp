// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "proactive/dialogue.hpp"
#include "proactive/errors.hpp"
#include "support.hpp"

using namespace proactive;
using testing_support::tid;

TEST_CASE("response helpers") {
  const UserResponse c = Cooperative{tid(3), 0.7};
  const UserResponse n = NonCooperative{{{tid(1), 0.2}, {tid(2), 0.9}}};
  const UserResponse q = Quit{};
  CHECK(is_cooperative(c));
  CHECK_FALSE(is_cooperative(n));
  CHECK(is_quit(q));
  CHECK(response_kind(c) == "cooperative");
  CHECK(response_kind(n) == "topics");
  CHECK(response_kind(q) == "quit");

  const auto rc = revealed_preferences(c);
  REQUIRE(rc.size() == 1);
  CHECK(rc[0].topic == tid(3));
  CHECK(rc[0].preference == 0.7);
  CHECK(revealed_preferences(n).size() == 2);
  CHECK(revealed_preferences(q).empty());
}

TEST_CASE("outcome names round-trip") {
  for (Outcome o : {Outcome::kOngoing, Outcome::kSuccess, Outcome::kQuit, Outcome::kTimeout})
    CHECK(outcome_from_name(outcome_name(o)) == o);
  CHECK_THROWS_AS(outcome_from_name("bogus"), DataError);
}

TEST_CASE("dialogue state machine") {
  CHECK_THROWS_AS(DialogueHistory(tid(0), tid(5), 0), ConfigError);

  DialogueHistory h(tid(0), tid(5), 3);
  CHECK(h.anchors() == std::vector{tid(0)});
  CHECK_FALSE(h.awaiting_response());
  CHECK_THROWS_AS(h.add_response(Quit{}), ContractError);

  h.add_agent_topic(tid(1));
  CHECK(h.awaiting_response());
  CHECK_THROWS_AS(h.add_agent_topic(tid(2)), ContractError);
  h.add_response(Cooperative{tid(1), 0.6});
  CHECK(h.anchors() == std::vector{tid(1)});

  h.add_agent_topic(tid(2));
  h.add_response(NonCooperative{{{tid(7), 0.3}, {tid(8), 0.4}}});
  CHECK(h.anchors() == std::vector{tid(7), tid(8)});
  CHECK(h.cooperation_sequence() == std::vector{0, 1});
  CHECK(h.agent_topics() == std::vector{tid(1), tid(2)});

  SUBCASE("goal ends the dialogue without a response") {
    h.add_agent_topic(tid(5));
    CHECK(h.outcome() == Outcome::kSuccess);
    CHECK_FALSE(h.awaiting_response());
    CHECK_THROWS_AS(h.add_response(Cooperative{tid(5), 1.0}), ContractError);
    CHECK_THROWS_AS(h.add_agent_topic(tid(4)), ContractError);
  }
  SUBCASE("quit ends the dialogue") {
    h.add_agent_topic(tid(4));
    h.add_response(Quit{});
    CHECK(h.outcome() == Outcome::kQuit);
    CHECK(h.cooperation_sequence() == std::vector{0, 1});
  }
  SUBCASE("answering the last allowed turn times out") {
    h.add_agent_topic(tid(4));
    h.add_response(Cooperative{tid(4), 0.5});
    CHECK(h.outcome() == Outcome::kTimeout);
    CHECK(h.size() == 3);
  }
  SUBCASE("quit on the last turn counts as quit") {
    h.add_agent_topic(tid(4));
    h.add_response(Quit{});
    CHECK(h.outcome() == Outcome::kQuit);
  }
  SUBCASE("end_as_failure") {
    h.end_as_failure();
    CHECK(h.outcome() == Outcome::kTimeout);
    CHECK_THROWS_AS(h.end_as_failure(), ContractError);
  }
}
