// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "proactive/agent.hpp"
#include "proactive/embeddings.hpp"
#include "proactive/world_gen.hpp"

namespace testing_support {

// A small synthetic world with trained embeddings, heap-allocated so the
// TopicWorld's references stay valid when the struct moves.
struct MiniWorld {
  proactive::SyntheticWorld synth;
  proactive::EmbeddingTable embeddings;
  std::unique_ptr<proactive::TopicWorld> world;
};

inline std::unique_ptr<MiniWorld> make_mini_world(int nodes = 60, int pairs = 50,
                                                  std::uint64_t seed = 3) {
  proactive::SyntheticWorldSpec spec;
  spec.node_count = nodes;
  spec.pair_count = pairs;
  spec.seed = seed;
  auto m = std::make_unique<MiniWorld>();
  m->synth = proactive::generate_world(spec);
  proactive::WalkParams walk;
  walk.seed = seed;
  walk.walks_per_node = 4;
  walk.epochs = 1;
  m->embeddings = proactive::train_embeddings(m->synth.graph, 16, walk);
  m->world = std::make_unique<proactive::TopicWorld>(m->synth.graph, m->embeddings,
                                                     proactive::AgentConfig{});
  return m;
}

}  // namespace testing_support
