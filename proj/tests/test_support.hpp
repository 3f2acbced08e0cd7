#pragma once

#include <initializer_list>
#include <vector>

#include "slotex/core.hpp"

namespace slotex::testing {

// Agent with the given requested hours and held token hours. Token ids are
// first_token_id, first_token_id + 1, ... in the order given.
inline Agent make_agent(AgentId id, Strategy strategy, std::initializer_list<int> requested,
                        std::initializer_list<int> held, std::uint32_t first_token_id = 0, std::size_t population = 8) {
  Agent a;
  a.id = id;
  a.strategy = strategy;
  a.ledger = FavourLedger(population);
  std::size_t k = 0;
  for (int h : requested) a.requested[k++] = Hour(h);
  k = 0;
  for (int h : held) {
    a.held[k] = SlotToken{Hour(h), first_token_id + static_cast<std::uint32_t>(k)};
    ++k;
  }
  return a;
}

inline std::vector<int> hours_of(std::span<const SlotToken> tokens) {
  std::vector<int> out;
  for (const SlotToken& t : tokens) out.push_back(t.hour.index());
  return out;
}

}  // namespace slotex::testing
