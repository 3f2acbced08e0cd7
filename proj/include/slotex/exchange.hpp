#pragma once

// One simulated day of slot exchange: the advert board, request
// identification, strategy-dependent acceptance, swap execution with favour
// bookkeeping, exchange rounds and the day loop.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"
#include "demand.hpp"
#include "metrics.hpp"
#include "random.hpp"

namespace slotex {

enum class Motive : std::uint8_t { MutualBenefit, FavourRepayment, Rejected };

struct Advert {
  AgentId owner = 0;
  SlotToken token;
};

// Per-round listing of unwanted tokens. Requesters browse offers by hour; the
// owner of an offer is only resolved once a request is addressed to it.
// Adverts are withdrawn as soon as their token changes hands.
class AdvertBoard {
 public:
  struct Offer {
    std::uint32_t advert = 0;
    SlotToken token;
  };

  static AdvertBoard build(std::span<const Agent> agents) {
    AdvertBoard b;
    std::uint32_t max_token = 0;
    for (const Agent& a : agents) {
      for (const SlotToken& t : select_unwanted(a)) {
        b.by_hour_[t.hour.index()].push_back(static_cast<std::uint32_t>(b.adverts_.size()));
        b.adverts_.push_back(Advert{a.id, t});
      }
      for (const SlotToken& t : a.held) max_token = std::max(max_token, t.id);
    }
    b.live_.assign(b.adverts_.size(), 1);
    b.live_count_ = b.adverts_.size();
    b.advert_of_token_.assign(agents.empty() ? 0 : max_token + 1, -1);
    for (std::size_t i = 0; i < b.adverts_.size(); ++i)
      b.advert_of_token_[b.adverts_[i].token.id] = static_cast<std::int32_t>(i);
    return b;
  }

  std::size_t size() const { return live_count_; }
  bool empty() const { return live_count_ == 0; }
  std::span<const Advert> listed() const { return adverts_; }
  bool is_live(std::uint32_t advert) const { return live_[advert] != 0; }

  // Calls fn(Offer) for each live offer on `hour` whose owner is neither
  // `browser` nor flagged in `locked`.
  template <class Fn>
  void for_each_offer(Hour hour, AgentId browser, std::span<const char> locked, Fn&& fn) const {
    for (std::uint32_t idx : by_hour_[hour.index()]) {
      if (!live_[idx]) continue;
      const AgentId owner = adverts_[idx].owner;
      if (owner == browser || (owner < locked.size() && locked[owner])) continue;
      fn(Offer{idx, adverts_[idx].token});
    }
  }

  AgentId owner_of(const Offer& o) const { return adverts_[o.advert].owner; }

  void withdraw(std::uint32_t token_id) {
    if (token_id >= advert_of_token_.size()) return;
    const std::int32_t idx = advert_of_token_[token_id];
    if (idx < 0 || !live_[idx]) return;
    live_[idx] = 0;
    --live_count_;
  }

 private:
  std::vector<Advert> adverts_;
  std::array<std::vector<std::uint32_t>, kHoursPerDay> by_hour_;
  std::vector<std::int32_t> advert_of_token_;
  std::vector<char> live_;
  std::size_t live_count_ = 0;
};

struct ExchangeRequest {
  AgentId requester = 0;
  AgentId target = 0;
  SlotToken desired;
  TokenList offered_pool;  // requester's unwanted tokens at request time
};

struct ExchangeOutcome {
  bool accepted = false;
  std::optional<SlotToken> returned;
  Motive motive = Motive::Rejected;

  static ExchangeOutcome rejected() { return {}; }
  static ExchangeOutcome accept(SlotToken t, Motive m) { return {true, t, m}; }
};

// Picks uniformly among live offers on the agent's uncovered requested hours,
// skipping its own adverts and those of agents already targeted this round.
inline std::optional<ExchangeRequest> identify_exchange(const Agent& agent, const AdvertBoard& board,
                                                        std::span<const char> locked, Rng& rng) {
  const HourList wanted = uncovered_hours(agent);
  if (wanted.empty() || board.empty()) return std::nullopt;

  std::size_t candidates = 0;
  for (Hour h : wanted) board.for_each_offer(h, agent.id, locked, [&](const AdvertBoard::Offer&) { ++candidates; });
  if (candidates == 0) return std::nullopt;

  std::size_t pick = uniform_index(rng, candidates);
  std::optional<AdvertBoard::Offer> chosen;
  for (Hour h : wanted) {
    board.for_each_offer(h, agent.id, locked, [&](const AdvertBoard::Offer& o) {
      if (!chosen && pick-- == 0) chosen = o;
    });
    if (chosen) break;
  }
  return ExchangeRequest{agent.id, board.owner_of(*chosen), chosen->token, select_unwanted(agent)};
}

// Receiver's acceptance rule.
//  - Any strategy accepts when the requester offers a token on one of the
//    receiver's uncovered requested hours (lowest token id among those).
//  - A Social receiver that still owes the requester a favour accepts any
//    offered token otherwise (uniformly random); the desired token is one it
//    does not want, so this never lowers its satisfaction.
inline ExchangeOutcome decide(const Agent& receiver, const ExchangeRequest& request, Rng& rng) {
  std::optional<SlotToken> best;
  for (const SlotToken& t : request.offered_pool) {
    if (receiver.requests(t.hour) && !receiver.holds_hour(t.hour) && (!best || t.id < best->id)) best = t;
  }
  if (best) return ExchangeOutcome::accept(*best, Motive::MutualBenefit);

  if (receiver.strategy == Strategy::Social && receiver.ledger.owed_to(request.requester) > 0 &&
      !request.offered_pool.empty()) {
    const SlotToken& t = request.offered_pool[uniform_index(rng, request.offered_pool.size())];
    return ExchangeOutcome::accept(t, Motive::FavourRepayment);
  }
  return ExchangeOutcome::rejected();
}

namespace detail {
inline bool replace_token(Agent& a, std::uint32_t old_id, const SlotToken& replacement) {
  for (SlotToken& t : a.held)
    if (t.id == old_id) {
      t = replacement;
      return true;
    }
  return false;
}
}  // namespace detail

// Swaps desired (receiver -> requester) with returned (requester -> receiver)
// and updates ledgers. Every acceptance is a new favour: the Social requester
// records it as owed, the Social receiver as given. A repayment additionally
// settles the favour the receiver owed the requester, so between two Social
// agents favours keep flowing in both directions.
// Returns false, leaving both agents untouched, if either token is no longer
// held by the expected party.
inline bool execute_exchange(Agent& requester, Agent& receiver, const ExchangeRequest& request,
                             const ExchangeOutcome& outcome) {
  if (!outcome.accepted || !outcome.returned) return false;
  const SlotToken desired = request.desired;
  const SlotToken returned = *outcome.returned;
  if (!receiver.holds_token(desired.id) || !requester.holds_token(returned.id)) return false;

  detail::replace_token(receiver, desired.id, returned);
  detail::replace_token(requester, returned.id, desired);

  record_favour_owed(requester, receiver.id);
  record_favour_given(receiver, requester.id);
  if (outcome.motive == Motive::FavourRepayment) {
    receiver.ledger.repay_owed(requester.id);
    if (requester.strategy == Strategy::Social) requester.ledger.settle_given(receiver.id);
  }
  return true;
}

struct RoundReport {
  std::size_t requests_made = 0;
  std::size_t accepted_count = 0;
};

struct ExchangeEvent {
  AgentId requester = 0;
  AgentId receiver = 0;
  Motive motive = Motive::Rejected;
  int requester_covered_before = 0;
  int requester_covered_after = 0;
  int receiver_covered_before = 0;
  int receiver_covered_after = 0;
};

// Hooks for instrumentation; all no-ops. Custom observers may hide any subset.
struct NullObserver {
  void on_day_start(std::size_t /*day*/, std::span<const Agent>) {}
  void on_exchange(const ExchangeEvent&, std::span<const Agent>) {}
  void on_round(const RoundReport&, std::span<const Agent>) {}
  void on_day_end(const DayStats&, std::span<const Agent>) {}
};

template <class Observer = NullObserver>
RoundReport run_round(std::span<Agent> agents, Rng& rng, Observer& obs) {
  RoundReport report;
  AdvertBoard board = AdvertBoard::build(agents);
  std::vector<std::uint32_t> order(agents.size());
  std::iota(order.begin(), order.end(), 0U);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> locked(agents.size(), 0);

  for (std::uint32_t i : order) {
    Agent& agent = agents[i];
    if (locked[i] || fully_satisfied(agent)) continue;
    auto request = identify_exchange(agent, board, locked, rng);
    if (!request) continue;
    ++report.requests_made;
    locked[request->target] = 1;
    Agent& receiver = agents[request->target];

    const ExchangeOutcome outcome = decide(receiver, *request, rng);
    if (!outcome.accepted) continue;
    ExchangeEvent ev{agent.id, receiver.id, outcome.motive, covered_hours(agent), 0, covered_hours(receiver), 0};
    if (!execute_exchange(agent, receiver, *request, outcome)) continue;
    board.withdraw(request->desired.id);
    board.withdraw(outcome.returned->id);
    ++report.accepted_count;
    ev.requester_covered_after = covered_hours(agent);
    ev.receiver_covered_after = covered_hours(receiver);
    obs.on_exchange(ev, agents);
  }
  obs.on_round(report, agents);
  return report;
}

inline RoundReport run_round(std::span<Agent> agents, Rng& rng) {
  NullObserver obs;
  return run_round(agents, rng, obs);
}

struct DayOptions {
  std::size_t tradeless_rounds_to_end_day = 10;
  std::size_t max_rounds = 500;
};

// Resamples every agent's requests from its curve, deals a fresh random
// allocation, then runs rounds until `tradeless_rounds_to_end_day`
// consecutive rounds without an accepted exchange (or the round cap).
template <class Observer = NullObserver>
DayStats run_day(std::span<Agent> agents, const CapacityProfile& capacity, std::span<const DemandCurve> curves,
                 Rng& rng, std::size_t day, const DayOptions& options, Observer& obs) {
  for (Agent& a : agents) a.requested = sample_requests(curves[a.curve], rng);
  initial_allocation(agents, capacity, rng);
  const double optimum = theoretical_optimum(std::span<const Agent>(agents), capacity);
  obs.on_day_start(day, agents);

  RoundInfo info;
  std::size_t tradeless = 0;
  while (tradeless < options.tradeless_rounds_to_end_day && info.rounds < options.max_rounds) {
    const RoundReport r = run_round(agents, rng, obs);
    ++info.rounds;
    info.exchanges += r.accepted_count;
    tradeless = r.accepted_count == 0 ? tradeless + 1 : 0;
  }
  info.hit_round_cap = tradeless < options.tradeless_rounds_to_end_day;
  DayStats stats = day_stats(agents, day, optimum, info);
  obs.on_day_end(stats, agents);
  return stats;
}

inline DayStats run_day(std::span<Agent> agents, const CapacityProfile& capacity, std::span<const DemandCurve> curves,
                        Rng& rng, std::size_t day = 1, const DayOptions& options = {}) {
  NullObserver obs;
  return run_day(agents, capacity, curves, rng, day, options, obs);
}

}  // namespace slotex
