#pragma once

// Domain types shared by every part of the simulator: hours, slot tokens,
// strategies, the pairwise favour ledger and the agent itself, plus the
// elementary per-agent computations (satisfaction, unwanted-slot selection,
// favour bookkeeping).

#include <algorithm>
#include <array>
#include <cassert>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slotex {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kSlotsPerAgent = 4;

using AgentId = std::uint32_t;

class Hour {
 public:
  constexpr Hour() = default;
  constexpr explicit Hour(int index) : index_(static_cast<std::uint8_t>(index)) {
    if (index < 0 || index >= kHoursPerDay) throw std::out_of_range("hour index out of [0, 23]: " + std::to_string(index));
  }
  constexpr int index() const { return index_; }
  constexpr auto operator<=>(const Hour&) const = default;

 private:
  std::uint8_t index_ = 0;
};

// One unit of hourly capacity. Token ids are unique within a simulated day.
struct SlotToken {
  Hour hour;
  std::uint32_t id = 0;
  constexpr bool operator==(const SlotToken&) const = default;
};

enum class Strategy : std::uint8_t { Selfish, Social };

inline constexpr std::string_view to_string(Strategy s) { return s == Strategy::Social ? "social" : "selfish"; }

// Fixed-capacity list; unwanted sets, offered pools and uncovered hours are
// rebuilt every round and never exceed one agent's slot count.
template <class T, std::size_t Capacity>
class FixedList {
 public:
  constexpr void push_back(const T& t) {
    assert(size_ < Capacity);
    items_[size_++] = t;
  }
  constexpr std::size_t size() const { return size_; }
  constexpr bool empty() const { return size_ == 0; }
  constexpr const T& operator[](std::size_t i) const { return items_[i]; }
  constexpr const T* begin() const { return items_.data(); }
  constexpr const T* end() const { return items_.data() + size_; }
  std::span<const T> view() const { return {items_.data(), size_}; }

 private:
  std::array<T, Capacity> items_{};
  std::size_t size_ = 0;
};

using TokenList = FixedList<SlotToken, kSlotsPerAgent>;
using HourList = FixedList<Hour, kSlotsPerAgent>;

// Pairwise social capital as seen by one agent.
//   owed_to[b]  : favours this agent received from b and has not yet repaid
//   given_to[b] : favours this agent gave b that b has not yet repaid
// Dense storage indexed by agent id; populations are at most a few hundred.
class FavourLedger {
 public:
  FavourLedger() = default;
  explicit FavourLedger(std::size_t population) : owed_to_(population, 0), given_to_(population, 0) {}

  std::size_t population() const { return owed_to_.size(); }
  std::uint32_t owed_to(AgentId other) const { return owed_to_.at(other); }
  std::uint32_t given_to(AgentId other) const { return given_to_.at(other); }

  void add_owed(AgentId other) { ++owed_to_.at(other); }
  void add_given(AgentId other) { ++given_to_.at(other); }

  // Repaying a favour requires one to be outstanding.
  void repay_owed(AgentId other) {
    auto& c = owed_to_.at(other);
    if (c == 0) throw std::logic_error("repaying a favour that is not owed");
    --c;
  }
  // Saturates at zero: the creditor may not have recorded the favour if it was
  // Selfish when the favour was granted.
  void settle_given(AgentId other) {
    auto& c = given_to_.at(other);
    if (c > 0) --c;
  }

  std::uint64_t total_owed() const { return sum(owed_to_); }
  std::uint64_t total_given() const { return sum(given_to_); }

  bool operator==(const FavourLedger&) const = default;

 private:
  static std::uint64_t sum(const std::vector<std::uint32_t>& v) {
    std::uint64_t s = 0;
    for (auto c : v) s += c;
    return s;
  }
  std::vector<std::uint32_t> owed_to_;
  std::vector<std::uint32_t> given_to_;
};

using Requests = std::array<Hour, kSlotsPerAgent>;
using Holding = std::array<SlotToken, kSlotsPerAgent>;

struct Agent {
  AgentId id = 0;
  Strategy strategy = Strategy::Selfish;
  Requests requested{};
  Holding held{};
  FavourLedger ledger;
  std::size_t curve = 0;  // index into the run's demand-curve list

  bool requests(Hour h) const { return std::find(requested.begin(), requested.end(), h) != requested.end(); }
  bool holds_hour(Hour h) const {
    return std::any_of(held.begin(), held.end(), [h](const SlotToken& t) { return t.hour == h; });
  }
  bool holds_token(std::uint32_t token_id) const {
    return std::any_of(held.begin(), held.end(), [token_id](const SlotToken& t) { return t.id == token_id; });
  }
};

// Number of distinct requested hours covered by at least one held token.
inline int covered_hours(const Agent& a) {
  int n = 0;
  for (Hour h : a.requested) n += a.holds_hour(h) ? 1 : 0;
  return n;
}

inline double satisfaction(const Agent& a) { return covered_hours(a) / static_cast<double>(kSlotsPerAgent); }

inline bool fully_satisfied(const Agent& a) { return covered_hours(a) == kSlotsPerAgent; }

// Held tokens the agent would give away: tokens on unrequested hours, and on a
// requested hour every token except the one with the lowest id.
inline TokenList select_unwanted(const Agent& a) {
  TokenList out;
  for (const SlotToken& t : a.held) {
    if (!a.requests(t.hour)) {
      out.push_back(t);
      continue;
    }
    for (const SlotToken& other : a.held) {
      if (other.hour == t.hour && other.id < t.id) {
        out.push_back(t);
        break;
      }
    }
  }
  return out;
}

// Requested hours not covered by any held token.
inline HourList uncovered_hours(const Agent& a) {
  HourList out;
  for (Hour h : a.requested)
    if (!a.holds_hour(h)) out.push_back(h);
  return out;
}

// Favour bookkeeping after an accepted request. Only Social agents write to
// their own ledgers; each side records independently.
inline void record_favour_owed(Agent& requester, AgentId acceptor) {
  if (requester.strategy == Strategy::Social) requester.ledger.add_owed(acceptor);
}
inline void record_favour_given(Agent& acceptor, AgentId requester) {
  if (acceptor.strategy == Strategy::Social) acceptor.ledger.add_given(requester);
}

// Population-level token check: hour multiset of all held tokens.
inline std::array<int, kHoursPerDay> hour_histogram(std::span<const Agent> agents) {
  std::array<int, kHoursPerDay> counts{};
  for (const Agent& a : agents)
    for (const SlotToken& t : a.held) ++counts[t.hour.index()];
  return counts;
}

}  // namespace slotex
