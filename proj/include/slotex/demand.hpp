#pragma once

// Demand curves, per-agent request sampling, hourly capacity and the random
// initial allocation of slot tokens.

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "random.hpp"

namespace slotex {

class CurveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DemandCurve {
 public:
  DemandCurve() : DemandCurve("flat", flat_weights()) {}

  DemandCurve(std::string id, const std::array<double, kHoursPerDay>& weights) : id_(std::move(id)), raw_(weights) {
    double total = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
      if (!(weights[h] >= 0.0)) throw CurveError("curve '" + id_ + "': negative weight at hour " + std::to_string(h));
      total += weights[h];
    }
    if (!(total > 0.0)) throw CurveError("curve '" + id_ + "': all weights are zero");
    for (int h = 0; h < kHoursPerDay; ++h) probability_[h] = weights[h] / total;
  }

  static DemandCurve flat() { return DemandCurve("flat", flat_weights()); }

  const std::string& id() const { return id_; }
  const std::array<double, kHoursPerDay>& raw_weights() const { return raw_; }
  const std::array<double, kHoursPerDay>& probabilities() const { return probability_; }
  double probability(Hour h) const { return probability_[h.index()]; }
  int positive_hours() const {
    return static_cast<int>(std::count_if(raw_.begin(), raw_.end(), [](double w) { return w > 0.0; }));
  }

 private:
  static std::array<double, kHoursPerDay> flat_weights() {
    std::array<double, kHoursPerDay> w;
    w.fill(1.0);
    return w;
  }

  std::string id_;
  std::array<double, kHoursPerDay> raw_{};
  std::array<double, kHoursPerDay> probability_{};
};

namespace detail {
inline std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}
}  // namespace detail

// Parses `hour,weight` CSV text: header line, then exactly 24 data rows
// covering hours 0..23 once each. Blank lines are ignored.
inline DemandCurve load_demand_curve(std::istream& in, const std::string& id) {
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::array<double, kHoursPerDay> weights{};
  std::array<bool, kHoursPerDay> seen{};
  int rows = 0;
  auto fail = [&](const std::string& msg) { throw CurveError("curve '" + id + "' line " + std::to_string(line_no) + ": " + msg); };

  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      std::string h = line;
      h.erase(std::remove_if(h.begin(), h.end(), ::isspace), h.end());
      if (h != "hour,weight") fail("expected header 'hour,weight'");
      header_seen = true;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) fail("expected two fields 'hour,weight'");
    std::string hour_s = detail::trim(line.substr(0, comma));
    std::string weight_s = detail::trim(line.substr(comma + 1));
    int hour = 0;
    double weight = 0.0;
    try {
      std::size_t used = 0;
      hour = std::stoi(hour_s, &used);
      if (used != hour_s.size()) throw std::invalid_argument(hour_s);
      weight = std::stod(weight_s, &used);
      if (used != weight_s.size()) throw std::invalid_argument(weight_s);
    } catch (const std::logic_error&) {
      fail("unparseable row '" + line + "'");
    }
    if (hour < 0 || hour >= kHoursPerDay) fail("hour " + std::to_string(hour) + " outside 0..23");
    if (seen[hour]) fail("duplicate hour " + std::to_string(hour));
    if (!(weight >= 0.0)) fail("negative weight for hour " + std::to_string(hour));
    seen[hour] = true;
    weights[hour] = weight;
    ++rows;
  }
  if (!header_seen) throw CurveError("curve '" + id + "': empty input");
  if (rows != kHoursPerDay) throw CurveError("curve '" + id + "': expected 24 hours, got " + std::to_string(rows) + " rows");
  return DemandCurve(id, weights);
}

// Curve id is the file stem.
inline DemandCurve load_demand_curve_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CurveError("curve file not found: " + path.string());
  return load_demand_curve(in, path.stem().string());
}

// Four distinct hours by sequential weighted draws, removing each drawn hour
// before the next draw.
inline Requests sample_requests(const DemandCurve& curve, Rng& rng) {
  if (curve.positive_hours() < kSlotsPerAgent)
    throw CurveError("curve '" + curve.id() + "' has fewer than 4 hours with positive weight");
  std::array<double, kHoursPerDay> w = curve.probabilities();
  Requests out{};
  for (int k = 0; k < kSlotsPerAgent; ++k) {
    double total = 0.0;
    int last_positive = -1;
    for (int h = 0; h < kHoursPerDay; ++h) {
      total += w[h];
      if (w[h] > 0.0) last_positive = h;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    int pick = last_positive;
    double acc = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
      if (w[h] <= 0.0) continue;
      acc += w[h];
      if (u < acc) {
        pick = h;
        break;
      }
    }
    out[k] = Hour(pick);
    w[pick] = 0.0;
  }
  return out;
}

struct CapacityProfile {
  std::array<int, kHoursPerDay> per_hour{};

  int total() const { return std::accumulate(per_hour.begin(), per_hour.end(), 0); }
  int at(Hour h) const { return per_hour[h.index()]; }

  // 4N tokens spread evenly; when 4N is not a multiple of 24 the remainder
  // goes one token each to the lowest-numbered hours.
  static CapacityProfile uniform(std::size_t population) {
    const int total = static_cast<int>(population) * kSlotsPerAgent;
    CapacityProfile c;
    const int base = total / kHoursPerDay;
    const int rem = total % kHoursPerDay;
    for (int h = 0; h < kHoursPerDay; ++h) c.per_hour[h] = base + (h < rem ? 1 : 0);
    return c;
  }
};

// Builds the token pool (ids assigned in hour order), shuffles it and deals
// four tokens per agent in agent order.
inline void initial_allocation(std::span<Agent> agents, const CapacityProfile& capacity, Rng& rng) {
  const int needed = static_cast<int>(agents.size()) * kSlotsPerAgent;
  if (capacity.total() != needed)
    throw std::invalid_argument("capacity total " + std::to_string(capacity.total()) + " does not equal 4 x population (" +
                                std::to_string(needed) + ")");
  std::vector<SlotToken> pool;
  pool.reserve(needed);
  std::uint32_t next_id = 0;
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (capacity.per_hour[h] < 0) throw std::invalid_argument("negative capacity at hour " + std::to_string(h));
    for (int k = 0; k < capacity.per_hour[h]; ++k) pool.push_back(SlotToken{Hour(h), next_id++});
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  std::size_t next = 0;
  for (Agent& a : agents)
    for (SlotToken& slot : a.held) slot = pool[next++];
}

}  // namespace slotex
