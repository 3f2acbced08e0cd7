#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "demand.hpp"

namespace slotex {

// Maximum achievable mean satisfaction for one day's requests: each hour h
// can satisfy at most min(R_h, capacity_h) requests, and since every agent
// asks for distinct hours the per-hour bounds are jointly attainable.
inline double theoretical_optimum(std::span<const Requests> requests, const CapacityProfile& capacity) {
  if (requests.empty()) return 0.0;
  std::array<int, kHoursPerDay> demand{};
  for (const Requests& r : requests)
    for (Hour h : r) ++demand[h.index()];
  long satisfied = 0;
  for (int h = 0; h < kHoursPerDay; ++h) satisfied += std::min(demand[h], capacity.per_hour[h]);
  return static_cast<double>(satisfied) / static_cast<double>(requests.size() * kSlotsPerAgent);
}

inline double theoretical_optimum(std::span<const Agent> agents, const CapacityProfile& capacity) {
  std::vector<Requests> r;
  r.reserve(agents.size());
  for (const Agent& a : agents) r.push_back(a.requested);
  return theoretical_optimum(std::span<const Requests>(r), capacity);
}

struct StrategySummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // population SD
};

struct DayStats {
  std::size_t day = 0;
  StrategySummary social;
  StrategySummary selfish;
  double population_mean = 0.0;
  double optimum = 0.0;
  std::size_t rounds = 0;
  std::size_t exchanges = 0;
  bool hit_round_cap = false;
};

struct RoundInfo {
  std::size_t rounds = 0;
  std::size_t exchanges = 0;
  bool hit_round_cap = false;
};

inline StrategySummary summarize(std::span<const double> values) {
  StrategySummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

inline DayStats day_stats(std::span<const Agent> agents, std::size_t day, double optimum, const RoundInfo& info) {
  std::vector<double> social, selfish;
  double total = 0.0;
  for (const Agent& a : agents) {
    const double s = satisfaction(a);
    total += s;
    (a.strategy == Strategy::Social ? social : selfish).push_back(s);
  }
  DayStats d;
  d.day = day;
  d.social = summarize(social);
  d.selfish = summarize(selfish);
  d.population_mean = agents.empty() ? 0.0 : total / static_cast<double>(agents.size());
  d.optimum = optimum;
  d.rounds = info.rounds;
  d.exchanges = info.exchanges;
  d.hit_round_cap = info.hit_round_cap;
  return d;
}

// Unrepaid favours each agent has given (credit it could still call in), and
// the owed-side totals for comparison.
struct SocialCapital {
  std::vector<std::uint64_t> given_per_agent;
  std::vector<std::uint64_t> owed_per_agent;
  double mean_given = 0.0;
  double mean_owed = 0.0;
};

inline SocialCapital unspent_social_capital(std::span<const Agent> agents) {
  SocialCapital c;
  std::uint64_t given = 0, owed = 0;
  for (const Agent& a : agents) {
    c.given_per_agent.push_back(a.ledger.total_given());
    c.owed_per_agent.push_back(a.ledger.total_owed());
    given += c.given_per_agent.back();
    owed += c.owed_per_agent.back();
  }
  if (!agents.empty()) {
    c.mean_given = static_cast<double>(given) / static_cast<double>(agents.size());
    c.mean_owed = static_cast<double>(owed) / static_cast<double>(agents.size());
  }
  return c;
}

enum class UTestMethod { Exact, NormalApprox };

struct UTestResult {
  double u_statistic = 0.0;  // U of the first sample
  double p_value = 1.0;      // two-sided
  UTestMethod method = UTestMethod::Exact;
};

namespace detail {

// Number of orderings of n1 + n2 distinct values giving each U in [0, n1*n2],
// via counts(n1, n2, u) = counts(n1-1, n2, u-n2) + counts(n1, n2-1, u).
inline std::vector<double> mann_whitney_null_counts(std::size_t n1, std::size_t n2) {
  const std::size_t max_u = n1 * n2;
  // table[j][u] for the current i, j in [0, n2]
  std::vector<std::vector<double>> prev(n2 + 1, std::vector<double>(max_u + 1, 0.0));
  for (std::size_t j = 0; j <= n2; ++j) prev[j][0] = 1.0;  // i = 0
  for (std::size_t i = 1; i <= n1; ++i) {
    std::vector<std::vector<double>> cur(n2 + 1, std::vector<double>(max_u + 1, 0.0));
    cur[0][0] = 1.0;
    for (std::size_t j = 1; j <= n2; ++j)
      for (std::size_t u = 0; u <= i * j; ++u) {
        double v = cur[j - 1][u];
        if (u >= j) v += prev[j][u - j];
        cur[j][u] = v;
      }
    prev = std::move(cur);
  }
  return prev[n2];
}

inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace detail

// Two-sided Mann-Whitney U test with midranks. Exact null distribution when
// n1*n2 <= 400 and there are no ties, otherwise the normal approximation with
// tie and continuity corrections.
inline UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: both samples must be non-empty");
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;

  struct Obs {
    double v;
    bool first;
  };
  std::vector<Obs> all;
  all.reserve(n);
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(), [](const Obs& x, const Obs& y) { return x.v < y.v; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].v == all[i].v) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].first) rank_sum_a += midrank;
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  UTestResult r;
  r.u_statistic = rank_sum_a - static_cast<double>(n1 * (n1 + 1)) / 2.0;
  const double mean_u = static_cast<double>(n1 * n2) / 2.0;

  if (!ties && n1 * n2 <= 400) {
    r.method = UTestMethod::Exact;
    const auto counts = detail::mann_whitney_null_counts(n1, n2);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto u = static_cast<std::size_t>(std::llround(r.u_statistic));
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k <= u; ++k) lower += counts[k];
    for (std::size_t k = u; k < counts.size(); ++k) upper += counts[k];
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    return r;
  }

  r.method = UTestMethod::NormalApprox;
  const double nd = static_cast<double>(n);
  const double var = static_cast<double>(n1 * n2) / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = (std::abs(r.u_statistic - mean_u) - 0.5) / std::sqrt(var);
  r.p_value = z <= 0.0 ? 1.0 : std::min(1.0, 2.0 * detail::normal_upper_tail(z));
  return r;
}

}  // namespace slotex
