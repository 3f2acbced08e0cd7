#pragma once

// Full simulations (day loop, takeover detection, post-takeover tail), seeded
// batches of independent runs, and parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "demand.hpp"
#include "exchange.hpp"
#include "learning.hpp"
#include "metrics.hpp"
#include "random.hpp"

namespace slotex {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& msg) : std::runtime_error(key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct CurveShare {
  DemandCurve curve;
  double fraction = 1.0;
  std::string source = "builtin";  // file the curve was read from
};

struct SimConfig {
  std::size_t population = 96;
  std::vector<CurveShare> curves{CurveShare{}};
  double beta = 1.0;
  double initial_social_fraction = 0.5;
  std::size_t tradeless_rounds_to_end_day = 10;
  std::size_t tail_days = 100;
  std::size_t max_days = 10000;
  std::size_t max_rounds_per_day = 500;
  std::uint64_t seed = 1;
  std::size_t runs = 100;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (population < 2) throw ConfigError("population", "must be at least 2");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta", "must be > 0");
    if (!(initial_social_fraction >= 0.0 && initial_social_fraction <= 1.0))
      throw ConfigError("initial_social_fraction", "must lie in [0, 1]");
    if (tradeless_rounds_to_end_day == 0) throw ConfigError("tradeless_rounds_to_end_day", "must be positive");
    if (max_rounds_per_day == 0) throw ConfigError("max_rounds_per_day", "must be positive");
    if (max_days == 0) throw ConfigError("max_days", "must be positive");
    if (runs == 0) throw ConfigError("runs", "must be positive");
    if (curves.empty()) throw ConfigError("curves", "at least one demand curve is required");
    double total = 0.0;
    for (const CurveShare& c : curves) {
      if (!(c.fraction >= 0.0)) throw ConfigError("curve." + c.curve.id(), "fraction must be >= 0");
      if (c.curve.positive_hours() < kSlotsPerAgent)
        throw ConfigError("curve." + c.curve.id(), "needs at least 4 hours with positive weight");
      total += c.fraction;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("curves", "fractions must sum to 1 (got " + std::to_string(total) + ")");
  }

  DayOptions day_options() const { return {tradeless_rounds_to_end_day, max_rounds_per_day}; }
};

// Agents per curve: floor(fraction * N) each, leftovers to the largest
// fractional remainders (earlier curves win ties).
inline std::vector<std::size_t> curve_counts(std::span<const CurveShare> curves, std::size_t population) {
  std::vector<std::size_t> counts(curves.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double exact = curves[i].fraction * static_cast<double>(population);
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    assigned += counts[i];
    remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < population; ++k, ++assigned) ++counts[remainders[k % remainders.size()].second];
  return counts;
}

inline std::size_t initial_social_count(double fraction, std::size_t population) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(population) - 1e-9));
}

enum class Outcome { SocialTakeover, SelfishTakeover, NotConverged };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::SocialTakeover: return "social";
    case Outcome::SelfishTakeover: return "selfish";
    default: return "not_converged";
  }
}

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<DayStats> days;
  Outcome outcome = Outcome::NotConverged;
  std::optional<std::size_t> takeover_day;
  double sat_at_takeover = 0.0;
  double sat_at_end = 0.0;
  double unspent_capital_mean = 0.0;  // favours given and not yet repaid, per agent
  double owed_capital_mean = 0.0;
  double mean_optimum = 0.0;  // averaged over all simulated days
};

// Agents set up for a run: strategies and curves assigned by count, then
// shuffled across ids with the run's generator.
inline std::vector<Agent> make_population(const SimConfig& config, Rng& rng) {
  const std::size_t n = config.population;
  std::vector<Strategy> strategies(n, Strategy::Selfish);
  std::fill_n(strategies.begin(), std::min(n, initial_social_count(config.initial_social_fraction, n)), Strategy::Social);
  std::shuffle(strategies.begin(), strategies.end(), rng);

  std::vector<std::size_t> curve_of;
  const auto counts = curve_counts(config.curves, n);
  for (std::size_t c = 0; c < counts.size(); ++c) curve_of.insert(curve_of.end(), counts[c], c);
  std::shuffle(curve_of.begin(), curve_of.end(), rng);

  std::vector<Agent> agents(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i].id = static_cast<AgentId>(i);
    agents[i].strategy = strategies[i];
    agents[i].curve = curve_of[i];
    agents[i].ledger = FavourLedger(n);
  }
  return agents;
}

inline std::optional<Strategy> sole_strategy(std::span<const Agent> agents) {
  if (agents.empty()) return std::nullopt;
  const Strategy s = agents.front().strategy;
  for (const Agent& a : agents)
    if (a.strategy != s) return std::nullopt;
  return s;
}

// Runs days (exchange, then learning) until one strategy holds the whole
// population, then exactly `tail_days` more; stops as NotConverged at
// `max_days` otherwise.
template <class Observer = NullObserver>
RunResult run_simulation(const SimConfig& config, std::uint64_t run_seed, Observer& obs) {
  Rng rng(run_seed);
  std::vector<Agent> agents = make_population(config, rng);
  std::vector<DemandCurve> curves;
  for (const CurveShare& c : config.curves) curves.push_back(c.curve);
  const CapacityProfile capacity = CapacityProfile::uniform(config.population);
  const LearningParams params{config.beta};
  const DayOptions options = config.day_options();

  RunResult r;
  r.seed = run_seed;
  double optimum_sum = 0.0;
  for (std::size_t day = 1;; ++day) {
    const DayStats stats = run_day(std::span<Agent>(agents), capacity, std::span<const DemandCurve>(curves), rng, day, options, obs);
    optimum_sum += stats.optimum;
    r.days.push_back(stats);
    learn_step(std::span<Agent>(agents), params, rng);

    if (!r.takeover_day) {
      if (auto s = sole_strategy(agents)) {
        r.takeover_day = day;
        r.outcome = *s == Strategy::Social ? Outcome::SocialTakeover : Outcome::SelfishTakeover;
        r.sat_at_takeover = stats.population_mean;
      }
    }
    if (r.takeover_day && day >= *r.takeover_day + config.tail_days) break;
    if (!r.takeover_day && day >= config.max_days) break;
  }
  r.sat_at_end = r.days.back().population_mean;
  r.mean_optimum = optimum_sum / static_cast<double>(r.days.size());
  const SocialCapital capital = unspent_social_capital(agents);
  r.unspent_capital_mean = capital.mean_given;
  r.owed_capital_mean = capital.mean_owed;
  return r;
}

inline RunResult run_simulation(const SimConfig& config, std::uint64_t run_seed) {
  NullObserver obs;
  return run_simulation(config, run_seed, obs);
}

struct OutcomeStats {
  std::size_t count = 0;
  double mean_takeover_day = 0.0;
  double mean_sat_at_takeover = 0.0;
  double mean_sat_at_end = 0.0;
  double mean_unspent_capital = 0.0;
};

struct BatchStats {
  std::size_t runs = 0;
  OutcomeStats social;
  OutcomeStats selfish;
  std::size_t not_converged = 0;
  double mean_sat_at_end = 0.0;
  double mean_optimum = 0.0;
  double mean_unspent_capital = 0.0;
  std::optional<UTestResult> end_sat_test;  // social-takeover vs selfish-takeover end satisfaction
};

// Aggregates runs in the order given; run_batch always supplies run-index order.
inline BatchStats aggregate(std::span<const RunResult> runs) {
  BatchStats b;
  b.runs = runs.size();
  std::vector<double> social_end, selfish_end;
  auto add = [](OutcomeStats& s, const RunResult& r) {
    ++s.count;
    s.mean_takeover_day += static_cast<double>(*r.takeover_day);
    s.mean_sat_at_takeover += r.sat_at_takeover;
    s.mean_sat_at_end += r.sat_at_end;
    s.mean_unspent_capital += r.unspent_capital_mean;
  };
  for (const RunResult& r : runs) {
    b.mean_sat_at_end += r.sat_at_end;
    b.mean_optimum += r.mean_optimum;
    b.mean_unspent_capital += r.unspent_capital_mean;
    switch (r.outcome) {
      case Outcome::SocialTakeover:
        add(b.social, r);
        social_end.push_back(r.sat_at_end);
        break;
      case Outcome::SelfishTakeover:
        add(b.selfish, r);
        selfish_end.push_back(r.sat_at_end);
        break;
      case Outcome::NotConverged: ++b.not_converged; break;
    }
  }
  auto finish = [](OutcomeStats& s) {
    if (s.count == 0) return;
    const double n = static_cast<double>(s.count);
    s.mean_takeover_day /= n;
    s.mean_sat_at_takeover /= n;
    s.mean_sat_at_end /= n;
    s.mean_unspent_capital /= n;
  };
  finish(b.social);
  finish(b.selfish);
  if (b.runs > 0) {
    const double n = static_cast<double>(b.runs);
    b.mean_sat_at_end /= n;
    b.mean_optimum /= n;
    b.mean_unspent_capital /= n;
  }
  if (!social_end.empty() && !selfish_end.empty())
    b.end_sat_test = mann_whitney_u(std::span<const double>(social_end), std::span<const double>(selfish_end));
  return b;
}

struct BatchResult {
  std::vector<RunResult> runs;  // run-index order
  BatchStats stats;
};

inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested ? requested : std::max(1U, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs `config.runs` independent simulations with seeds
// derive_run_seed(config.seed, index), in parallel when threads allow. Each
// run gets its own observer from make_observer(index); on_done(index, result,
// observer) is called (serialised) as runs complete.
template <class MakeObserver, class OnDone>
BatchResult run_batch_with(const SimConfig& config, MakeObserver make_observer, OnDone on_done) {
  config.validate();
  BatchResult out;
  out.runs.resize(config.runs);
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t i = next++; i < config.runs; i = next++) {
      try {
        auto obs = make_observer(i);
        out.runs[i] = run_simulation(config, derive_run_seed(config.seed, i), obs);
        std::lock_guard lock(done_mutex);
        on_done(i, out.runs[i], obs);
      } catch (...) {
        std::lock_guard lock(done_mutex);
        if (!failure) failure = std::current_exception();
        next = config.runs;
      }
    }
  };
  const std::size_t n = worker_count(config.threads, config.runs);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  out.stats = aggregate(out.runs);
  return out;
}

inline BatchResult run_batch(const SimConfig& config,
                             const std::function<void(std::size_t, const RunResult&)>& on_done = {}) {
  return run_batch_with(
      config, [](std::size_t) { return NullObserver{}; },
      [&](std::size_t i, const RunResult& r, NullObserver&) {
        if (on_done) on_done(i, r);
      });
}

enum class SweepAxis { Population, Beta, CurveMix };

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Population: return "population";
    case SweepAxis::Beta: return "beta";
    default: return "curve_mix";
  }
}

struct SweepPoint {
  std::string label;
  SimConfig config;
};

struct SweepRow {
  std::string label;
  SimConfig config;
  BatchResult batch;
};

// Runs one batch per point. Every point's config is validated before any
// simulation starts. Capacity always scales with population (4 tokens per
// agent spread over the day).
inline std::vector<SweepRow> run_sweep(std::span<const SweepPoint> points,
                                       const std::function<void(const SweepRow&)>& on_point = {}) {
  if (points.empty()) throw ConfigError("values", "sweep needs at least one value");
  for (const SweepPoint& p : points) {
    try {
      p.config.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), std::string("sweep value '") + p.label + "': " + e.what());
    }
  }
  std::vector<SweepRow> rows;
  for (const SweepPoint& p : points) {
    rows.push_back(SweepRow{p.label, p.config, run_batch(p.config)});
    if (on_point) on_point(rows.back());
  }
  return rows;
}

}  // namespace slotex
