#pragma once

// End-of-day payoff-biased imitation (pairwise comparison rule).

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "random.hpp"

namespace slotex {

struct LearningParams {
  double beta = 1.0;  // selection pressure, > 0

  void validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be a finite value > 0");
  }
};

// 2 / (1 + exp(-beta * (observed - observer))) - 1
inline double switch_probability(double observer_sat, double observed_sat, const LearningParams& params) {
  const double diff = observed_sat - observer_sat;
  return 2.0 * (1.0 / (1.0 + std::exp(-params.beta * diff))) - 1.0;
}

// One agent's random draws for a learning step: whom it observes and the
// uniform variate compared against the switch probability.
struct LearningDraw {
  AgentId observed = 0;
  double u = 0.0;
};

struct LearnReport {
  std::size_t to_social = 0;
  std::size_t to_selfish = 0;
  std::size_t switches() const { return to_social + to_selfish; }
};

// Synchronous update: every comparison reads the pre-step strategies and
// satisfactions. Only strategies change.
inline LearnReport learn_step(std::span<Agent> agents, const LearningParams& params, std::span<const LearningDraw> draws) {
  if (draws.size() != agents.size()) throw std::invalid_argument("learn_step: one draw per agent required");
  LearnReport report;
  if (agents.size() < 2) return report;

  std::vector<int> covered(agents.size());
  std::vector<Strategy> before(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    covered[i] = covered_hours(agents[i]);
    before[i] = agents[i].strategy;
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::size_t j = draws[i].observed;
    if (j == i || j >= agents.size()) throw std::invalid_argument("learn_step: invalid observed agent");
    if (covered[j] <= covered[i] || before[j] == before[i]) continue;
    const double p = switch_probability(covered[i] / double(kSlotsPerAgent), covered[j] / double(kSlotsPerAgent), params);
    if (p > draws[i].u) {
      agents[i].strategy = before[j];
      ++(before[j] == Strategy::Social ? report.to_social : report.to_selfish);
    }
  }
  return report;
}

// Each agent observes one other agent chosen uniformly (never itself).
inline std::vector<LearningDraw> draw_observations(std::size_t population, Rng& rng) {
  std::vector<LearningDraw> draws(population);
  if (population < 2) return draws;
  for (std::size_t i = 0; i < population; ++i) {
    std::size_t j = uniform_index(rng, population - 1);
    if (j >= i) ++j;
    draws[i] = LearningDraw{static_cast<AgentId>(j), uniform01(rng)};
  }
  return draws;
}

inline LearnReport learn_step(std::span<Agent> agents, const LearningParams& params, Rng& rng) {
  if (agents.size() < 2) return {};
  const auto draws = draw_observations(agents.size(), rng);
  return learn_step(agents, params, std::span<const LearningDraw>(draws));
}

}  // namespace slotex
