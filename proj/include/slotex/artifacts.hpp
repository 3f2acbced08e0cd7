#pragma once

// CSV artifacts and the batch manifest.
//
//   daily_<run>.csv  day, social_count, selfish_count, social_mean, social_sd,
//                    selfish_mean, selfish_sd, population_mean, optimum,
//                    rounds, exchanges
//   runs.csv         run, seed, outcome, takeover_day, sat_at_takeover,
//                    sat_at_end, unspent_capital_mean, days, mean_optimum
//   batch.csv        one aggregate row (takeovers per outcome and their means)
//   sweep.csv        axis, value, then the batch.csv columns per sweep value
//
// Reals are printed with six decimals; absent values are written as NA.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "runner.hpp"

namespace slotex {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

namespace fmt6 {
inline std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
inline std::string real_or_na(bool present, double v) { return present ? real(v) : "NA"; }
}  // namespace fmt6

inline std::string daily_csv(const std::vector<DayStats>& days) {
  std::ostringstream out;
  out << "day,social_count,selfish_count,social_mean,social_sd,selfish_mean,selfish_sd,population_mean,optimum,rounds,"
         "exchanges\n";
  for (const DayStats& d : days) {
    out << d.day << ',' << d.social.count << ',' << d.selfish.count << ',' << fmt6::real(d.social.mean) << ','
        << fmt6::real(d.social.sd) << ',' << fmt6::real(d.selfish.mean) << ',' << fmt6::real(d.selfish.sd) << ','
        << fmt6::real(d.population_mean) << ',' << fmt6::real(d.optimum) << ',' << d.rounds << ',' << d.exchanges << '\n';
  }
  return out.str();
}

inline constexpr std::string_view kRunsHeader =
    "run,seed,outcome,takeover_day,sat_at_takeover,sat_at_end,unspent_capital_mean,days,mean_optimum";

inline std::string runs_csv_row(std::size_t index, const RunResult& r) {
  std::ostringstream out;
  out << index << ',' << r.seed << ',' << to_string(r.outcome) << ','
      << (r.takeover_day ? std::to_string(*r.takeover_day) : "NA") << ','
      << fmt6::real_or_na(r.takeover_day.has_value(), r.sat_at_takeover) << ',' << fmt6::real(r.sat_at_end) << ','
      << fmt6::real(r.unspent_capital_mean) << ',' << r.days.size() << ',' << fmt6::real(r.mean_optimum);
  return out.str();
}

inline std::string runs_csv(const std::vector<RunResult>& runs) {
  std::string out(kRunsHeader);
  out += '\n';
  for (std::size_t i = 0; i < runs.size(); ++i) out += runs_csv_row(i, runs[i]) + '\n';
  return out;
}

// Run summaries read back from runs.csv (no daily series). Values carry the
// file's six-decimal precision.
inline std::vector<RunResult> parse_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) throw std::runtime_error("runs.csv: unexpected header");
  std::vector<RunResult> runs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw std::runtime_error("runs.csv line " + std::to_string(line_no) + ": expected 9 fields");
    RunResult r;
    r.seed = std::stoull(f[1]);
    if (f[2] == "social") r.outcome = Outcome::SocialTakeover;
    else if (f[2] == "selfish") r.outcome = Outcome::SelfishTakeover;
    else if (f[2] == "not_converged") r.outcome = Outcome::NotConverged;
    else throw std::runtime_error("runs.csv line " + std::to_string(line_no) + ": unknown outcome '" + f[2] + "'");
    if (f[3] != "NA") r.takeover_day = std::stoull(f[3]);
    if (f[4] != "NA") r.sat_at_takeover = std::stod(f[4]);
    r.sat_at_end = std::stod(f[5]);
    r.unspent_capital_mean = std::stod(f[6]);
    r.mean_optimum = std::stod(f[8]);
    runs.push_back(std::move(r));
  }
  return runs;
}

inline std::string batch_columns() {
  return "runs,social_takeovers,social_mean_takeover_day,social_mean_sat_at_takeover,social_mean_sat_at_end,"
         "selfish_takeovers,selfish_mean_takeover_day,selfish_mean_sat_at_takeover,selfish_mean_sat_at_end,"
         "not_converged,mean_sat_at_end,mean_optimum,mean_unspent_capital,utest_u,utest_p";
}

inline std::string batch_row(const BatchStats& b) {
  std::ostringstream out;
  auto outcome = [&](const OutcomeStats& s) {
    const bool any = s.count > 0;
    out << s.count << ',' << fmt6::real_or_na(any, s.mean_takeover_day) << ','
        << fmt6::real_or_na(any, s.mean_sat_at_takeover) << ',' << fmt6::real_or_na(any, s.mean_sat_at_end) << ',';
  };
  out << b.runs << ',';
  outcome(b.social);
  outcome(b.selfish);
  out << b.not_converged << ',' << fmt6::real(b.mean_sat_at_end) << ',' << fmt6::real(b.mean_optimum) << ','
      << fmt6::real(b.mean_unspent_capital) << ',';
  if (b.end_sat_test)
    out << fmt6::real(b.end_sat_test->u_statistic) << ',' << std::setprecision(6) << std::scientific << b.end_sat_test->p_value;
  else
    out << "NA,NA";
  return out.str();
}

inline std::string batch_csv(const BatchStats& b) { return batch_columns() + '\n' + batch_row(b) + '\n'; }

inline std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::string out = "axis,value," + batch_columns() + '\n';
  for (const SweepRow& r : rows) {
    const std::string value = r.label.find(',') == std::string::npos ? r.label : '"' + r.label + '"';
    out += std::string(to_string(axis)) + ',' + value + ',' + batch_row(r.batch.stats) + '\n';
  }
  return out;
}

// FNV-1a, 64-bit. Used to fingerprint curve contents and configs.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string curve_fingerprint(const DemandCurve& c) {
  std::string s;
  for (double w : c.raw_weights()) s += fmt6::real(w) + ';';
  return hex64(fnv1a64(s));
}

inline nlohmann::ordered_json config_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["population"] = c.population;
  j["beta"] = c.beta;
  j["initial_social_fraction"] = c.initial_social_fraction;
  j["tradeless_rounds_to_end_day"] = c.tradeless_rounds_to_end_day;
  j["tail_days"] = c.tail_days;
  j["max_days"] = c.max_days;
  j["max_rounds_per_day"] = c.max_rounds_per_day;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  nlohmann::ordered_json curves = nlohmann::ordered_json::array();
  for (const CurveShare& s : c.curves) {
    nlohmann::ordered_json cj;
    cj["id"] = s.curve.id();
    cj["fraction"] = s.fraction;
    cj["source"] = s.source;
    cj["weights"] = s.curve.raw_weights();
    cj["hash"] = curve_fingerprint(s.curve);
    curves.push_back(std::move(cj));
  }
  j["curves"] = std::move(curves);
  return j;
}

inline std::string config_hash(const SimConfig& c) { return hex64(fnv1a64(config_json(c).dump())).substr(0, 8); }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace slotex
