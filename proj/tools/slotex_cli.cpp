// slotex: command-line front end for the slot-exchange simulator.
//
//   slotex validate [--config PATH] [overrides]
//   slotex run      [--config PATH] [--out DIR] [overrides]
//   slotex batch    [--config PATH] [--out DIR] [overrides]
//   slotex sweep    --axis population|beta|curve_mix --values LIST [...]
//   slotex optimum  [--curve ID | --curves SPEC] [--population N] [--samples N]
//
// Exit codes: 0 success, 2 config error, 3 runtime error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slotex/slotex.hpp"

namespace fs = std::filesystem;
using namespace slotex;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> curve_dir;
  ConfigOverrides overrides;
  std::string axis;
  std::string values;
  std::optional<std::string> curve;
  std::size_t samples = 100;
};

void add_common(CLI::App* cmd, Options& o, bool with_out = true) {
  cmd->add_option("--config", o.config_path, "Config file (key = value)");
  if (with_out) cmd->add_option("--out", o.out_dir, "Output directory (default ./out/<timestamp>-<confighash>)");
  cmd->add_option("--curve-dir", o.curve_dir, "Directory holding <id>.csv demand curves");
  cmd->add_option("--seed", o.overrides.seed, "Base seed");
  cmd->add_option("--population", o.overrides.population, "Number of agents");
  cmd->add_option("--beta", o.overrides.beta, "Selection pressure");
  cmd->add_option("--runs", o.overrides.runs, "Runs per batch");
  cmd->add_option("--threads", o.overrides.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--curves", o.overrides.curves, "Curve mix, id:fraction[,id:fraction...]");
}

SimConfig load(const Options& o, CurveCatalog& catalog) {
  if (o.curve_dir) catalog.dir = *o.curve_dir;
  SimConfig c;
  if (o.config_path) c = load_config_file(*o.config_path, catalog);
  if (o.curve_dir) catalog.dir = *o.curve_dir;  // flag wins over the file's curve_dir
  o.overrides.apply(c, catalog);
  c.validate();
  return c;
}

fs::path output_dir(const Options& o, const SimConfig& c) {
  if (o.out_dir) return *o.out_dir;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&now));
  return fs::path("out") / (std::string(stamp) + "-" + config_hash(c));
}

// Output directory that stays marked INCOMPLETE until finish() is called.
class ArtifactDir {
 public:
  explicit ArtifactDir(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    write_text(marker(), "artifacts in this directory are partial\n");
  }
  fs::path operator/(const std::string& name) const { return dir_ / name; }
  const fs::path& path() const { return dir_; }
  void write(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    written_.push_back(name);
  }
  const std::vector<std::string>& written() const { return written_; }
  void finish() { fs::remove(marker()); }

 private:
  fs::path marker() const { return dir_ / "INCOMPLETE"; }
  fs::path dir_;
  std::vector<std::string> written_;
};

nlohmann::ordered_json manifest(const std::string& command, const Options& o, const SimConfig& c) {
  nlohmann::ordered_json m;
  m["artifact_version"] = kArtifactVersion;
  m["command"] = command;
  m["config_file"] = o.config_path ? nlohmann::ordered_json(*o.config_path) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json ov = nlohmann::ordered_json::object();
  for (const auto& [k, v] : o.overrides.applied()) ov[k] = v;
  m["overrides"] = ov;
  m["config"] = config_json(c);
  return m;
}

void print_batch_summary(const BatchStats& b) {
  std::printf("runs: %zu  social takeovers: %zu  selfish takeovers: %zu  not converged: %zu\n", b.runs, b.social.count,
              b.selfish.count, b.not_converged);
  if (b.social.count)
    std::printf("  social : mean takeover day %.1f, sat at takeover %.3f, sat at end %.3f\n", b.social.mean_takeover_day,
                b.social.mean_sat_at_takeover, b.social.mean_sat_at_end);
  if (b.selfish.count)
    std::printf("  selfish: mean takeover day %.1f, sat at takeover %.3f, sat at end %.3f\n", b.selfish.mean_takeover_day,
                b.selfish.mean_sat_at_takeover, b.selfish.mean_sat_at_end);
  std::printf("  mean end satisfaction %.3f, mean optimum %.3f, unspent social capital %.2f\n", b.mean_sat_at_end,
              b.mean_optimum, b.mean_unspent_capital);
  if (b.end_sat_test)
    std::printf("  Mann-Whitney U (social vs selfish end satisfaction): U = %.1f, p = %.3g\n", b.end_sat_test->u_statistic,
                b.end_sat_test->p_value);
}

void write_batch_files(ArtifactDir& dir, const BatchResult& batch, const std::string& prefix = "") {
  for (std::size_t i = 0; i < batch.runs.size(); ++i)
    dir.write(prefix + "daily_" + std::to_string(i) + ".csv", daily_csv(batch.runs[i].days));
  dir.write(prefix + "runs.csv", runs_csv(batch.runs));
  dir.write(prefix + "batch.csv", batch_csv(batch.stats));
}

void finish_dir(ArtifactDir& dir, nlohmann::ordered_json m) {
  m["artifacts"] = dir.written();
  dir.write("manifest.json", m.dump(2) + "\n");
  dir.finish();
  std::printf("artifacts: %s (%zu files)\n", dir.path().string().c_str(), dir.written().size());
}

int cmd_run(const Options& o, const SimConfig& c) {
  ArtifactDir dir(output_dir(o, c));
  const RunResult r = run_simulation(c, derive_run_seed(c.seed, 0));
  dir.write("daily_0.csv", daily_csv(r.days));
  dir.write("runs.csv", runs_csv({r}));
  std::printf("outcome: %s", std::string(to_string(r.outcome)).c_str());
  if (r.takeover_day) std::printf(" on day %zu (satisfaction %.3f)", *r.takeover_day, r.sat_at_takeover);
  std::printf("\ndays: %zu  end satisfaction: %.3f  mean optimum: %.3f  unspent social capital: %.2f\n", r.days.size(),
              r.sat_at_end, r.mean_optimum, r.unspent_capital_mean);
  finish_dir(dir, manifest("run", o, c));
  return 0;
}

int cmd_batch(const Options& o, const SimConfig& c) {
  ArtifactDir dir(output_dir(o, c));
  const BatchResult batch = run_batch(c);
  write_batch_files(dir, batch);
  print_batch_summary(batch.stats);
  finish_dir(dir, manifest("batch", o, c));
  return 0;
}

int cmd_sweep(const Options& o, const SimConfig& c, const CurveCatalog& catalog) {
  const SweepAxis axis = parse_axis(o.axis);
  const auto points = make_sweep_points(c, axis, split_sweep_values(axis, o.values), catalog);
  ArtifactDir dir(output_dir(o, c));
  std::size_t index = 0;
  const auto rows = run_sweep(points, [&](const SweepRow& row) {
    const std::string sub = std::string(to_string(axis)) + "_" + std::to_string(index++);
    fs::create_directories(dir / sub);
    write_batch_files(dir, row.batch, sub + "/");
    std::printf("%s = %s: %zu social / %zu selfish takeovers\n", std::string(to_string(axis)).c_str(), row.label.c_str(),
                row.batch.stats.social.count, row.batch.stats.selfish.count);
    std::fflush(stdout);
  });
  dir.write("sweep.csv", sweep_csv(axis, rows));
  auto m = manifest("sweep", o, c);
  m["axis"] = to_string(axis);
  m["values"] = split_sweep_values(axis, o.values);
  finish_dir(dir, std::move(m));
  return 0;
}

int cmd_optimum(const Options& o, SimConfig c) {
  Rng rng(c.seed);
  const CapacityProfile capacity = CapacityProfile::uniform(c.population);
  const auto counts = curve_counts(c.curves, c.population);
  double sum = 0.0;
  std::vector<Requests> requests;
  for (std::size_t s = 0; s < o.samples; ++s) {
    requests.clear();
    for (std::size_t k = 0; k < counts.size(); ++k)
      for (std::size_t i = 0; i < counts[k]; ++i) requests.push_back(sample_requests(c.curves[k].curve, rng));
    sum += theoretical_optimum(std::span<const Requests>(requests), capacity);
  }
  std::printf("curves: %s  population: %zu  samples: %zu\n", curve_spec_string(c.curves).c_str(), c.population, o.samples);
  std::printf("mean optimum: %.4f\n", o.samples ? sum / static_cast<double>(o.samples) : 0.0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralised time-slot exchange simulator with social capital"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Parse and validate a config, then exit");
  add_common(validate, o, false);
  auto* run = app.add_subcommand("run", "Run one simulation");
  add_common(run, o);
  auto* batch = app.add_subcommand("batch", "Run a seeded batch of simulations");
  add_common(batch, o);
  auto* sweep = app.add_subcommand("sweep", "Run one batch per value of a parameter");
  add_common(sweep, o);
  sweep->add_option("--axis", o.axis, "population, beta or curve_mix")->required();
  sweep->add_option("--values", o.values, "Comma-separated values (';'-separated curve specs for curve_mix)")->required();
  auto* optimum = app.add_subcommand("optimum", "Mean theoretical optimum over sampled request draws");
  add_common(optimum, o, false);
  optimum->add_option("--curve", o.curve, "Single curve id (same as --curves ID:1)");
  optimum->add_option("--samples", o.samples, "Number of sampled days");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  CurveCatalog catalog;
  SimConfig config;
  try {
    if (o.curve) {
      if (o.overrides.curves) throw ConfigError("curve", "use either --curve or --curves");
      o.overrides.curves = *o.curve + ":1";
    }
    config = load(o, catalog);
    if (sweep->parsed()) make_sweep_points(config, parse_axis(o.axis), split_sweep_values(parse_axis(o.axis), o.values), catalog);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    if (validate->parsed()) {
      std::printf("config OK\n%s\n", config_json(config).dump(2).c_str());
      return 0;
    }
    if (run->parsed()) return cmd_run(o, config);
    if (batch->parsed()) return cmd_batch(o, config);
    if (sweep->parsed()) return cmd_sweep(o, config, catalog);
    if (optimum->parsed()) return cmd_optimum(o, config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
