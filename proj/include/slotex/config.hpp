#pragma once

// Declarative config files, flag-level overrides and sweep construction.
//
// Config grammar: `key = value` lines, `#` comments, and one `[curve <id>]`
// section per demand curve in the mix:
//
//   population = 96
//   beta = 1
//   seed = 42
//   curve_dir = ../data/curves      # relative to this file
//
//   [curve single_pensioner]
//   fraction = 0.5
//   [curve single_non_pensioner]
//   fraction = 0.5
//   path = ../data/curves/single_non_pensioner.csv   # optional
//
// Without curve sections the flat curve is used for everyone.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "demand.hpp"
#include "runner.hpp"

namespace slotex {

#ifndef SLOTEX_DEFAULT_CURVE_DIR
#define SLOTEX_DEFAULT_CURVE_DIR "data/curves"
#endif

// Looks curves up by id as <dir>/<id>.csv; "flat" falls back to the built-in
// uniform curve when no file exists.
struct CurveCatalog {
  std::filesystem::path dir = SLOTEX_DEFAULT_CURVE_DIR;

  CurveShare resolve(const std::string& id, double fraction, const std::optional<std::filesystem::path>& path = {}) const {
    const std::filesystem::path file = path ? *path : dir / (id + ".csv");
    if (std::filesystem::exists(file)) {
      try {
        DemandCurve c = load_demand_curve_file(file);
        return CurveShare{DemandCurve(id, c.raw_weights()), fraction, file.string()};
      } catch (const CurveError& e) {
        throw ConfigError("curve." + id, e.what());
      }
    }
    if (!path && id == "flat") return CurveShare{DemandCurve::flat(), fraction, "builtin"};
    throw ConfigError("curve." + id, "curve file not found: " + file.string());
  }
};

namespace config_detail {

inline std::string trim(const std::string& s) { return detail::trim(s); }

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

}  // namespace config_detail

// Applies one top-level `key = value` to the config; unknown keys throw.
inline void set_config_field(SimConfig& c, const std::string& key, const std::string& value) {
  using namespace config_detail;
  if (key == "population") c.population = parse_unsigned(key, value);
  else if (key == "beta") c.beta = parse_real(key, value);
  else if (key == "initial_social_fraction") c.initial_social_fraction = parse_real(key, value);
  else if (key == "tradeless_rounds_to_end_day") c.tradeless_rounds_to_end_day = parse_unsigned(key, value);
  else if (key == "tail_days") c.tail_days = parse_unsigned(key, value);
  else if (key == "max_days") c.max_days = parse_unsigned(key, value);
  else if (key == "max_rounds_per_day") c.max_rounds_per_day = parse_unsigned(key, value);
  else if (key == "seed") c.seed = parse_unsigned(key, value);
  else if (key == "runs") c.runs = parse_unsigned(key, value);
  else if (key == "threads") c.threads = parse_unsigned(key, value);
  else throw ConfigError(key, "unknown key");
}

// `id:fraction[,id:fraction...]`
inline std::vector<CurveShare> parse_curve_spec(const std::string& spec, const CurveCatalog& catalog) {
  std::vector<CurveShare> out;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) {
    item = config_detail::trim(item);
    const auto colon = item.find(':');
    if (item.empty() || colon == std::string::npos || colon == 0)
      throw ConfigError("curves", "expected id:fraction, got '" + item + "'");
    const std::string id = config_detail::trim(item.substr(0, colon));
    const double fraction = config_detail::parse_real("curves", config_detail::trim(item.substr(colon + 1)));
    out.push_back(catalog.resolve(id, fraction));
  }
  if (out.empty()) throw ConfigError("curves", "empty curve spec");
  return out;
}

inline std::string curve_spec_string(const std::vector<CurveShare>& curves) {
  std::string s;
  for (const CurveShare& c : curves) {
    if (!s.empty()) s += ',';
    std::ostringstream f;
    f << c.curve.id() << ':' << c.fraction;
    s += f.str();
  }
  return s;
}

// Parses config text. Relative paths are resolved against `base_dir`; the
// catalog's directory is replaced when the file sets curve_dir.
inline SimConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, CurveCatalog& catalog) {
  using namespace config_detail;
  SimConfig c;
  struct Section {
    std::string id;
    std::optional<double> fraction;
    std::optional<std::filesystem::path> path;
  };
  std::vector<Section> sections;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where, "malformed section header");
      std::istringstream hs(line.substr(1, line.size() - 2));
      std::string kind, id, extra;
      hs >> kind >> id >> extra;
      if (kind != "curve" || id.empty() || !extra.empty())
        throw ConfigError(where, "unknown section '" + line + "' (expected [curve <id>])");
      for (const Section& s : sections)
        if (s.id == id) throw ConfigError("curve." + id, "duplicate curve section");
      sections.push_back(Section{id, {}, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (sections.empty()) {
      if (key == "curve_dir") catalog.dir = base_dir / value;
      else set_config_field(c, key, value);
    } else {
      Section& s = sections.back();
      const std::string full = "curve." + s.id + "." + key;
      if (key == "fraction") s.fraction = parse_real(full, value);
      else if (key == "path") s.path = base_dir / value;
      else throw ConfigError(full, "unknown key");
    }
  }
  if (!sections.empty()) {
    c.curves.clear();
    for (const Section& s : sections) {
      if (!s.fraction) throw ConfigError("curve." + s.id + ".fraction", "missing");
      c.curves.push_back(catalog.resolve(s.id, *s.fraction, s.path));
    }
  }
  return c;
}

inline SimConfig load_config_file(const std::filesystem::path& path, CurveCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "config not found: " + path.string());
  return parse_config(in, path.parent_path(), catalog);
}

// Flag-level overrides, applied after the config file. `applied()` lists them
// for the manifest.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> population;
  std::optional<double> beta;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> threads;
  std::optional<std::string> curves;

  void apply(SimConfig& c, const CurveCatalog& catalog) const {
    if (seed) c.seed = *seed;
    if (population) c.population = *population;
    if (beta) c.beta = *beta;
    if (runs) c.runs = *runs;
    if (threads) c.threads = *threads;
    if (curves) c.curves = parse_curve_spec(*curves, catalog);
  }

  std::map<std::string, std::string> applied() const {
    std::map<std::string, std::string> m;
    if (seed) m["seed"] = std::to_string(*seed);
    if (population) m["population"] = std::to_string(*population);
    if (beta) {
      std::ostringstream s;
      s << *beta;
      m["beta"] = s.str();
    }
    if (runs) m["runs"] = std::to_string(*runs);
    if (threads) m["threads"] = std::to_string(*threads);
    if (curves) m["curves"] = *curves;
    return m;
  }
};

inline SweepAxis parse_axis(const std::string& s) {
  if (s == "population") return SweepAxis::Population;
  if (s == "beta") return SweepAxis::Beta;
  if (s == "curve_mix") return SweepAxis::CurveMix;
  throw ConfigError("axis", "unknown axis '" + s + "' (expected population, beta or curve_mix)");
}

// Values are comma-separated for population and beta. For curve_mix each value
// is a curve spec and values are separated by ';'.
inline std::vector<std::string> split_sweep_values(SweepAxis axis, const std::string& values) {
  std::vector<std::string> out;
  std::stringstream ss(values);
  const char sep = axis == SweepAxis::CurveMix ? ';' : ',';
  for (std::string v; std::getline(ss, v, sep);) {
    v = config_detail::trim(v);
    if (!v.empty()) out.push_back(v);
  }
  return out;
}

// Every value is parsed and validated here, before any run starts.
inline std::vector<SweepPoint> make_sweep_points(const SimConfig& base, SweepAxis axis, const std::vector<std::string>& values,
                                                 const CurveCatalog& catalog) {
  if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
  std::vector<SweepPoint> points;
  for (const std::string& v : values) {
    SimConfig c = base;
    switch (axis) {
      case SweepAxis::Population: c.population = config_detail::parse_unsigned("values", v); break;
      case SweepAxis::Beta: c.beta = config_detail::parse_real("values", v); break;
      case SweepAxis::CurveMix: c.curves = parse_curve_spec(v, catalog); break;
    }
    try {
      c.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("values", "invalid sweep value '" + v + "': " + e.what());
    }
    points.push_back(SweepPoint{v, std::move(c)});
  }
  return points;
}

}  // namespace slotex
