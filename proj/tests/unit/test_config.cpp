#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "slotex/config.hpp"

using namespace slotex;

namespace {

SimConfig parse(const std::string& text, CurveCatalog& catalog) {
  std::istringstream in(text);
  return parse_config(in, SLOTEX_DEFAULT_CURVE_DIR, catalog);
}

std::string error_key(const std::string& text) {
  CurveCatalog catalog;
  try {
    parse(text, catalog).validate();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST(Config, Defaults) {
  const SimConfig c;
  EXPECT_EQ(c.population, 96u);
  EXPECT_DOUBLE_EQ(c.beta, 1.0);
  EXPECT_DOUBLE_EQ(c.initial_social_fraction, 0.5);
  EXPECT_EQ(c.tradeless_rounds_to_end_day, 10u);
  EXPECT_EQ(c.tail_days, 100u);
  EXPECT_EQ(c.runs, 100u);
  ASSERT_EQ(c.curves.size(), 1u);
  EXPECT_EQ(c.curves[0].curve.id(), "flat");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesKeysAndCurveSections) {
  CurveCatalog catalog;
  const SimConfig c = parse(
      "# comment\npopulation = 48\nbeta = 2.5  # trailing\nseed = 9\n"
      "[curve single_pensioner]\nfraction = 0.25\n[curve single_non_pensioner]\nfraction = 0.75\n",
      catalog);
  EXPECT_EQ(c.population, 48u);
  EXPECT_DOUBLE_EQ(c.beta, 2.5);
  EXPECT_EQ(c.seed, 9u);
  ASSERT_EQ(c.curves.size(), 2u);
  EXPECT_EQ(c.curves[1].curve.id(), "single_non_pensioner");
  EXPECT_DOUBLE_EQ(c.curves[1].fraction, 0.75);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(error_key("beta = 0\n"), "beta");
  EXPECT_EQ(error_key("beta = -1\n"), "beta");
  EXPECT_EQ(error_key("population = 0\n"), "population");
  EXPECT_EQ(error_key("population = many\n"), "population");
  EXPECT_EQ(error_key("colour = red\n"), "colour");
  EXPECT_EQ(error_key("initial_social_fraction = 1.5\n"), "initial_social_fraction");
  EXPECT_EQ(error_key("[curve flat]\nfraction = 0.6\n"), "curves");
  EXPECT_EQ(error_key("[curve nosuchcurve]\nfraction = 1\n"), "curve.nosuchcurve");
  EXPECT_EQ(error_key("[curve flat]\n"), "curve.flat.fraction");
  EXPECT_EQ(error_key("[curve flat]\nweight = 1\n"), "curve.flat.weight");
}

TEST(Config, MissingFile) {
  CurveCatalog catalog;
  try {
    load_config_file("/nonexistent/slotex.cfg", catalog);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "config");
    EXPECT_NE(std::string(e.what()).find("config not found"), std::string::npos);
  }
}

TEST(Config, ShippedConfigsValidate) {
  const std::filesystem::path dir = std::filesystem::path(SLOTEX_DEFAULT_CURVE_DIR).parent_path().parent_path() / "configs";
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    CurveCatalog catalog;
    EXPECT_NO_THROW(load_config_file(entry.path(), catalog).validate()) << entry.path();
    ++n;
  }
  EXPECT_GT(n, 0u);
}

TEST(Overrides, ApplyAfterFile) {
  CurveCatalog catalog;
  SimConfig c = parse("population = 48\nbeta = 2\n", catalog);
  ConfigOverrides o;
  o.beta = 3.0;
  o.curves = "flat:0.5,switchable:0.5";
  o.apply(c, catalog);
  EXPECT_EQ(c.population, 48u);
  EXPECT_DOUBLE_EQ(c.beta, 3.0);
  ASSERT_EQ(c.curves.size(), 2u);
  EXPECT_EQ(o.applied().at("curves"), "flat:0.5,switchable:0.5");
}

TEST(CurveSpec, ParseAndPrint) {
  CurveCatalog catalog;
  const auto shares = parse_curve_spec("switchable:0.5, single_pensioner:0.5", catalog);
  EXPECT_EQ(curve_spec_string(shares), "switchable:0.5,single_pensioner:0.5");
  EXPECT_THROW(parse_curve_spec("switchable", catalog), ConfigError);
  EXPECT_THROW(parse_curve_spec("switchable:x", catalog), ConfigError);
}

TEST(Sweep, AxisAndValues) {
  EXPECT_EQ(parse_axis("beta"), SweepAxis::Beta);
  EXPECT_THROW(parse_axis("gamma"), ConfigError);
  EXPECT_EQ(split_sweep_values(SweepAxis::Population, "24, 48,96"), (std::vector<std::string>{"24", "48", "96"}));
  EXPECT_EQ(split_sweep_values(SweepAxis::CurveMix, "flat:1;switchable:0.5,flat:0.5"),
            (std::vector<std::string>{"flat:1", "switchable:0.5,flat:0.5"}));
}
