#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "slotex/demand.hpp"

using namespace slotex;

namespace {

std::string curve_text(const std::array<double, 24>& w, int rows = 24) {
  std::ostringstream s;
  s << "hour,weight\n";
  for (int h = 0; h < rows; ++h) s << h << ',' << w[h] << '\n';
  return s.str();
}

std::array<double, 24> ones() {
  std::array<double, 24> w;
  w.fill(1.0);
  return w;
}

}  // namespace

TEST(CurveLoad, ParsesValidFile) {
  auto w = ones();
  w[5] = 3.5;
  std::istringstream in(curve_text(w));
  const DemandCurve c = load_demand_curve(in, "x");
  EXPECT_EQ(c.id(), "x");
  EXPECT_DOUBLE_EQ(c.raw_weights()[5], 3.5);
  EXPECT_NEAR(c.probabilities()[5], 3.5 / 26.5, 1e-15);
}

TEST(CurveLoad, RejectsShortFile) {
  std::istringstream in(curve_text(ones(), 23));
  try {
    load_demand_curve(in, "short");
    FAIL();
  } catch (const CurveError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 24 hours, got 23 rows"), std::string::npos);
  }
}

TEST(CurveLoad, RejectsNegativeWeight) {
  auto w = ones();
  w[3] = -1;
  std::istringstream in(curve_text(w));
  EXPECT_THROW(load_demand_curve(in, "neg"), CurveError);
}

TEST(CurveLoad, RejectsAllZero) {
  std::array<double, 24> w{};
  std::istringstream in(curve_text(w));
  EXPECT_THROW(load_demand_curve(in, "zero"), CurveError);
}

TEST(CurveLoad, RejectsDuplicateHourAndBadHeader) {
  std::string text = curve_text(ones());
  text.replace(text.find("\n1,"), 3, "\n0,");
  std::istringstream dup(text);
  EXPECT_THROW(load_demand_curve(dup, "dup"), CurveError);
  std::istringstream bad("h,w\n0,1\n");
  EXPECT_THROW(load_demand_curve(bad, "bad"), CurveError);
}

TEST(CurveLoad, ShippedCurvesLoad) {
  for (const char* id : {"flat", "switchable", "single_pensioner", "single_non_pensioner"}) {
    const DemandCurve c = load_demand_curve_file(std::string(SLOTEX_DEFAULT_CURVE_DIR) + "/" + id + ".csv");
    EXPECT_EQ(c.id(), id);
    EXPECT_GE(c.positive_hours(), 4);
  }
}

TEST(SampleRequests, FlatFrequencies) {
  Rng rng(11);
  const DemandCurve flat = DemandCurve::flat();
  std::array<int, 24> count{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Requests r = sample_requests(flat, rng);
    std::set<int> distinct;
    for (Hour h : r) {
      ++count[h.index()];
      distinct.insert(h.index());
    }
    ASSERT_EQ(distinct.size(), 4u);
  }
  for (int h = 0; h < 24; ++h) EXPECT_NEAR(count[h] / double(n), 4.0 / 24.0, 0.01) << "hour " << h;
}

TEST(SampleRequests, ExactlyFourPositiveHours) {
  std::array<double, 24> w{};
  w[2] = 1;
  w[7] = 5;
  w[13] = 0.1;
  w[22] = 2;
  const DemandCurve c("four", w);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Requests r = sample_requests(c, rng);
    std::set<int> got;
    for (Hour h : r) got.insert(h.index());
    EXPECT_EQ(got, (std::set<int>{2, 7, 13, 22}));
  }
}

TEST(SampleRequests, ThreePositiveHoursThrows) {
  std::array<double, 24> w{};
  w[1] = w[2] = w[3] = 1;
  const DemandCurve c("three", w);
  Rng rng(3);
  EXPECT_THROW(sample_requests(c, rng), CurveError);
}

// Sequential draws without replacement: first-draw frequency equals the
// normalised weight.
TEST(SampleRequests, FirstDrawFollowsWeights) {
  std::array<double, 24> w{};
  for (int h = 0; h < 6; ++h) w[h] = h + 1;  // total 21
  const DemandCurve c("ramp", w);
  Rng rng(5);
  std::array<int, 24> first{};
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++first[sample_requests(c, rng)[0].index()];
  for (int h = 0; h < 6; ++h) EXPECT_NEAR(first[h] / double(n), (h + 1) / 21.0, 0.01);
}

TEST(Capacity, UniformExactAndRemainder) {
  const auto c96 = CapacityProfile::uniform(96);
  for (int h = 0; h < 24; ++h) EXPECT_EQ(c96.per_hour[h], 16);
  EXPECT_EQ(c96.total(), 384);

  const auto c10 = CapacityProfile::uniform(10);  // 40 tokens: 16 hours get 2, 8 get 1
  EXPECT_EQ(c10.total(), 40);
  for (int h = 0; h < 24; ++h) EXPECT_EQ(c10.per_hour[h], h < 16 ? 2 : 1);
}

TEST(Allocation, ConservesCapacityAndIsDeterministic) {
  const std::size_t n = 30;
  const auto cap = CapacityProfile::uniform(n);
  std::vector<Agent> a(n), b(n);
  Rng r1(99), r2(99);
  initial_allocation(a, cap, r1);
  initial_allocation(b, cap, r2);
  std::array<int, 24> per_hour{};
  std::set<std::uint32_t> ids;
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(a[i].held[k], b[i].held[k]);
      ++per_hour[a[i].held[k].hour.index()];
      ids.insert(a[i].held[k].id);
    }
  }
  EXPECT_EQ(per_hour, cap.per_hour);
  EXPECT_EQ(ids.size(), n * 4);
}

TEST(Allocation, MismatchedCapacityThrows) {
  std::vector<Agent> a(5);
  Rng rng(1);
  EXPECT_THROW(initial_allocation(a, CapacityProfile::uniform(6), rng), std::invalid_argument);
}

TEST(Allocation, UniformOverAgents) {
  const std::size_t n = 96;
  const auto cap = CapacityProfile::uniform(n);
  std::vector<Agent> a(n);
  Rng rng(2024);
  int hits = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    initial_allocation(a, cap, rng);
    if (a[0].holds_hour(Hour(0))) ++hits;
  }
  // P(agent holds at least one of 16 hour-0 tokens among 4 draws from 384)
  double miss = 1.0;
  for (int k = 0; k < 4; ++k) miss *= (368.0 - k) / (384.0 - k);
  EXPECT_NEAR(hits / double(trials), 1.0 - miss, 0.02);
}
