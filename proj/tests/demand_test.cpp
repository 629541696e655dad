#include "qretail/demand.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace qretail;

namespace {

DemandSeries load_text(const std::string& text) {
  std::istringstream in(text);
  return load_demand_csv(in, "test.csv");
}

std::string error_of(const std::string& text) {
  try {
    load_text(text);
  } catch (const data_error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LoadCsv, ThreeRowsPreserveOrder) {
  const DemandSeries series = load_text(
      "day_index,demand,promo\n"
      "0,2.5,0\n"
      "1,3.5,1\n"
      "2,0.5,0\n");
  ASSERT_EQ(series.size(), 3u);
  EXPECT_DOUBLE_EQ(series.days[0].demand, 2.5);
  EXPECT_DOUBLE_EQ(series.days[1].demand, 3.5);
  EXPECT_TRUE(series.days[1].promo);
  EXPECT_EQ(series.days[2].day_index, 2);
  EXPECT_EQ(series.days[1].weekday, 1);  // derived from the day index
}

TEST(LoadCsv, NegativeDemandNamesLine) {
  const std::string message = error_of(
      "day_index,demand,promo\n"
      "0,1.0,0\n"
      "1,-1,0\n");
  EXPECT_NE(message.find("line 3"), std::string::npos) << message;
  EXPECT_NE(message.find("demand"), std::string::npos) << message;
}

TEST(LoadCsv, FourteenConsecutiveDatesCycleWeekdays) {
  // 2015-06-01 is a Monday.
  std::ostringstream text;
  text << "date,demand,promo\n";
  for (int d = 1; d <= 14; ++d) {
    text << "2015-06-" << (d < 10 ? "0" : "") << d << ",1.0,0\n";
  }
  const DemandSeries series = load_text(text.str());
  ASSERT_EQ(series.size(), 14u);
  for (int i = 0; i < 14; ++i) {
    EXPECT_EQ(series.days[static_cast<std::size_t>(i)].weekday, i % 7);
  }
}

TEST(LoadCsv, MissingColumnsRejected) {
  EXPECT_NE(error_of("demand,promo\n1.0,0\n").find("day_index"),
            std::string::npos);
  EXPECT_NE(error_of("day_index,promo\n0,0\n").find("demand"),
            std::string::npos);
  EXPECT_NE(error_of("day_index,demand\n0,1.0\n").find("promo"),
            std::string::npos);
}

TEST(LoadCsv, MalformedRowsNameTheirLine) {
  EXPECT_NE(error_of("day_index,demand,promo\n0,abc,0\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(error_of("day_index,demand,promo\n0,1.0,2\n").find("promo"),
            std::string::npos);
  EXPECT_NE(error_of("day_index,demand,promo\n0,1.0\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(error_of("date,demand,promo\n2015-13-01,1.0,0\n").find("line 2"),
            std::string::npos);
}

TEST(LoadCsv, NonConsecutiveDaysRejected) {
  EXPECT_NE(
      error_of("day_index,demand,promo\n0,1.0,0\n2,1.0,0\n").find("line 3"),
      std::string::npos);
  EXPECT_NE(error_of("date,demand,promo\n2015-06-01,1.0,0\n2015-06-03,1.0,0\n")
                .find("consecutive"),
            std::string::npos);
}

TEST(LoadCsv, WeekdayColumnUsedWithoutDate) {
  const DemandSeries series = load_text(
      "day_index,demand,promo,weekday\n"
      "0,1.0,0,3\n"
      "1,1.0,0,4\n");
  EXPECT_EQ(series.days[0].weekday, 3);
  EXPECT_EQ(series.days[1].weekday, 4);
}

TEST(LoadCsv, WeekdayMustCycle) {
  EXPECT_NE(error_of("day_index,demand,promo,weekday\n0,1.0,0,3\n1,1.0,0,6\n")
                .find("cycle"),
            std::string::npos);
}

TEST(Normalize, MaxScaling) {
  DemandSeries series = load_text(
      "day_index,demand,promo\n0,2,0\n1,4,0\n2,8,0\n");
  series = normalize(series);
  EXPECT_DOUBLE_EQ(series.days[0].demand, 0.25);
  EXPECT_DOUBLE_EQ(series.days[1].demand, 0.5);
  EXPECT_DOUBLE_EQ(series.days[2].demand, 1.0);
}

TEST(Normalize, AllZeroSeriesStaysZero) {
  DemandSeries series = load_text(
      "day_index,demand,promo\n0,0,0\n1,0,0\n");
  series = normalize(series);
  EXPECT_DOUBLE_EQ(series.days[0].demand, 0.0);
  EXPECT_DOUBLE_EQ(series.days[1].demand, 0.0);
}

TEST(Normalize, Idempotent) {
  const DemandSeries series = synth_generate(5, 100);
  EXPECT_EQ(normalize(series), series);
}

TEST(Normalize, PreservesMetadata) {
  DemandSeries series = load_text(
      "day_index,demand,promo\n0,2,1\n1,4,0\n");
  const DemandSeries scaled = normalize(series);
  ASSERT_EQ(scaled.size(), series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    EXPECT_EQ(scaled.days[i].promo, series.days[i].promo);
    EXPECT_EQ(scaled.days[i].weekday, series.days[i].weekday);
    EXPECT_EQ(scaled.days[i].day_index, series.days[i].day_index);
  }
}

TEST(SynthGenerate, EmptyAndDeterministic) {
  EXPECT_TRUE(synth_generate(1, 0).empty());
  EXPECT_EQ(synth_generate(7, 500), synth_generate(7, 500));
  EXPECT_NE(synth_generate(7, 500), synth_generate(8, 500));
}

TEST(SynthGenerate, SatisfiesSeriesInvariants) {
  const DemandSeries series = synth_generate(3, 1050);
  ASSERT_EQ(series.size(), 1050u);
  double max_demand = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const DemandDay& day = series.days[i];
    EXPECT_GE(day.demand, 0.0);
    EXPECT_EQ(day.day_index, static_cast<std::int64_t>(i));
    EXPECT_EQ(day.weekday, static_cast<int>(i % 7));
    max_demand = std::max(max_demand, day.demand);
  }
  EXPECT_DOUBLE_EQ(max_demand, 1.0);
}

TEST(SynthGenerate, WeeklySeasonalityPresent) {
  const DemandSeries series = synth_generate(11, 1050);
  double peak_sum = 0.0, trough_sum = 0.0;
  std::size_t peak_n = 0, trough_n = 0;
  for (const DemandDay& day : series.days) {
    if (day.weekday == 5) {  // Saturday peak in the default profile
      peak_sum += day.demand;
      ++peak_n;
    } else if (day.weekday == 6) {  // Sunday trough
      trough_sum += day.demand;
      ++trough_n;
    }
  }
  EXPECT_GT(peak_sum / peak_n, trough_sum / trough_n);
}

TEST(SaveLoad, RoundTripsExactly) {
  const DemandSeries series = synth_generate(21, 300);
  std::ostringstream out;
  save_demand_csv(out, series);
  std::istringstream in(out.str());
  EXPECT_EQ(load_demand_csv(in, "round.csv"), series);
}
