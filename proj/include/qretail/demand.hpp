#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qretail/common.hpp"

namespace qretail {

/// One day of the demand series. weekday is 0=Monday .. 6=Sunday.
struct DemandDay {
  std::int64_t day_index = 0;
  double demand = 0.0;
  bool promo = false;
  int weekday = 0;

  friend bool operator==(const DemandDay&, const DemandDay&) = default;
};

struct DemandSeries {
  std::vector<DemandDay> days;

  std::size_t size() const { return days.size(); }
  bool empty() const { return days.empty(); }

  friend bool operator==(const DemandSeries&, const DemandSeries&) = default;
};

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

/// 0=Monday .. 6=Sunday for an ISO-8601 `YYYY-MM-DD` date.
inline int weekday_of_date(const std::string& text, const std::string& where) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw data_error(where + ": date '" + text + "' is not YYYY-MM-DD");
  }
  int y = 0, m = 0, d = 0;
  try {
    y = static_cast<int>(parse_int(text.substr(0, 4)));
    m = static_cast<int>(parse_int(text.substr(5, 2)));
    d = static_cast<int>(parse_int(text.substr(8, 2)));
  } catch (const data_error&) {
    throw data_error(where + ": date '" + text + "' is not YYYY-MM-DD");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{unsigned(m)},
                                        std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) {
    throw data_error(where + ": '" + text + "' is not a valid calendar date");
  }
  const std::chrono::weekday wd{std::chrono::sys_days{ymd}};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

}  // namespace detail

/// Reads the declared CSV schema: header with `date` (ISO) or `day_index`,
/// `demand`, `promo`, optional `weekday` (used only without a date column).
/// Days must be consecutive; every schema violation names its line.
inline DemandSeries load_demand_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw data_error(name + ": empty file");
  std::vector<std::string> header = detail::split_csv_row(line);

  auto column = [&](const std::string& key) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == key) return i;
    }
    return std::nullopt;
  };
  const auto date_col = column("date");
  const auto index_col = column("day_index");
  const auto demand_col = column("demand");
  const auto promo_col = column("promo");
  const auto weekday_col = column("weekday");

  if (!date_col && !index_col) {
    throw data_error(name + ": header needs a 'date' or 'day_index' column");
  }
  if (!demand_col) throw data_error(name + ": header needs a 'demand' column");
  if (!promo_col) throw data_error(name + ": header needs a 'promo' column");

  DemandSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = name + " line " + std::to_string(line_no);
    std::vector<std::string> cells = detail::split_csv_row(line);
    if (cells.size() != header.size()) {
      throw data_error(where + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(cells.size()));
    }

    DemandDay day;
    try {
      day.demand = parse_double(cells[*demand_col]);
    } catch (const data_error&) {
      throw data_error(where + ": demand '" + cells[*demand_col] +
                       "' is not a number");
    }
    if (!std::isfinite(day.demand) || day.demand < 0.0) {
      throw data_error(where + ": demand must be finite and non-negative (got " +
                       cells[*demand_col] + ")");
    }

    const std::string& promo_text = cells[*promo_col];
    if (promo_text == "0") {
      day.promo = false;
    } else if (promo_text == "1") {
      day.promo = true;
    } else {
      throw data_error(where + ": promo must be 0 or 1 (got '" + promo_text + "')");
    }

    if (date_col) {
      day.weekday = detail::weekday_of_date(cells[*date_col], where);
      day.day_index = static_cast<std::int64_t>(series.size());
      if (!series.empty()) {
        const int expected = (series.days.back().weekday + 1) % 7;
        if (day.weekday != expected) {
          throw data_error(where + ": dates must be consecutive days");
        }
      }
    } else {
      try {
        day.day_index = parse_int(cells[*index_col]);
      } catch (const data_error&) {
        throw data_error(where + ": day_index '" + cells[*index_col] +
                         "' is not an integer");
      }
      if (day.day_index < 0) {
        throw data_error(where + ": day_index must be non-negative");
      }
      if (!series.empty() &&
          day.day_index != series.days.back().day_index + 1) {
        throw data_error(where + ": day_index must increase by 1 per row");
      }
      if (weekday_col) {
        const std::int64_t wd = parse_int(cells[*weekday_col]);
        if (wd < 0 || wd > 6) {
          throw data_error(where + ": weekday must be in 0..6");
        }
        day.weekday = static_cast<int>(wd);
      } else {
        day.weekday = static_cast<int>(day.day_index % 7);
      }
      if (!series.empty()) {
        const int expected = (series.days.back().weekday + 1) % 7;
        if (day.weekday != expected) {
          throw data_error(where + ": weekday must cycle with the day index");
        }
      }
    }

    series.days.push_back(day);
  }
  return series;
}

inline DemandSeries load_demand_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  return load_demand_csv(in, path);
}

inline void save_demand_csv(std::ostream& out, const DemandSeries& series) {
  out << "day_index,demand,promo,weekday\n";
  for (const DemandDay& day : series.days) {
    out << day.day_index << ',' << format_double(day.demand) << ','
        << (day.promo ? 1 : 0) << ',' << day.weekday << '\n';
  }
}

inline void save_demand_csv(const std::string& path, const DemandSeries& series) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  save_demand_csv(out, series);
}

/// Max-scales demand so the series maximum becomes exactly 1. An all-zero
/// series stays all-zero.
inline DemandSeries normalize(DemandSeries series) {
  double max_demand = 0.0;
  for (const DemandDay& day : series.days) {
    max_demand = std::max(max_demand, day.demand);
  }
  if (max_demand > 0.0) {
    for (DemandDay& day : series.days) day.demand /= max_demand;
  }
  return series;
}

/// Weekly-seasonal synthetic generator standing in for a historical series.
struct SynthConfig {
  // Monday..Sunday multipliers; Saturday peaks, Sunday nearly closes.
  std::array<double, 7> weekday_profile{1.0, 0.95, 0.9, 0.95, 1.05, 1.3, 0.4};
  double promo_uplift = 1.5;
  double noise_sigma = 0.15;
  double promo_start_prob = 0.08;
  int promo_len_min = 2;
  int promo_len_max = 5;
};

inline DemandSeries synth_generate(std::uint64_t seed, std::size_t n_days,
                                   const SynthConfig& config = {}) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> promo_len(config.promo_len_min,
                                               config.promo_len_max);
  std::normal_distribution<double> log_noise(0.0, config.noise_sigma);

  DemandSeries series;
  series.days.reserve(n_days);
  int promo_left = 0;
  for (std::size_t i = 0; i < n_days; ++i) {
    DemandDay day;
    day.day_index = static_cast<std::int64_t>(i);
    day.weekday = static_cast<int>(i % 7);
    if (promo_left == 0 && coin(rng) < config.promo_start_prob) {
      promo_left = promo_len(rng);
    }
    day.promo = promo_left > 0;
    if (promo_left > 0) --promo_left;

    double demand = config.weekday_profile[static_cast<std::size_t>(day.weekday)];
    if (day.promo) demand *= config.promo_uplift;
    demand *= std::exp(log_noise(rng));
    day.demand = std::max(0.0, demand);
    series.days.push_back(day);
  }
  return normalize(std::move(series));
}

}  // namespace qretail
