#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qretail {

/// Flat real-valued feature vector presented to the Q-network.
using StateVector = std::vector<double>;

/// Result of one environment transition.
struct StepResult {
  StateVector state;
  double reward = 0.0;
  bool done = false;
};

/// Invalid configuration (layer sizes, run files, environment parameters).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation precondition was violated by the caller.
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values surfaced during training.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external data (CSV rows, model files).
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// Scientific form with 17 significant digits; exact round-trip.
inline std::string format_double_full(double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double value{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw data_error("not a number: '" + std::string(text) + "'");
  }
  return value;
}

inline std::int64_t parse_int(std::string_view text) {
  std::int64_t value{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw data_error("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

inline std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t value{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw data_error("not an unsigned integer: '" + std::string(text) + "'");
  }
  return value;
}

inline std::string trim(std::string_view text) {
  const char* ws = " \t\r\n";
  auto begin = text.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(ws);
  return std::string(text.substr(begin, end - begin + 1));
}

inline std::vector<std::string> split_fields(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

/// One `key value...` line per entry; used by model files.
using KvDocument = std::map<std::string, std::string>;

inline KvDocument read_kv_document(std::istream& in) {
  KvDocument doc;
  std::string line;
  while (std::getline(in, line)) {
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto space = stripped.find_first_of(" \t");
    std::string key = stripped.substr(0, space);
    std::string value =
        space == std::string::npos ? "" : trim(stripped.substr(space + 1));
    if (!doc.emplace(key, value).second) {
      throw data_error("duplicate key '" + key + "' in document");
    }
  }
  return doc;
}

inline const std::string& kv_require(const KvDocument& doc,
                                     const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw data_error("missing key '" + key + "'");
  return it->second;
}

}  // namespace qretail
