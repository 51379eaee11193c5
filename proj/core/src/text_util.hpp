#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "iriscs/error.hpp"

namespace iriscs::text {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorCode::InvalidConfig, key + ": not a number: '" + text + "'");
  return v;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& text) {
  if (text.empty() || text.size() > 20 ||
      !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw Error(ErrorCode::InvalidConfig, key + ": not a non-negative integer: '" + text + "'");
  }
  return std::stoull(text);
}

inline int parse_int(const std::string& key, const std::string& text) {
  const bool negative = !text.empty() && text[0] == '-';
  const auto magnitude = parse_count(key, negative ? text.substr(1) : text);
  if (magnitude > 1'000'000'000ull) throw Error(ErrorCode::InvalidConfig, key + ": out of range");
  return negative ? -static_cast<int>(magnitude) : static_cast<int>(magnitude);
}

}  // namespace iriscs::text
