#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace cascade {

/// Marker written wherever a quantity is mathematically undefined.
inline constexpr std::string_view kUndefined = "undefined";

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), res.ptr);
}

inline std::string format_optional(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string(kUndefined);
}

/// Parses a decimal number or a simple fraction such as "1/6".
inline double parse_number(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto parse_plain = [](std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != end) {
      throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double num = parse_plain(trim(text.substr(0, slash)));
    const double den = parse_plain(trim(text.substr(slash + 1)));
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_plain(text);
}

}  // namespace cascade
