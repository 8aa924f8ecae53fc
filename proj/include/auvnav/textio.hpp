#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace auvnav {

/// Shortest round-trip decimal form, locale-independent.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::invalid_argument("bad number: " + std::string(text));
  }
  return v;
}

inline long parse_long(std::string_view text) {
  long v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::invalid_argument("bad integer: " + std::string(text));
  }
  return v;
}

}  // namespace auvnav
