#ifndef DYNER_CSV_HPP
#define DYNER_CSV_HPP

#include <charconv>
#include <cmath>
#include <string>

namespace dyner {

/// Shortest round-trip decimal form of `x`; "nan", "inf" and "-inf" for
/// non-finite values.  Independent of locale and stream state.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, result.ptr);
}

}  // namespace dyner

#endif  // DYNER_CSV_HPP
