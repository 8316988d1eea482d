#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace qwnn {

// Shortest decimal text that round-trips to the same double. Integral values
// keep a trailing ".0" so CSV columns read unambiguously as reals.
inline std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace qwnn
