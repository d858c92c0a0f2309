#include "vr/alpha.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace vr {

Alpha Alpha::parse(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "inf" || s == "+inf" || s == "infinity" || s == "+infinity") return pos_inf();
  if (s == "-inf" || s == "-infinity") return neg_inf();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse alpha from '" + text + "'");
  }
  if (used != s.size() || std::isnan(v))
    throw std::invalid_argument("cannot parse alpha from '" + text + "'");
  return Alpha(v);
}

std::string Alpha::to_string() const {
  switch (kind()) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "inf";
    default: break;
  }
  // Shortest text that parses back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, res.ptr);
}

}  // namespace vr
