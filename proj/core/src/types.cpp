#include "stcast/types.hpp"

#include <cctype>
#include <cstdio>

namespace stcast {

YearMonth YearMonth::parse(const std::string& text) {
  // Strict YYYY-MM: four digits, dash, two digits.
  auto bad = [&]() -> ValidationError {
    return ValidationError("bad month '" + text + "', expected YYYY-MM");
  };
  if (text.size() != 7 || text[4] != '-') throw bad();
  for (int i : {0, 1, 2, 3, 5, 6}) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw bad();
  }
  const int year = (text[0] - '0') * 1000 + (text[1] - '0') * 100 +
                   (text[2] - '0') * 10 + (text[3] - '0');
  const int month = (text[5] - '0') * 10 + (text[6] - '0');
  if (month < 1 || month > 12) throw bad();
  return {year, month};
}

std::string YearMonth::str() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

YearMonth YearMonth::plus(int months) const {
  const int zero_based = year * 12 + (month - 1) + months;
  return {zero_based / 12, zero_based % 12 + 1};
}

}  // namespace stcast
