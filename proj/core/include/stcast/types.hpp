#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace stcast {

/// Thrown when inputs violate a documented contract (bad data, bad config,
/// dimension mismatch, numerical divergence).
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// District name. Unique within a dataset.
using RegionId = std::string;

/// A calendar month. Parsed from / formatted as strict `YYYY-MM`.
struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  static YearMonth parse(const std::string& text);
  std::string str() const;

  /// Categorical id in [0, 11] (January = 0).
  int month_id() const { return month - 1; }

  YearMonth plus(int months) const;
  /// Signed number of months from *this to other.
  int months_until(const YearMonth& other) const {
    return (other.year - year) * 12 + (other.month - month);
  }

  auto operator<=>(const YearMonth&) const = default;
};

/// Per-month weather record for one region.
struct ClimateVector {
  double tmax = 0;    // maximum temperature, degC
  double tmin = 0;    // minimum temperature, degC
  double tmean = 0;   // mean temperature, degC
  double precip = 0;  // precipitation, mm

  double operator[](int i) const {
    switch (i) {
      case 0: return tmax;
      case 1: return tmin;
      case 2: return tmean;
      default: return precip;
    }
  }
};

}  // namespace stcast
