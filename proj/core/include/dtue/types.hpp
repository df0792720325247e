#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtue {

// All clocks are integer seconds since midnight. Integer time removes tie
// ambiguity in event ordering and keeps regression values exact.
using Sec = std::int64_t;

// Generalized costs are integers whenever weights and times are integers.
using Cost = std::int64_t;

using Count = std::int64_t;

using StationIdx = std::int32_t;
using LineIdx = std::int32_t;
using RunIdx = std::int32_t;
using OdIdx = std::int32_t;
using RouteIdx = std::int32_t;  // global route index across all ODs
using OptionIdx = std::int32_t; // option position within a route's option list

inline constexpr std::int32_t kInvalidIdx = -1;

// Bad user input: malformed files, inconsistent schedules, unknown ids.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariant; indicates a bug, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// Average cost of an option kept as an exact ratio total/count so that
// minima and regression values never suffer float drift.
struct OptionCost {
  Cost total = 0;
  Count count = 1;

  long double value() const {
    return static_cast<long double>(total) / static_cast<long double>(count);
  }
};

inline bool cost_less(const OptionCost& a, const OptionCost& b) {
  return static_cast<__int128>(a.total) * b.count <
         static_cast<__int128>(b.total) * a.count;
}

inline bool cost_equal(const OptionCost& a, const OptionCost& b) {
  return static_cast<__int128>(a.total) * b.count ==
         static_cast<__int128>(b.total) * a.count;
}

} // namespace dtue
