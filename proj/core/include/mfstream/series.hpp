#pragma once

#include <cstdint>
#include <vector>

#include "mfstream/date.hpp"

namespace mfstream {

/// A daily-sampled series over a contiguous day range. Count series keep
/// integer values exactly (doubles are exact up to 2^53); rate and
/// contribution series are dimensionless reals.
struct DailySeries {
    Day start_day;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    DayRange range() const {
        return {start_day, start_day + (static_cast<std::int64_t>(values.size()) - 1)};
    }

    friend bool operator==(const DailySeries&, const DailySeries&) = default;
};

}  // namespace mfstream
