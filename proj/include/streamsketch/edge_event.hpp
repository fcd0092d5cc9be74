#pragma once

#include <cstdint>

#include "streamsketch/hashing.hpp"

namespace streamsketch {

/// One timestamped, weighted directed edge. Ticks are >= 1 and non-decreasing
/// along a stream.
struct EdgeEvent {
    Key source = 0;
    Key dest = 0;
    double weight = 1.0;
    std::int64_t tick = 1;
};

}  // namespace streamsketch
