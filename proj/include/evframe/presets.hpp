#pragma once

#include "evframe/core.hpp"

#include <string_view>

namespace evframe {

/// Accumulator settings used for the Event Camera Dataset sequences (slice by
/// time and number, rectified polarity, step decay, 30 Hz publishing) plus a
/// "uav" preset for a 346x260 sensor with the no-motion hold enabled.
AccumulatorConfig preset(std::string_view name);

std::vector<std::string> preset_names();

} // namespace evframe
