#include "evframe/presets.hpp"

#include <array>

namespace evframe {

namespace {

struct PresetRow {
  std::string_view name;
  double contribution;
  std::size_t window_size;
  std::size_t no_motion_threshold;
};

constexpr std::array kPresets{
    PresetRow{"dynamic_6dof", 0.2, 10000, 0},
    PresetRow{"dynamic_translation", 0.33, 10000, 0},
    PresetRow{"shape_6dof", 0.2, 3000, 0},
    PresetRow{"shape_translation", 0.2, 3000, 0},
    PresetRow{"boxes_6dof", 0.2, 15000, 0},
    PresetRow{"boxes_translation", 0.2, 15000, 0},
    PresetRow{"poster_6dof", 0.2, 10000, 0},
    PresetRow{"poster_translation", 0.33, 10000, 0},
    PresetRow{"hdr_poster", 0.2, 10000, 0},
    PresetRow{"hdr_boxes", 0.2, 20000, 0},
    PresetRow{"uav", 0.5, 20000, 200},
};

} // namespace

AccumulatorConfig preset(std::string_view name) {
  for (const auto &row : kPresets) {
    if (row.name != name)
      continue;
    AccumulatorConfig config;
    config.slice_method = SliceMethod::ByTimeAndNumber;
    config.polarity_mode = PolarityMode::Rectified;
    config.decay = StepDecay{};
    config.interval = 1.0 / 30.0;
    config.contribution = row.contribution;
    config.window_size = row.window_size;
    config.no_motion_threshold = row.no_motion_threshold;
    return config;
  }
  std::string known;
  for (const auto &row : kPresets)
    known += (known.empty() ? "" : ", ") + std::string(row.name);
  throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(name) + "'; available: " + known);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto &row : kPresets)
    names.emplace_back(row.name);
  return names;
}

} // namespace evframe
