#include "evframe/scenarios.hpp"

namespace evframe::scenarios {

SpeedInvarianceSetup speed_invariance() {
  return SpeedInvarianceSetup{
      .scene = SyntheticScene::step_edge(kGeometry, 0.6, 8),
      .sensor = {0.2, 0.0, 1},
      .speeds = {60.0, 120.0},
      .duration = 1.0,
      .time_step = 1e-3,
      .interval = 1.0 / 30.0,
      // three columns of a 32-row edge, three events each
      .window_size = 288,
      .contribution = 0.2,
      .polarity_mode = PolarityMode::Rectified,
  };
}

ReversalSetup polarity_reversal() {
  return ReversalSetup{
      .scene = SyntheticScene::step_edge(kGeometry, 0.6, 30),
      .sensor = {0.2, 0.0, 1},
      .speed = 60.0,
      .half_duration = 0.5,
      .time_step = 1e-3,
      .interval = 1.0 / 30.0,
      .window_size = 500,
      .contribution = 0.2,
  };
}

EventStream bars_stream() {
  const auto scene = SyntheticScene::bars(kGeometry, 1.0, 16, 5);
  return generate_events(scene, MotionProfile::constant(30.0, 0.0, 1.0), SensorModel{0.1, 0.0, 1}, 1e-3);
}

std::vector<std::size_t> window_sizes(const SensorGeometry &geometry) {
  constexpr double reference_area = 240.0 * 180.0;
  std::vector<std::size_t> sizes;
  for (double n : {2000.0, 10000.0, 30000.0})
    sizes.push_back(window_size_for(n / reference_area, geometry));
  return sizes;
}

MotionThenStill motion_then_still(double noise_rate, std::uint64_t seed) {
  MotionThenStill out;
  out.motion_seconds = 0.5;
  out.still_seconds = 0.5;
  const auto scene = SyntheticScene::step_edge(kGeometry, 0.6, 8);
  const auto motion = MotionProfile::constant(120.0, 0.0, out.motion_seconds).then(0.0, 0.0, out.still_seconds);
  out.events = generate_events(scene, motion, SensorModel{0.2, noise_rate, seed}, 1e-3);
  return out;
}

} // namespace evframe::scenarios
