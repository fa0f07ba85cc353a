#pragma once

#include "evframe/eval.hpp"

namespace evframe::scenarios {

// Canonical synthetic setups shared by `evframe eval` and the acceptance
// suite. All use a 96x32 sensor so a full run takes well under a second.

inline constexpr SensorGeometry kGeometry{96, 32};

/// Step edge (H=0.6, C=0.2) swept at 60 and 120 px/s.
SpeedInvarianceSetup speed_invariance();

/// Step edge moving +x for 0.5 s, then -x for 0.5 s.
ReversalSetup polarity_reversal();

/// Bars of two sharpnesses (H=1.0, C=0.1) drifting at 30 px/s for 1 s.
EventStream bars_stream();

/// The 2000 / 10000 / 30000 event windows of a 240x180 sensor rescaled to
/// the same events per pixel on `geometry`.
std::vector<std::size_t> window_sizes(const SensorGeometry &geometry);

/// Step edge moving for `motion_seconds`, then a still phase of
/// `still_seconds` with only background noise.
struct MotionThenStill {
  EventStream events;
  double motion_seconds = 0.0;
  double still_seconds = 0.0;
};
MotionThenStill motion_then_still(double noise_rate = 0.5, std::uint64_t seed = 7);

} // namespace evframe::scenarios
