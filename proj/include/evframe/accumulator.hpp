#pragma once

#include "evframe/core.hpp"
#include "evframe/slicer.hpp"

#include <optional>

namespace evframe {

/// Increment one event adds to its pixel: +c when rectified, p*c when signed.
constexpr double signed_contribution(const Event &event, PolarityMode mode, double contribution) {
  return (mode == PolarityMode::Rectified || event.p > 0) ? contribution : -contribution;
}

/// Adds the event's contribution to its pixel, clamped to [0, 1].
/// Throws OutOfBounds when the event lies outside the geometry.
void integrate_event(std::span<double> pixels, const SensorGeometry &geometry, const Event &event,
                     PolarityMode mode, double contribution);

/// Moves every pixel toward `neutral` over `dt` seconds. Step decay leaves
/// pixels untouched; it acts through reset_frame at slice boundaries.
void apply_decay(std::span<double> pixels, double dt, const Decay &decay, double neutral);

/// A buffer with every pixel at the neutral value.
std::vector<double> reset_frame(const SensorGeometry &geometry, PolarityMode mode);

/// State carried from one published frame to the next.
struct AccumulatorCarry {
  std::optional<EventFrame> previous;
  /// Cross-slice integration buffer, used by linear and exponential decay.
  std::vector<double> persistent;
  Nanos decayed_to{0};
  /// Events older than this were already integrated (or skipped) by an earlier slice.
  std::optional<Nanos> integrated_before;
};

EventFrame accumulate_slice(const Slice &slice, const AccumulatorConfig &config, const FrameSpec &spec,
                            AccumulatorCarry &carry);

/// Republishes the previous frame unchanged at a new stamp (no-motion hold).
/// Without a previous frame a neutral frame is returned. Either way held=true.
EventFrame hold_previous(AccumulatorCarry &carry, const AccumulatorConfig &config, const FrameSpec &spec,
                         Nanos publish_stamp);

/// Owns the carry for one stream. Slices must arrive in publish order.
class Accumulator {
public:
  Accumulator(AccumulatorConfig config, FrameSpec spec);

  /// Accumulates the slice, or holds the previous frame when the slice's
  /// interval saw fewer events than the no-motion threshold.
  EventFrame process(const Slice &slice);

  EventFrame accumulate(const Slice &slice) { return accumulate_slice(slice, config_, spec_, carry_); }
  EventFrame hold(Nanos publish_stamp) { return hold_previous(carry_, config_, spec_, publish_stamp); }

  const AccumulatorConfig &config() const { return config_; }
  const FrameSpec &spec() const { return spec_; }
  const AccumulatorCarry &carry() const { return carry_; }

private:
  AccumulatorConfig config_;
  FrameSpec spec_;
  AccumulatorCarry carry_;
};

} // namespace evframe
