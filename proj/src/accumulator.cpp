#include "evframe/accumulator.hpp"

#include <algorithm>
#include <cmath>

namespace evframe {

void integrate_event(std::span<double> pixels, const SensorGeometry &geometry, const Event &event,
                     PolarityMode mode, double contribution) {
  if (!geometry.contains(event))
    throw Error(ErrorCode::OutOfBounds, "event at (" + std::to_string(event.x) + ", " + std::to_string(event.y) +
                                            ") is outside the " + std::to_string(geometry.width) + "x" +
                                            std::to_string(geometry.height) + " sensor");
  double &v = pixels[static_cast<std::size_t>(event.y) * static_cast<std::size_t>(geometry.width) + event.x];
  v = std::clamp(v + signed_contribution(event, mode, contribution), 0.0, 1.0);
}

void apply_decay(std::span<double> pixels, double dt, const Decay &decay, double neutral) {
  if (dt < 0.0)
    throw Error(ErrorCode::NegativeInterval, "decay interval must be >= 0");
  if (dt == 0.0)
    return;
  if (const auto *lin = std::get_if<LinearDecay>(&decay)) {
    const double step = lin->rate * dt;
    for (double &v : pixels) {
      const double offset = v - neutral;
      if (offset > 0.0)
        v = offset > step ? v - step : neutral;
      else if (offset < 0.0)
        v = -offset > step ? v + step : neutral;
    }
  } else if (const auto *exp = std::get_if<ExponentialDecay>(&decay)) {
    const double factor = std::exp(-dt / exp->tau);
    for (double &v : pixels)
      v = neutral + (v - neutral) * factor;
  }
}

std::vector<double> reset_frame(const SensorGeometry &geometry, PolarityMode mode) {
  return std::vector<double>(geometry.area(), neutral_value(mode));
}

namespace {

void check_ordered(const Slice &slice) {
  for (std::size_t i = 1; i < slice.events.size(); ++i)
    if (slice.events[i].t < slice.events[i - 1].t)
      throw Error(ErrorCode::NonMonotonic, "slice events must be ordered by timestamp");
}

} // namespace

EventFrame accumulate_slice(const Slice &slice, const AccumulatorConfig &config, const FrameSpec &spec,
                            AccumulatorCarry &carry) {
  check_ordered(slice);
  const auto geometry = spec.geometry();
  const double neutral = neutral_value(config.polarity_mode);

  EventFrame frame;
  frame.spec = spec;
  frame.stamp = slice.publish_stamp;
  frame.neutral = neutral;

  if (std::holds_alternative<StepDecay>(config.decay)) {
    frame.pixels = reset_frame(geometry, config.polarity_mode);
    for (const auto &e : slice.events)
      integrate_event(frame.pixels, geometry, e, config.polarity_mode, config.contribution);
  } else {
    if (carry.persistent.size() != geometry.area()) {
      carry.persistent = reset_frame(geometry, config.polarity_mode);
      carry.decayed_to = slice.events.empty() ? slice.publish_stamp : slice.events.front().t;
    }
    for (const auto &e : slice.events) {
      // Slices from ByTimeAndNumber can overlap; integrate each event once.
      if (carry.integrated_before && e.t < *carry.integrated_before)
        continue;
      if (e.t > carry.decayed_to) {
        apply_decay(carry.persistent, to_seconds(e.t - carry.decayed_to), config.decay, neutral);
        carry.decayed_to = e.t;
      }
      integrate_event(carry.persistent, geometry, e, config.polarity_mode, config.contribution);
    }
    if (slice.publish_stamp > carry.decayed_to) {
      apply_decay(carry.persistent, to_seconds(slice.publish_stamp - carry.decayed_to), config.decay, neutral);
      carry.decayed_to = slice.publish_stamp;
    }
    frame.pixels = carry.persistent;
  }

  carry.integrated_before = slice.publish_stamp;
  carry.previous = frame;
  return frame;
}

EventFrame hold_previous(AccumulatorCarry &carry, const AccumulatorConfig &config, const FrameSpec &spec,
                         Nanos publish_stamp) {
  EventFrame frame;
  if (carry.previous) {
    frame = *carry.previous;
  } else {
    frame.spec = spec;
    frame.pixels = reset_frame(spec.geometry(), config.polarity_mode);
    frame.neutral = neutral_value(config.polarity_mode);
  }
  frame.stamp = publish_stamp;
  frame.held = true;
  // Events of a held interval are never integrated later.
  carry.integrated_before = publish_stamp;
  carry.previous = frame;
  return frame;
}

Accumulator::Accumulator(AccumulatorConfig config, FrameSpec spec) : config_(std::move(config)), spec_(spec) {
  validate(config_);
  validate(spec_);
}

EventFrame Accumulator::process(const Slice &slice) {
  // ByNumber has no publish interval to measure motion over.
  if (config_.slice_method != SliceMethod::ByNumber &&
      detect_no_motion(slice.interval_event_count, config_.no_motion_threshold))
    return hold(slice.publish_stamp);
  return accumulate(slice);
}

} // namespace evframe
