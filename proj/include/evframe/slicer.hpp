#pragma once

#include "evframe/core.hpp"

#include <functional>
#include <optional>

namespace evframe {

/// A spatio-temporal window of events selected to build one frame.
struct Slice {
  std::vector<Event> events;
  Nanos publish_stamp{0};
  /// Events that arrived during the publish interval [t_{k-1}, t_k).
  std::size_t interval_event_count = 0;
  /// Fewer than N events were available (stream start).
  bool partial = false;
  /// 1-based publish index k.
  std::size_t index = 0;
};

struct SlicerOptions {
  SliceMethod method = SliceMethod::ByTimeAndNumber;
  std::size_t window_size = 1;
  double interval = 1.0 / 30.0; // seconds
  /// Phase of the publish clock; defaults to the first event's timestamp.
  std::optional<Nanos> t0;
};

SlicerOptions slicer_options(const AccumulatorConfig &config, std::optional<Nanos> t0 = std::nullopt);

using SliceSink = std::function<void(Slice &&)>;

/// Streaming slicer. Events must be pushed in non-decreasing timestamp order
/// by a single producer. Slices are handed to the sink as soon as they are
/// complete.
///
/// ByNumber emits every N events and withholds the remainder.
/// ByTime emits the events of each half-open interval [t_{k-1}, t_k).
/// ByTimeAndNumber emits, at each t_k = t0 + k*interval, the N most recent
/// events with t < t_k. Consecutive slices may share events when fewer than
/// N arrive per interval.
class Slicer {
public:
  explicit Slicer(SlicerOptions options);

  void push(const Event &event, const SliceSink &sink);

  /// Flushes the interval in progress for the time-based methods, so every
  /// pushed event ends up in some slice. ByNumber keeps its remainder pending.
  void finish(const SliceSink &sink);

  /// Events buffered but not yet emitted by ByNumber.
  std::span<const Event> pending() const;

  /// Publish stamp of slice k (1-based). Computed directly from t0, so the
  /// sequence does not drift over long runs.
  Nanos publish_stamp(std::size_t k) const;

  std::optional<Nanos> t0() const { return t0_; }
  std::size_t events_pushed() const { return pushed_; }
  /// Events dropped by ByTime because they precede t0.
  std::size_t events_before_t0() const { return before_t0_; }
  const SlicerOptions &options() const { return options_; }

private:
  void start(Nanos t0);
  void emit_time_slice(const SliceSink &sink);

  SlicerOptions options_;
  std::optional<Nanos> t0_;
  std::optional<Nanos> last_t_;
  std::size_t next_index_ = 1;
  Nanos next_stamp_{0};
  std::size_t interval_count_ = 0;
  std::size_t pushed_ = 0;
  std::size_t before_t0_ = 0;
  // ByNumber: current partial slice. ByTime: current interval.
  // ByTimeAndNumber: history, trimmed to the last N events lazily.
  std::vector<Event> buffer_;
};

struct NumberSlices {
  std::vector<Slice> slices;
  std::vector<Event> pending;
};

NumberSlices slice_by_number(std::span<const Event> stream, std::size_t window_size);
std::vector<Slice> slice_by_time(std::span<const Event> stream, double interval,
                                 std::optional<Nanos> t0 = std::nullopt);
std::vector<Slice> slice_by_time_and_number(std::span<const Event> stream, double interval, std::size_t window_size,
                                            std::optional<Nanos> t0 = std::nullopt);

/// True when fewer than `threshold` events arrived in the interval. A zero
/// threshold disables the check.
constexpr bool detect_no_motion(std::size_t interval_event_count, std::size_t threshold) {
  return threshold > 0 && interval_event_count < threshold;
}

} // namespace evframe
