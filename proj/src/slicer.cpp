#include "evframe/slicer.hpp"

#include <cmath>

namespace evframe {

SlicerOptions slicer_options(const AccumulatorConfig &config, std::optional<Nanos> t0) {
  return SlicerOptions{config.slice_method, config.window_size, config.interval, t0};
}

Slicer::Slicer(SlicerOptions options) : options_(options) {
  if (options_.window_size < 1)
    throw Error(ErrorCode::InvalidConfig, "window size must be >= 1");
  if (options_.method != SliceMethod::ByNumber && !(options_.interval > 0.0))
    throw Error(ErrorCode::InvalidConfig, "interval must be > 0 for time-based slicing");
  if (options_.method == SliceMethod::ByNumber)
    buffer_.reserve(options_.window_size);
  else if (options_.method == SliceMethod::ByTimeAndNumber)
    buffer_.reserve(2 * options_.window_size);
  if (options_.t0)
    start(*options_.t0);
}

Nanos Slicer::publish_stamp(std::size_t k) const {
  const long double offset = static_cast<long double>(k) * static_cast<long double>(options_.interval) * 1e9L;
  return t0_.value_or(Nanos{0}) + Nanos{std::llround(offset)};
}

void Slicer::start(Nanos t0) {
  t0_ = t0;
  next_index_ = 1;
  next_stamp_ = publish_stamp(1);
}

void Slicer::emit_time_slice(const SliceSink &sink) {
  Slice slice;
  slice.publish_stamp = next_stamp_;
  slice.interval_event_count = interval_count_;
  slice.index = next_index_;
  if (options_.method == SliceMethod::ByTime) {
    slice.events = std::move(buffer_);
    buffer_.clear();
  } else {
    const std::size_t n = std::min(options_.window_size, buffer_.size());
    slice.events.assign(buffer_.end() - static_cast<std::ptrdiff_t>(n), buffer_.end());
    slice.partial = n < options_.window_size;
  }
  interval_count_ = 0;
  ++next_index_;
  next_stamp_ = publish_stamp(next_index_);
  sink(std::move(slice));
}

void Slicer::push(const Event &event, const SliceSink &sink) {
  if (last_t_ && event.t < *last_t_)
    throw Error(ErrorCode::NonMonotonic, "event timestamps must be non-decreasing");
  last_t_ = event.t;
  ++pushed_;

  if (options_.method == SliceMethod::ByNumber) {
    buffer_.push_back(event);
    if (buffer_.size() == options_.window_size) {
      Slice slice;
      slice.publish_stamp = event.t;
      slice.interval_event_count = buffer_.size();
      slice.index = next_index_++;
      slice.events.swap(buffer_);
      buffer_.reserve(options_.window_size);
      sink(std::move(slice));
    }
    return;
  }

  if (!t0_)
    start(event.t);
  while (event.t >= next_stamp_)
    emit_time_slice(sink);

  if (options_.method == SliceMethod::ByTime) {
    if (event.t < *t0_) {
      ++before_t0_;
      return;
    }
    buffer_.push_back(event);
  } else {
    if (buffer_.size() == 2 * options_.window_size)
      buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(options_.window_size));
    buffer_.push_back(event);
  }
  ++interval_count_;
}

void Slicer::finish(const SliceSink &sink) {
  if (options_.method != SliceMethod::ByNumber && interval_count_ > 0)
    emit_time_slice(sink);
}

std::span<const Event> Slicer::pending() const {
  if (options_.method == SliceMethod::ByNumber)
    return buffer_;
  return {};
}

namespace {

std::vector<Slice> run(Slicer &slicer, std::span<const Event> stream) {
  std::vector<Slice> out;
  const SliceSink sink = [&out](Slice &&s) { out.push_back(std::move(s)); };
  for (const auto &e : stream)
    slicer.push(e, sink);
  slicer.finish(sink);
  return out;
}

} // namespace

NumberSlices slice_by_number(std::span<const Event> stream, std::size_t window_size) {
  Slicer slicer({SliceMethod::ByNumber, window_size, 0.0, std::nullopt});
  NumberSlices result;
  result.slices = run(slicer, stream);
  const auto rest = slicer.pending();
  result.pending.assign(rest.begin(), rest.end());
  return result;
}

std::vector<Slice> slice_by_time(std::span<const Event> stream, double interval, std::optional<Nanos> t0) {
  Slicer slicer({SliceMethod::ByTime, 1, interval, t0});
  return run(slicer, stream);
}

std::vector<Slice> slice_by_time_and_number(std::span<const Event> stream, double interval, std::size_t window_size,
                                            std::optional<Nanos> t0) {
  Slicer slicer({SliceMethod::ByTimeAndNumber, window_size, interval, t0});
  return run(slicer, stream);
}

} // namespace evframe
