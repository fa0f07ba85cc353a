#pragma once

#include "evframe/accumulator.hpp"
#include "evframe/slicer.hpp"

#include <iosfwd>

namespace evframe {

struct PipelineStats {
  std::size_t events_in = 0;
  std::size_t frames = 0;
  std::size_t held_frames = 0;
  std::size_t partial_frames = 0;
  std::size_t slice_events = 0;
  /// Wall time spent in slicing and accumulation, excluding the frame sink.
  double processing_seconds = 0.0;
  double frame_build_seconds = 0.0;

  double mean_events_per_slice() const { return frames ? static_cast<double>(slice_events) / frames : 0.0; }
  double mean_frame_build_ms() const { return frames ? 1e3 * frame_build_seconds / frames : 0.0; }
  double events_per_second() const { return processing_seconds > 0 ? events_in / processing_seconds : 0.0; }
};

std::ostream &operator<<(std::ostream &os, const PipelineStats &stats);

using FrameSink = std::function<void(const EventFrame &)>;

/// Slicer and accumulator composed for one stream.
class Pipeline {
public:
  Pipeline(const AccumulatorConfig &config, const FrameSpec &spec, std::optional<Nanos> t0 = std::nullopt);

  void push(std::span<const Event> events, const FrameSink &sink);
  void finish(const FrameSink &sink);

  const PipelineStats &stats() const { return stats_; }
  const Slicer &slicer() const { return slicer_; }

private:
  void on_slice(Slice &&slice, const FrameSink &sink);

  Slicer slicer_;
  Accumulator accumulator_;
  PipelineStats stats_;
  double sink_seconds_ = 0.0;
};

/// Runs a whole in-memory stream and returns every frame.
std::vector<EventFrame> accumulate_stream(std::span<const Event> events, const AccumulatorConfig &config,
                                          const FrameSpec &spec, std::optional<Nanos> t0 = std::nullopt,
                                          PipelineStats *stats = nullptr);

} // namespace evframe
