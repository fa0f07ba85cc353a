#include "evframe/pipeline.hpp"

#include <chrono>
#include <ostream>

namespace evframe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

std::ostream &operator<<(std::ostream &os, const PipelineStats &stats) {
  os << "events: " << stats.events_in << '\n'
     << "frames: " << stats.frames << " (held " << stats.held_frames << ", partial " << stats.partial_frames << ")\n"
     << "mean events/slice: " << stats.mean_events_per_slice() << '\n'
     << "mean frame build time: " << stats.mean_frame_build_ms() << " ms\n"
     << "throughput: " << stats.events_per_second() << " events/s\n";
  return os;
}

Pipeline::Pipeline(const AccumulatorConfig &config, const FrameSpec &spec, std::optional<Nanos> t0)
    : slicer_(slicer_options(config, t0)), accumulator_(config, spec) {}

void Pipeline::on_slice(Slice &&slice, const FrameSink &sink) {
  const auto start = Clock::now();
  const EventFrame frame = accumulator_.process(slice);
  stats_.frame_build_seconds += seconds_since(start);
  ++stats_.frames;
  stats_.held_frames += frame.held ? 1 : 0;
  stats_.partial_frames += slice.partial ? 1 : 0;
  stats_.slice_events += slice.events.size();
  const auto sink_start = Clock::now();
  sink(frame);
  sink_seconds_ += seconds_since(sink_start);
}

void Pipeline::push(std::span<const Event> events, const FrameSink &sink) {
  const auto start = Clock::now();
  const double sink_before = sink_seconds_;
  const SliceSink slice_sink = [this, &sink](Slice &&s) { on_slice(std::move(s), sink); };
  for (const auto &e : events)
    slicer_.push(e, slice_sink);
  stats_.events_in += events.size();
  stats_.processing_seconds += seconds_since(start) - (sink_seconds_ - sink_before);
}

void Pipeline::finish(const FrameSink &sink) {
  const auto start = Clock::now();
  const double sink_before = sink_seconds_;
  slicer_.finish([this, &sink](Slice &&s) { on_slice(std::move(s), sink); });
  stats_.processing_seconds += seconds_since(start) - (sink_seconds_ - sink_before);
}

std::vector<EventFrame> accumulate_stream(std::span<const Event> events, const AccumulatorConfig &config,
                                          const FrameSpec &spec, std::optional<Nanos> t0, PipelineStats *stats) {
  std::vector<EventFrame> frames;
  Pipeline pipeline(config, spec, t0);
  const FrameSink sink = [&frames](const EventFrame &f) { frames.push_back(f); };
  pipeline.push(events, sink);
  pipeline.finish(sink);
  if (stats)
    *stats = pipeline.stats();
  return frames;
}

} // namespace evframe
