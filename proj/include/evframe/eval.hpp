#pragma once

#include "evframe/core.hpp"
#include "evframe/slicer.hpp"
#include "evframe/synth.hpp"

#include <iosfwd>
#include <optional>

namespace evframe {

/// Zero-mean normalized cross-correlation over all pixels. Throws Degenerate
/// when either frame is constant.
double ncc(const EventFrame &a, const EventFrame &b);

/// Fraction of pixels that differ from the frame's neutral value.
double fill_ratio(const EventFrame &frame);
/// Fraction of non-neutral pixels sitting exactly at 0 or 1.
double saturation_fraction(const EventFrame &frame);
/// Number of distinct values after quantization.
std::size_t distinct_levels(const EventFrame &frame, int bit_depth);
inline std::size_t distinct_levels(const EventFrame &frame) { return distinct_levels(frame, frame.spec.bit_depth); }

/// Frames placed left to right on a shared canvas (for visual comparisons).
EventFrame side_by_side(std::span<const EventFrame> frames);

/// Slices a stream and accumulates every slice, keeping both.
struct SlicedRun {
  std::vector<Slice> slices;
  std::vector<EventFrame> frames;
};
SlicedRun run_slices(std::span<const Event> events, const AccumulatorConfig &config, const FrameSpec &spec,
                     std::optional<Nanos> t0 = std::nullopt);

struct SimilarityEntry {
  double speed_a = 0.0;
  double speed_b = 0.0;
  std::size_t frame_a = 0; // 1-based publish index in the speed_a run
  std::size_t frame_b = 0;
  std::optional<double> score; // empty when either frame is constant
};

struct SimilarityReport {
  std::string method;
  std::vector<SimilarityEntry> entries;
  std::size_t degenerate = 0;
  double min = 0.0;
  double mean = 0.0;

  std::size_t scored() const { return entries.size() - degenerate; }
};

struct SpeedInvarianceSetup {
  SyntheticScene scene;
  SensorModel sensor;
  /// Speeds in pixels/s along +x. Each must be an integer multiple of the first.
  std::vector<double> speeds;
  /// Run length at the first speed; faster runs are shortened so every run
  /// covers the same scene displacement.
  double duration = 1.0;
  /// Simulation step at the first speed; scaled down with speed.
  double time_step = 1e-3;
  double interval = 1.0 / 30.0;
  std::size_t window_size = 1000;
  double contribution = 0.2;
  PolarityMode polarity_mode = PolarityMode::Rectified;
};

struct SpeedSliceCounts {
  double speed = 0.0;
  std::vector<std::size_t> by_time;
  std::vector<std::size_t> by_time_and_number;
  std::vector<bool> by_time_and_number_partial;
};

struct SpeedInvarianceResult {
  SimilarityReport by_time;
  SimilarityReport by_time_and_number;
  std::vector<SpeedSliceCounts> counts;
};

/// Generates the scene at every speed and accumulates it with slice by time
/// and with slice by time and number, both at the same publish interval.
/// Frame k of a run at r times the base speed is paired with frame k*r of the
/// base run, so both frames end at the same scene displacement.
SpeedInvarianceResult speed_invariance_report(const SpeedInvarianceSetup &setup);

struct WindowSweepRow {
  std::size_t window_size = 0;
  std::size_t frames = 0;
  double mean_fill = 0.0;
  double mean_saturation = 0.0;
};

/// Mean fill ratio and saturation fraction over the full (non-partial,
/// non-held) frames for each window size.
std::vector<WindowSweepRow> window_sweep(std::span<const Event> events, const AccumulatorConfig &base,
                                         const FrameSpec &spec, std::span<const std::size_t> window_sizes,
                                         std::optional<Nanos> t0 = std::nullopt);

struct ContributionSweepRow {
  double contribution = 0.0;
  std::size_t max_levels = 0;
  double mean_levels = 0.0;
  /// Distinct levels per frame, in publish order.
  std::vector<std::size_t> levels;
};

std::vector<ContributionSweepRow> contribution_sweep(std::span<const Event> events, const AccumulatorConfig &base,
                                                     const FrameSpec &spec, std::span<const double> contributions,
                                                     std::optional<Nanos> t0 = std::nullopt);

struct ReversalSetup {
  SyntheticScene scene;
  SensorModel sensor;
  double speed = 100.0;   // pixels/s, +x first, then -x
  double half_duration = 0.5;
  double time_step = 1e-3;
  double interval = 1.0 / 30.0;
  std::size_t window_size = 500;
  double contribution = 0.2;
};

struct ReversalResult {
  std::size_t frame_before = 0; // 1-based publish indices
  std::size_t frame_after = 0;
  /// Mean of the non-neutral pixels minus 0.5 in signed mode.
  double signed_offset_before = 0.0;
  double signed_offset_after = 0.0;
  double rectified_ncc = 0.0;
  EventFrame signed_before, signed_after, rectified_before, rectified_after;
};

/// Moves the scene along +x, then back along -x, and compares the last full
/// frame before the reversal with the frame after it that covers the same
/// scene displacement.
ReversalResult polarity_reversal_check(const ReversalSetup &setup);

void write_csv(std::ostream &out, const SimilarityReport &report);
void write_csv(std::ostream &out, std::span<const WindowSweepRow> rows);
void write_csv(std::ostream &out, std::span<const ContributionSweepRow> rows);

} // namespace evframe
