#include "evframe/eval.hpp"

#include "evframe/accumulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

namespace evframe {

double ncc(const EventFrame &a, const EventFrame &b) {
  if (a.spec.width != b.spec.width || a.spec.height != b.spec.height || a.pixels.size() != b.pixels.size())
    throw Error(ErrorCode::InvalidConfig, "ncc needs frames of the same geometry");
  if (a.pixels.empty())
    throw Error(ErrorCode::Degenerate, "ncc of empty frames");
  const auto [amin, amax] = std::minmax_element(a.pixels.begin(), a.pixels.end());
  const auto [bmin, bmax] = std::minmax_element(b.pixels.begin(), b.pixels.end());
  if (*amin == *amax || *bmin == *bmax)
    throw Error(ErrorCode::Degenerate, "ncc is undefined for a constant frame");

  const double n = static_cast<double>(a.pixels.size());
  const double mean_a = std::accumulate(a.pixels.begin(), a.pixels.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.pixels.begin(), b.pixels.end(), 0.0) / n;
  double cross = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double da = a.pixels[i] - mean_a;
    const double db = b.pixels[i] - mean_b;
    cross += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  return std::clamp(cross / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double fill_ratio(const EventFrame &frame) {
  if (frame.pixels.empty())
    return 0.0;
  const auto filled = std::count_if(frame.pixels.begin(), frame.pixels.end(),
                                    [&](double v) { return v != frame.neutral; });
  return static_cast<double>(filled) / static_cast<double>(frame.pixels.size());
}

double saturation_fraction(const EventFrame &frame) {
  std::size_t active = 0;
  std::size_t saturated = 0;
  for (double v : frame.pixels) {
    if (v == frame.neutral)
      continue;
    ++active;
    if (v == 0.0 || v == 1.0)
      ++saturated;
  }
  return active ? static_cast<double>(saturated) / static_cast<double>(active) : 0.0;
}

std::size_t distinct_levels(const EventFrame &frame, int bit_depth) {
  const auto raster = quantize_frame(frame, bit_depth);
  return std::set<std::uint16_t>(raster.begin(), raster.end()).size();
}

EventFrame side_by_side(std::span<const EventFrame> frames) {
  if (frames.empty())
    throw Error(ErrorCode::InvalidConfig, "side_by_side needs at least one frame");
  EventFrame out;
  out.spec = frames.front().spec;
  out.spec.width = 0;
  for (const auto &f : frames) {
    if (f.spec.height != frames.front().spec.height)
      throw Error(ErrorCode::InvalidConfig, "side_by_side needs frames of equal height");
    out.spec.width += f.spec.width;
  }
  out.stamp = frames.front().stamp;
  out.neutral = frames.front().neutral;
  out.pixels.reserve(static_cast<std::size_t>(out.spec.width) * out.spec.height);
  for (int y = 0; y < out.spec.height; ++y)
    for (const auto &f : frames)
      for (int x = 0; x < f.spec.width; ++x)
        out.pixels.push_back(f.at(x, y));
  return out;
}

SlicedRun run_slices(std::span<const Event> events, const AccumulatorConfig &config, const FrameSpec &spec,
                     std::optional<Nanos> t0) {
  SlicedRun run;
  Slicer slicer(slicer_options(config, t0));
  const SliceSink sink = [&run](Slice &&s) { run.slices.push_back(std::move(s)); };
  for (const auto &e : events)
    slicer.push(e, sink);
  slicer.finish(sink);
  Accumulator accumulator(config, spec);
  run.frames.reserve(run.slices.size());
  for (const auto &s : run.slices)
    run.frames.push_back(accumulator.process(s));
  return run;
}

namespace {

void summarize(SimilarityReport &report) {
  double sum = 0.0;
  double lowest = 1.0;
  std::size_t scored = 0;
  for (const auto &e : report.entries) {
    if (!e.score)
      continue;
    sum += *e.score;
    lowest = std::min(lowest, *e.score);
    ++scored;
  }
  report.mean = scored ? sum / static_cast<double>(scored) : 0.0;
  report.min = scored ? lowest : 0.0;
}

std::optional<double> try_ncc(const EventFrame &a, const EventFrame &b) {
  try {
    return ncc(a, b);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::Degenerate)
      throw;
    return std::nullopt;
  }
}

// Integer ratio b/a, or 0 when b is not an integer multiple of a.
std::size_t integer_ratio(double a, double b) {
  const double r = b / a;
  const double rounded = std::round(r);
  return (rounded >= 1.0 && std::abs(r - rounded) < 1e-9) ? static_cast<std::size_t>(rounded) : 0;
}

} // namespace

SpeedInvarianceResult speed_invariance_report(const SpeedInvarianceSetup &setup) {
  if (setup.speeds.size() < 2)
    throw Error(ErrorCode::InvalidConfig, "speed invariance needs at least two speeds");
  const double base = setup.speeds.front();
  if (!(base > 0.0))
    throw Error(ErrorCode::InvalidConfig, "speeds must be positive");

  const auto geometry = setup.scene.geometry();
  const FrameSpec spec{geometry.width, geometry.height, 8};

  AccumulatorConfig by_time;
  by_time.slice_method = SliceMethod::ByTime;
  by_time.interval = setup.interval;
  by_time.window_size = setup.window_size;
  by_time.contribution = setup.contribution;
  by_time.polarity_mode = setup.polarity_mode;
  AccumulatorConfig by_time_number = by_time;
  by_time_number.slice_method = SliceMethod::ByTimeAndNumber;

  struct Run {
    double speed;
    Nanos end;
    SlicedRun time;
    SlicedRun time_number;
  };
  std::vector<Run> runs;
  SpeedInvarianceResult result;
  result.by_time.method = "time";
  result.by_time_and_number.method = "time-number";

  for (double speed : setup.speeds) {
    const auto ratio = integer_ratio(base, speed);
    if (ratio == 0)
      throw Error(ErrorCode::InvalidConfig, "every speed must be an integer multiple of the first");
    const double duration = setup.duration / static_cast<double>(ratio);
    const auto events = generate_events(setup.scene, MotionProfile::constant(speed, 0.0, duration), setup.sensor,
                                        setup.time_step / static_cast<double>(ratio));
    Run run{speed, from_seconds(duration), run_slices(events, by_time, spec, Nanos{0}),
            run_slices(events, by_time_number, spec, Nanos{0})};

    SpeedSliceCounts counts;
    counts.speed = speed;
    for (const auto &s : run.time.slices)
      counts.by_time.push_back(s.events.size());
    for (const auto &s : run.time_number.slices) {
      counts.by_time_and_number.push_back(s.events.size());
      counts.by_time_and_number_partial.push_back(s.partial);
    }
    result.counts.push_back(std::move(counts));
    runs.push_back(std::move(run));
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = 0; j < runs.size(); ++j) {
      if (i == j || runs[j].speed < runs[i].speed || (runs[j].speed == runs[i].speed && j < i))
        continue;
      const auto r = integer_ratio(runs[i].speed, runs[j].speed);
      if (r == 0)
        continue;
      const auto &slow = runs[i];
      const auto &fast = runs[j];
      for (std::size_t k = 1; k * r <= slow.time.slices.size() && k <= fast.time.slices.size(); ++k) {
        const std::size_t ks = k * r;
        // Slices flushed after the run ended cover a truncated interval.
        if (slow.time.slices[ks - 1].publish_stamp > slow.end || fast.time.slices[k - 1].publish_stamp > fast.end)
          break;
        if (ks > slow.time_number.slices.size() || k > fast.time_number.slices.size())
          break;
        result.by_time.entries.push_back(
            {slow.speed, fast.speed, ks, k, try_ncc(slow.time.frames[ks - 1], fast.time.frames[k - 1])});
        if (slow.time_number.slices[ks - 1].partial || fast.time_number.slices[k - 1].partial)
          continue;
        result.by_time_and_number.entries.push_back(
            {slow.speed, fast.speed, ks, k, try_ncc(slow.time_number.frames[ks - 1], fast.time_number.frames[k - 1])});
      }
    }
  }

  for (auto *report : {&result.by_time, &result.by_time_and_number}) {
    report->degenerate = static_cast<std::size_t>(
        std::count_if(report->entries.begin(), report->entries.end(), [](const auto &e) { return !e.score; }));
    summarize(*report);
  }
  return result;
}

std::vector<WindowSweepRow> window_sweep(std::span<const Event> events, const AccumulatorConfig &base,
                                         const FrameSpec &spec, std::span<const std::size_t> window_sizes,
                                         std::optional<Nanos> t0) {
  std::vector<WindowSweepRow> rows;
  for (const auto n : window_sizes) {
    AccumulatorConfig config = base;
    config.window_size = n;
    const auto run = run_slices(events, config, spec, t0);
    WindowSweepRow row;
    row.window_size = n;
    for (std::size_t i = 0; i < run.frames.size(); ++i) {
      if (run.slices[i].partial || run.frames[i].held)
        continue;
      ++row.frames;
      row.mean_fill += fill_ratio(run.frames[i]);
      row.mean_saturation += saturation_fraction(run.frames[i]);
    }
    if (row.frames > 0) {
      row.mean_fill /= static_cast<double>(row.frames);
      row.mean_saturation /= static_cast<double>(row.frames);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<ContributionSweepRow> contribution_sweep(std::span<const Event> events, const AccumulatorConfig &base,
                                                     const FrameSpec &spec, std::span<const double> contributions,
                                                     std::optional<Nanos> t0) {
  std::vector<ContributionSweepRow> rows;
  for (const double c : contributions) {
    AccumulatorConfig config = base;
    config.contribution = c;
    const auto run = run_slices(events, config, spec, t0);
    ContributionSweepRow row;
    row.contribution = c;
    for (const auto &f : run.frames) {
      const auto levels = distinct_levels(f, spec.bit_depth);
      row.levels.push_back(levels);
      row.max_levels = std::max(row.max_levels, levels);
      row.mean_levels += static_cast<double>(levels);
    }
    if (!row.levels.empty())
      row.mean_levels /= static_cast<double>(row.levels.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double signed_offset(const EventFrame &frame) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : frame.pixels) {
    if (v == frame.neutral)
      continue;
    sum += v;
    ++n;
  }
  if (n == 0)
    throw Error(ErrorCode::Degenerate, "frame has no edge pixels");
  return sum / static_cast<double>(n) - 0.5;
}

} // namespace

ReversalResult polarity_reversal_check(const ReversalSetup &setup) {
  const auto motion =
      MotionProfile::constant(setup.speed, 0.0, setup.half_duration).then(-setup.speed, 0.0, setup.half_duration);
  const auto events = generate_events(setup.scene, motion, setup.sensor, setup.time_step);
  const auto geometry = setup.scene.geometry();
  const FrameSpec spec{geometry.width, geometry.height, 8};

  AccumulatorConfig config;
  config.slice_method = SliceMethod::ByTimeAndNumber;
  config.interval = setup.interval;
  config.window_size = setup.window_size;
  config.contribution = setup.contribution;
  config.polarity_mode = PolarityMode::Signed;
  const auto signed_run = run_slices(events, config, spec, Nanos{0});
  config.polarity_mode = PolarityMode::Rectified;
  const auto rectified_run = run_slices(events, config, spec, Nanos{0});

  const Nanos reversal = from_seconds(setup.half_duration);
  const auto &slices = signed_run.slices;
  auto usable = [](const Slice &s) { return !s.partial && !s.events.empty(); };
  auto span_of = [&](const Slice &s) {
    const double a = motion.displacement(to_seconds(s.events.front().t)).first;
    const double b = motion.displacement(to_seconds(s.events.back().t)).first;
    return std::pair{std::min(a, b), std::max(a, b)};
  };

  std::optional<std::size_t> before;
  for (std::size_t i = 0; i < slices.size(); ++i)
    if (usable(slices[i]) && slices[i].events.back().t <= reversal)
      before = i;
  if (!before)
    throw Error(ErrorCode::Degenerate, "no full frame before the reversal");

  const auto target = span_of(slices[*before]);
  std::optional<std::size_t> after;
  double best = -1.0;
  for (std::size_t i = *before + 1; i < slices.size(); ++i) {
    if (!usable(slices[i]) || slices[i].events.front().t <= reversal)
      continue;
    const auto span = span_of(slices[i]);
    const double overlap = std::min(span.second, target.second) - std::max(span.first, target.first);
    const double joint = std::max(span.second, target.second) - std::min(span.first, target.first);
    const double iou = joint > 0.0 ? std::max(overlap, 0.0) / joint : 0.0;
    if (iou > best) {
      best = iou;
      after = i;
    }
  }
  if (!after)
    throw Error(ErrorCode::Degenerate, "no full frame after the reversal");

  ReversalResult result;
  result.frame_before = slices[*before].index;
  result.frame_after = slices[*after].index;
  result.signed_before = signed_run.frames[*before];
  result.signed_after = signed_run.frames[*after];
  result.rectified_before = rectified_run.frames[*before];
  result.rectified_after = rectified_run.frames[*after];
  result.signed_offset_before = signed_offset(result.signed_before);
  result.signed_offset_after = signed_offset(result.signed_after);
  result.rectified_ncc = ncc(result.rectified_before, result.rectified_after);
  return result;
}

void write_csv(std::ostream &out, const SimilarityReport &report) {
  out << "method,speed_a,speed_b,frame_a,frame_b,ncc\n";
  for (const auto &e : report.entries) {
    out << report.method << ',' << e.speed_a << ',' << e.speed_b << ',' << e.frame_a << ',' << e.frame_b << ',';
    if (e.score)
      out << *e.score;
    else
      out << "degenerate";
    out << '\n';
  }
}

void write_csv(std::ostream &out, std::span<const WindowSweepRow> rows) {
  out << "window_size,frames,mean_fill,mean_saturation\n";
  for (const auto &r : rows)
    out << r.window_size << ',' << r.frames << ',' << r.mean_fill << ',' << r.mean_saturation << '\n';
}

void write_csv(std::ostream &out, std::span<const ContributionSweepRow> rows) {
  out << "contribution,max_levels,mean_levels\n";
  for (const auto &r : rows)
    out << r.contribution << ',' << r.max_levels << ',' << r.mean_levels << '\n';
}

} // namespace evframe
