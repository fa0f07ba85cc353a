#include "evframe/eval.hpp"
#include "evframe/io.hpp"
#include "evframe/pipeline.hpp"
#include "evframe/presets.hpp"
#include "evframe/scenarios.hpp"
#include "evframe/synth.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

namespace {

using namespace evframe;

Decay parse_decay(const std::string &text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const bool has_value = colon != std::string::npos;
  double value = 0.0;
  if (has_value) {
    try {
      value = std::stod(text.substr(colon + 1));
    } catch (const std::logic_error &) {
      throw Error(ErrorCode::InvalidConfig, "bad decay parameter in '" + text + "'");
    }
  }
  if (kind == "step" && !has_value)
    return StepDecay{};
  if (kind == "linear")
    return LinearDecay{has_value ? value : 1.0};
  if (kind == "exp")
    return ExponentialDecay{has_value ? value : 0.1};
  throw Error(ErrorCode::InvalidConfig, "decay must be step, linear[:RATE] or exp[:TAU], got '" + text + "'");
}

struct AccumulateArgs {
  std::string input = "-";
  std::string out;
  std::string geometry;
  std::string preset;
  std::string slice;
  std::size_t window_size = 0;
  double events_per_pixel = 0.0;
  double interval = 0.0;
  double contribution = 0.0;
  std::string polarity;
  std::string decay;
  std::size_t no_motion_threshold = 0;
  int bit_depth = 8;
  double t0 = 0.0;
  bool quiet = false;
};

int run_accumulate(const AccumulateArgs &args, const CLI::App &cmd) {
  const auto geometry = parse_geometry(args.geometry);
  const bool from_preset = cmd.count("--preset") > 0;
  AccumulatorConfig config = from_preset ? preset(args.preset) : AccumulatorConfig{};

  auto override_note = [&](const char *flag) {
    if (from_preset)
      std::cerr << "preset " << args.preset << ": " << flag << " overridden\n";
  };

  if (cmd.count("--slice")) {
    override_note("--slice");
    config.slice_method = args.slice == "number" ? SliceMethod::ByNumber
                          : args.slice == "time" ? SliceMethod::ByTime
                                                 : SliceMethod::ByTimeAndNumber;
  }
  if (cmd.count("--window-size")) {
    override_note("--window-size");
    config.window_size = args.window_size;
  }
  if (cmd.count("--events-per-pixel")) {
    override_note("--events-per-pixel");
    config.window_size = window_size_for(args.events_per_pixel, geometry);
  }
  if (cmd.count("--interval")) {
    override_note("--interval");
    config.interval = args.interval;
  }
  if (cmd.count("--contribution")) {
    override_note("--contribution");
    config.contribution = args.contribution;
  }
  if (cmd.count("--polarity")) {
    override_note("--polarity");
    config.polarity_mode = args.polarity == "signed" ? PolarityMode::Signed : PolarityMode::Rectified;
  }
  if (cmd.count("--decay")) {
    override_note("--decay");
    config.decay = parse_decay(args.decay);
  }
  if (cmd.count("--no-motion-threshold")) {
    override_note("--no-motion-threshold");
    config.no_motion_threshold = args.no_motion_threshold;
  }
  validate(config);

  const FrameSpec spec{geometry.width, geometry.height, args.bit_depth};
  validate(spec);
  if (!args.quiet)
    std::cerr << "config: " << describe(config) << '\n';

  std::optional<Nanos> t0;
  if (cmd.count("--t0"))
    t0 = from_seconds(args.t0);

  std::optional<EventReader> reader;
  if (args.input == "-")
    reader.emplace(std::cin, geometry);
  else
    reader.emplace(std::filesystem::path(args.input), geometry);

  FrameWriter writer(args.out, args.bit_depth);
  Pipeline pipeline(config, spec, t0);
  const FrameSink sink = [&writer](const EventFrame &f) { writer.write(f); };

  std::vector<Event> batch;
  batch.reserve(1 << 16);
  while (reader->next_batch(batch, 1 << 16))
    pipeline.push(batch, sink);
  pipeline.finish(sink);
  writer.finish();

  std::cout << pipeline.stats();
  return 0;
}

struct SynthArgs {
  std::string scene = "step-edge";
  std::string geometry = "240x180";
  double height = 0.6;
  double threshold = 0.2;
  double speed = 100.0;
  double speed_y = 0.0;
  double duration = 1.0;
  double time_step = 0.0;
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  int edge_column = 0;
  int period = 16;
  int soft_width = 5;
  int square = 16;
  bool reverse = false;
  double still = 0.0;
  std::string out = "-";
};

int run_synth(const SynthArgs &args) {
  const auto geometry = parse_geometry(args.geometry);
  const auto scene = args.scene == "step-edge" ? SyntheticScene::step_edge(geometry, args.height,
                                                                           args.edge_column > 0 ? args.edge_column
                                                                                                : geometry.width / 8)
                     : args.scene == "bars"    ? SyntheticScene::bars(geometry, args.height, args.period, args.soft_width)
                                               : SyntheticScene::checker(geometry, args.height, args.square);
  MotionProfile motion = MotionProfile::constant(args.speed, args.speed_y, args.duration);
  if (args.reverse)
    motion.then(-args.speed, -args.speed_y, args.duration);
  if (args.still > 0.0)
    motion.then(0.0, 0.0, args.still);

  double step = args.time_step;
  if (step <= 0.0) {
    const double speed = motion.max_speed();
    step = speed > 0.0 ? std::min(1e-3, 0.25 / speed) : 1e-3;
  }
  const SensorModel sensor{args.threshold, args.noise_rate, args.seed};
  const auto events = generate_events(scene, motion, sensor, step);

  if (args.out == "-") {
    write_stream(std::cout, events);
  } else {
    write_stream(std::filesystem::path(args.out), events);
  }
  std::cerr << "synth: " << events.size() << " events, " << expected_event_count(args.height, args.threshold)
            << " expected per crossed pixel per edge, time step " << step << " s\n";
  return 0;
}

struct EvalArgs {
  std::string report = "all";
  std::string out = "eval";
  bool images = false;
};

void write_frame(const std::filesystem::path &path, const EventFrame &frame) {
  write_pgm(path, Raster{frame.spec, quantize_frame(frame)});
}

int run_eval(const EvalArgs &args) {
  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  const bool all = args.report == "all";
  const FrameSpec spec{scenarios::kGeometry.width, scenarios::kGeometry.height, 8};

  if (all || args.report == "speed") {
    const auto result = speed_invariance_report(scenarios::speed_invariance());
    std::ofstream csv(dir / "speed_invariance.csv");
    write_csv(csv, result.by_time);
    for (const auto &e : result.by_time_and_number.entries)
      csv << "time-number," << e.speed_a << ',' << e.speed_b << ',' << e.frame_a << ',' << e.frame_b << ','
          << (e.score ? std::to_string(*e.score) : std::string("degenerate")) << '\n';
    std::cout << "speed invariance: mean NCC time=" << result.by_time.mean
              << " time-number=" << result.by_time_and_number.mean << " (" << result.by_time.scored() << " / "
              << result.by_time_and_number.scored() << " pairs)\n";
  }
  if (all || args.report == "window") {
    const auto events = scenarios::bars_stream();
    const auto sizes = scenarios::window_sizes(scenarios::kGeometry);
    AccumulatorConfig base;
    const auto rows = window_sweep(events, base, spec, sizes, Nanos{0});
    std::ofstream csv(dir / "window_sweep.csv");
    write_csv(csv, rows);
    for (const auto &r : rows)
      std::cout << "window " << r.window_size << ": fill=" << r.mean_fill << " saturation=" << r.mean_saturation
                << '\n';
    if (args.images) {
      std::vector<EventFrame> frames;
      for (const auto n : sizes) {
        AccumulatorConfig config = base;
        config.window_size = n;
        frames.push_back(run_slices(events, config, spec, Nanos{0}).frames.at(15));
      }
      write_frame(dir / "window_sweep.pgm", side_by_side(frames));
    }
  }
  if (all || args.report == "contribution") {
    const auto events = scenarios::bars_stream();
    const std::vector<double> contributions{0.1, 0.2, 0.33, 0.5, 1.0};
    AccumulatorConfig base;
    base.window_size = scenarios::window_sizes(scenarios::kGeometry)[2];
    const auto rows = contribution_sweep(events, base, spec, contributions, Nanos{0});
    std::ofstream csv(dir / "contribution_sweep.csv");
    write_csv(csv, rows);
    for (const auto &r : rows)
      std::cout << "contribution " << r.contribution << ": max levels=" << r.max_levels << '\n';
    if (args.images) {
      std::vector<EventFrame> frames;
      for (const double c : contributions) {
        AccumulatorConfig config = base;
        config.contribution = c;
        frames.push_back(run_slices(events, config, spec, Nanos{0}).frames.at(15));
      }
      write_frame(dir / "contribution_sweep.pgm", side_by_side(frames));
    }
  }
  if (all || args.report == "polarity") {
    const auto result = polarity_reversal_check(scenarios::polarity_reversal());
    std::ofstream csv(dir / "polarity_reversal.csv");
    csv << "frame_before,frame_after,signed_offset_before,signed_offset_after,rectified_ncc\n"
        << result.frame_before << ',' << result.frame_after << ',' << result.signed_offset_before << ','
        << result.signed_offset_after << ',' << result.rectified_ncc << '\n';
    std::cout << "polarity reversal: signed offset " << result.signed_offset_before << " -> "
              << result.signed_offset_after << ", rectified NCC " << result.rectified_ncc << '\n';
    if (args.images) {
      const std::vector frames{result.signed_before, result.signed_after};
      write_frame(dir / "polarity_signed.pgm", side_by_side(frames));
      const std::vector rect{result.rectified_before, result.rectified_after};
      write_frame(dir / "polarity_rectified.pgm", side_by_side(rect));
    }
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Event-camera stream to event-frame toolkit"};
  app.require_subcommand(1);

  AccumulateArgs acc;
  auto *accumulate = app.add_subcommand("accumulate", "Turn an event text stream into PGM event frames");
  accumulate->add_option("--input", acc.input, "Event file ('t x y p' per line), '-' for stdin")->capture_default_str();
  accumulate->add_option("--out", acc.out, "Output directory for frames and index.csv")->required();
  accumulate->add_option("--geometry", acc.geometry, "Sensor size WxH, e.g. 240x180")->required();
  accumulate->add_option("--preset", acc.preset, "Named settings: " + [] {
    std::string s;
    for (const auto &n : preset_names())
      s += (s.empty() ? "" : ", ") + n;
    return s;
  }());
  accumulate->add_option("--slice", acc.slice, "Slice method")
      ->check(CLI::IsMember({"number", "time", "time-number"}));
  auto *window = accumulate->add_option("--window-size", acc.window_size, "Events per slice N")
                     ->check(CLI::PositiveNumber);
  accumulate->add_option("--events-per-pixel", acc.events_per_pixel, "Size N as density x sensor area")
      ->excludes(window);
  accumulate->add_option("--interval", acc.interval, "Publish interval in seconds");
  accumulate->add_option("--contribution", acc.contribution, "Per-event contribution in (0, 1]");
  accumulate->add_option("--polarity", acc.polarity, "Polarity handling")
      ->check(CLI::IsMember({"rectified", "signed"}));
  accumulate->add_option("--decay", acc.decay, "step | linear[:RATE] | exp[:TAU]");
  accumulate->add_option("--no-motion-threshold", acc.no_motion_threshold, "Hold frames below this count (0 = off)");
  accumulate->add_option("--bit-depth", acc.bit_depth, "PGM bit depth")->check(CLI::IsMember({8, 16}));
  accumulate->add_option("--t0", acc.t0, "Publish clock phase in seconds (default: first event)");
  accumulate->add_flag("--quiet", acc.quiet, "Do not echo the configuration");

  SynthArgs syn;
  auto *synth = app.add_subcommand("synth", "Generate a synthetic event stream");
  synth->add_option("--scene", syn.scene, "Scene")
      ->check(CLI::IsMember({"step-edge", "bars", "checker"}))
      ->capture_default_str();
  synth->add_option("--geometry", syn.geometry, "Sensor size WxH")->capture_default_str();
  synth->add_option("--height", syn.height, "Edge height in log-intensity units")->capture_default_str();
  synth->add_option("--threshold", syn.threshold, "Contrast threshold C")->capture_default_str();
  synth->add_option("--speed", syn.speed, "Scene velocity along x, px/s")->capture_default_str();
  synth->add_option("--speed-y", syn.speed_y, "Scene velocity along y, px/s")->capture_default_str();
  synth->add_option("--duration", syn.duration, "Seconds of motion")->capture_default_str();
  synth->add_option("--time-step", syn.time_step, "Simulation step (default: auto)");
  synth->add_option("--noise-rate", syn.noise_rate, "Background events per pixel per second")->capture_default_str();
  synth->add_option("--seed", syn.seed, "Noise seed")->capture_default_str();
  synth->add_option("--edge-column", syn.edge_column, "Step edge column (default: width/8)");
  synth->add_option("--period", syn.period, "Bar period in pixels")->capture_default_str();
  synth->add_option("--soft-width", syn.soft_width, "Width of the soft bar edge")->capture_default_str();
  synth->add_option("--square", syn.square, "Checker square size")->capture_default_str();
  synth->add_flag("--reverse", syn.reverse, "Move back the same way after the first phase");
  synth->add_option("--still", syn.still, "Append a still phase of this many seconds");
  synth->add_option("--out", syn.out, "Output file, '-' for stdout")->capture_default_str();

  EvalArgs ev;
  auto *eval = app.add_subcommand("eval", "Run the synthetic evaluation reports");
  eval->add_option("--report", ev.report, "Which report")
      ->check(CLI::IsMember({"all", "speed", "window", "contribution", "polarity"}))
      ->capture_default_str();
  eval->add_option("--out", ev.out, "Directory for CSV reports")->capture_default_str();
  eval->add_flag("--images", ev.images, "Also write side-by-side PGM comparisons");

  CLI11_PARSE(app, argc, argv);

  try {
    if (accumulate->parsed())
      return run_accumulate(acc, *accumulate);
    if (synth->parsed())
      return run_synth(syn);
    if (eval->parsed())
      return run_eval(ev);
  } catch (const evframe::Error &e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
