#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace evframe {

// Event time. Integer nanoseconds keep slice boundaries and publish stamps exact.
using Nanos = std::chrono::duration<std::int64_t, std::nano>;

inline double to_seconds(Nanos t) { return static_cast<double>(t.count()) * 1e-9; }
Nanos from_seconds(double seconds);

enum class ErrorCode {
  InvalidConfig,
  UnsupportedBitDepth,
  NonPositiveDensity,
  OutOfBounds,
  NonMonotonic,
  NegativeInterval,
  MalformedField,
  NegativeTimestamp,
  InvalidPolarity,
  Degenerate,
  UnknownPreset,
  Io,
};

const char *to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

struct Event {
  Nanos t{0};
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t p = 1; // +1 or -1

  friend bool operator==(const Event &, const Event &) = default;
};

using EventStream = std::vector<Event>;

struct SensorGeometry {
  int width = 0;
  int height = 0;

  std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(const Event &e) const { return e.x < width && e.y < height; }
  friend bool operator==(const SensorGeometry &, const SensorGeometry &) = default;
};

// Parses "WxH", e.g. "240x180".
SensorGeometry parse_geometry(const std::string &text);

struct FrameSpec {
  int width = 0;
  int height = 0;
  int bit_depth = 8;

  SensorGeometry geometry() const { return {width, height}; }
  friend bool operator==(const FrameSpec &, const FrameSpec &) = default;
};

void validate(const FrameSpec &spec);

/// A normalized event frame. Pixels are row-major and live in [0, 1].
struct EventFrame {
  FrameSpec spec;
  std::vector<double> pixels;
  Nanos stamp{0};
  bool held = false;
  /// Background level the frame was reset to.
  double neutral = 0.0;

  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * spec.width + x]; }
};

enum class SliceMethod { ByNumber, ByTime, ByTimeAndNumber };
enum class PolarityMode { Rectified, Signed };

struct StepDecay {
  friend bool operator==(const StepDecay &, const StepDecay &) = default;
};
struct LinearDecay {
  double rate = 1.0; // normalized intensity per second
  friend bool operator==(const LinearDecay &, const LinearDecay &) = default;
};
struct ExponentialDecay {
  double tau = 0.1; // seconds
  friend bool operator==(const ExponentialDecay &, const ExponentialDecay &) = default;
};
using Decay = std::variant<StepDecay, LinearDecay, ExponentialDecay>;

struct AccumulatorConfig {
  SliceMethod slice_method = SliceMethod::ByTimeAndNumber;
  std::size_t window_size = 10000;
  double interval = 1.0 / 30.0; // seconds
  double contribution = 0.2;
  PolarityMode polarity_mode = PolarityMode::Rectified;
  Decay decay = StepDecay{};
  std::size_t no_motion_threshold = 0; // 0 disables the hold path

  friend bool operator==(const AccumulatorConfig &, const AccumulatorConfig &) = default;
};

void validate(const AccumulatorConfig &config);

std::string to_string(SliceMethod method);
std::string to_string(PolarityMode mode);
std::string to_string(const Decay &decay);
std::string describe(const AccumulatorConfig &config);

/// Background level of a freshly reset frame: 0 when polarities are
/// rectified, mid-scale when they are kept.
double neutral_value(PolarityMode mode);

/// Maps normalized pixels to integers in [0, 2^bit_depth - 1], rounding half
/// away from zero. Only 8 and 16 bit outputs are supported.
std::vector<std::uint16_t> quantize_frame(const EventFrame &frame, int bit_depth);
std::vector<std::uint16_t> quantize_frame(const EventFrame &frame);
std::uint16_t quantize_value(double v, int bit_depth);

/// Event window size N = events per pixel * width * height, rounded, at least 1.
std::size_t window_size_for(double events_per_pixel, const SensorGeometry &geometry);

} // namespace evframe
