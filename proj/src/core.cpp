#include "evframe/core.hpp"

#include <cmath>
#include <sstream>

namespace evframe {

Nanos from_seconds(double seconds) { return Nanos{std::llround(seconds * 1e9)}; }

const char *to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidConfig: return "InvalidConfig";
  case ErrorCode::UnsupportedBitDepth: return "UnsupportedBitDepth";
  case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
  case ErrorCode::OutOfBounds: return "OutOfBounds";
  case ErrorCode::NonMonotonic: return "NonMonotonic";
  case ErrorCode::NegativeInterval: return "NegativeInterval";
  case ErrorCode::MalformedField: return "MalformedField";
  case ErrorCode::NegativeTimestamp: return "NegativeTimestamp";
  case ErrorCode::InvalidPolarity: return "InvalidPolarity";
  case ErrorCode::Degenerate: return "Degenerate";
  case ErrorCode::UnknownPreset: return "UnknownPreset";
  case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

SensorGeometry parse_geometry(const std::string &text) {
  const auto sep = text.find_first_of("xX");
  if (sep == std::string::npos)
    throw Error(ErrorCode::InvalidConfig, "geometry must look like WIDTHxHEIGHT, got '" + text + "'");
  SensorGeometry g;
  try {
    std::size_t used = 0;
    g.width = std::stoi(text.substr(0, sep), &used);
    if (used != sep)
      throw std::invalid_argument("width");
    const auto rest = text.substr(sep + 1);
    g.height = std::stoi(rest, &used);
    if (used != rest.size())
      throw std::invalid_argument("height");
  } catch (const std::logic_error &) {
    throw Error(ErrorCode::InvalidConfig, "geometry must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  if (g.width < 1 || g.height < 1 || g.width > 65535 || g.height > 65535)
    throw Error(ErrorCode::InvalidConfig, "geometry dimensions must be in [1, 65535], got '" + text + "'");
  return g;
}

void validate(const FrameSpec &spec) {
  if (spec.width < 1 || spec.height < 1)
    throw Error(ErrorCode::InvalidConfig, "frame width and height must be >= 1");
  if (spec.bit_depth != 8 && spec.bit_depth != 16)
    throw Error(ErrorCode::UnsupportedBitDepth, "bit depth must be 8 or 16, got " + std::to_string(spec.bit_depth));
}

void validate(const AccumulatorConfig &config) {
  if (config.window_size < 1)
    throw Error(ErrorCode::InvalidConfig, "window size must be >= 1");
  if (config.slice_method != SliceMethod::ByNumber && !(config.interval > 0.0))
    throw Error(ErrorCode::InvalidConfig, "interval must be > 0 for time-based slicing");
  if (!(config.contribution > 0.0 && config.contribution <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "event contribution must be in (0, 1]");
  if (const auto *lin = std::get_if<LinearDecay>(&config.decay); lin && !(lin->rate > 0.0))
    throw Error(ErrorCode::InvalidConfig, "linear decay rate must be > 0");
  if (const auto *exp = std::get_if<ExponentialDecay>(&config.decay); exp && !(exp->tau > 0.0))
    throw Error(ErrorCode::InvalidConfig, "exponential decay tau must be > 0");
}

std::string to_string(SliceMethod method) {
  switch (method) {
  case SliceMethod::ByNumber: return "number";
  case SliceMethod::ByTime: return "time";
  case SliceMethod::ByTimeAndNumber: return "time-number";
  }
  return "?";
}

std::string to_string(PolarityMode mode) { return mode == PolarityMode::Rectified ? "rectified" : "signed"; }

std::string to_string(const Decay &decay) {
  std::ostringstream os;
  if (std::holds_alternative<StepDecay>(decay))
    os << "step";
  else if (const auto *lin = std::get_if<LinearDecay>(&decay))
    os << "linear:" << lin->rate;
  else
    os << "exp:" << std::get<ExponentialDecay>(decay).tau;
  return os.str();
}

std::string describe(const AccumulatorConfig &config) {
  std::ostringstream os;
  os << "slice=" << to_string(config.slice_method) << " N=" << config.window_size
     << " interval=" << config.interval << "s c=" << config.contribution
     << " polarity=" << to_string(config.polarity_mode) << " decay=" << to_string(config.decay)
     << " no_motion_threshold=" << config.no_motion_threshold;
  return os.str();
}

double neutral_value(PolarityMode mode) { return mode == PolarityMode::Rectified ? 0.0 : 0.5; }

std::uint16_t quantize_value(double v, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw Error(ErrorCode::UnsupportedBitDepth, "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  const double max_value = static_cast<double>((1u << bit_depth) - 1u);
  // std::lround rounds halfway cases away from zero.
  return static_cast<std::uint16_t>(std::lround(v * max_value));
}

std::vector<std::uint16_t> quantize_frame(const EventFrame &frame, int bit_depth) {
  if (frame.pixels.size() != frame.spec.geometry().area())
    throw Error(ErrorCode::InvalidConfig, "frame pixel count does not match its geometry");
  std::vector<std::uint16_t> raster(frame.pixels.size());
  for (std::size_t i = 0; i < raster.size(); ++i)
    raster[i] = quantize_value(frame.pixels[i], bit_depth);
  return raster;
}

std::vector<std::uint16_t> quantize_frame(const EventFrame &frame) { return quantize_frame(frame, frame.spec.bit_depth); }

std::size_t window_size_for(double events_per_pixel, const SensorGeometry &geometry) {
  if (!(events_per_pixel > 0.0))
    throw Error(ErrorCode::NonPositiveDensity, "events per pixel must be > 0");
  if (geometry.width < 1 || geometry.height < 1)
    throw Error(ErrorCode::InvalidConfig, "geometry must be at least 1x1");
  const double n = std::round(events_per_pixel * static_cast<double>(geometry.width) *
                              static_cast<double>(geometry.height));
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

} // namespace evframe
