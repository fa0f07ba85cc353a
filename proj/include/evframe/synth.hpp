#pragma once

#include "evframe/core.hpp"

#include <cstdint>

namespace evframe {

/// Log-brightness field sampled on the sensor grid, bilinearly interpolated
/// in between. Outside the grid the field is either clamped to its border or
/// wrapped periodically.
class SyntheticScene {
public:
  enum class Boundary { Clamp, Wrap };

  SyntheticScene(SensorGeometry geometry, std::vector<double> log_brightness, Boundary boundary = Boundary::Clamp);

  /// Single vertical edge: `height` log units left of `edge_column`, 0 from it on.
  static SyntheticScene step_edge(SensorGeometry geometry, double height, int edge_column);
  /// Periodic vertical bars. Each period has a sharp rising edge and a falling
  /// ramp `soft_width` pixels wide, i.e. two edges of different sharpness.
  static SyntheticScene bars(SensorGeometry geometry, double height, int period, int soft_width);
  static SyntheticScene checker(SensorGeometry geometry, double height, int square);

  double sample(double u, double v) const;
  double at(int x, int y) const { return field_[static_cast<std::size_t>(y) * geometry_.width + x]; }
  const SensorGeometry &geometry() const { return geometry_; }
  Boundary boundary() const { return boundary_; }

private:
  double grid(long i, long j) const;

  SensorGeometry geometry_;
  std::vector<double> field_;
  Boundary boundary_;
};

/// Piecewise-constant image-plane velocity of the scene content (pixels/s).
class MotionProfile {
public:
  struct Piece {
    double vx = 0.0;
    double vy = 0.0;
    double duration = 0.0; // seconds
  };

  MotionProfile() = default;
  explicit MotionProfile(std::vector<Piece> pieces);

  static MotionProfile constant(double vx, double vy, double duration);

  MotionProfile &then(double vx, double vy, double duration);

  double duration() const;
  /// Scene displacement (dx, dy) at time t, integrating the velocity exactly.
  std::pair<double, double> displacement(double t) const;
  double max_speed() const;
  const std::vector<Piece> &pieces() const { return pieces_; }

private:
  std::vector<Piece> pieces_;
};

struct SensorModel {
  double contrast_threshold = 0.2; // log units
  double noise_rate = 0.0;         // events / pixel / second
  std::uint64_t seed = 0;
};

/// Number of threshold crossings a pixel sees when its log brightness changes
/// monotonically by `edge_height`: floor(H / C), with exact multiples counting.
std::size_t expected_event_count(double edge_height, double contrast_threshold);

/// Simulates the scene translating under `motion` and emits an event each
/// time a pixel's log brightness has moved by C since its previous event.
/// Several events can be released by one pixel in one step. Timestamps are
/// the step times; the result is time ordered, then row-major within a step.
/// Requires max speed * time_step < 0.5 px. Noise is added when the sensor's
/// noise rate is positive.
EventStream generate_events(const SyntheticScene &scene, const MotionProfile &motion, const SensorModel &sensor,
                            double time_step);

/// Superimposes homogeneous Poisson noise of the sensor's rate on every pixel
/// over [begin, end) seconds. Polarity is uniform. Deterministic given seed.
EventStream add_noise(const EventStream &stream, const SensorModel &sensor, const SensorGeometry &geometry,
                      double begin, double end);
inline EventStream add_noise(const EventStream &stream, const SensorModel &sensor, const SensorGeometry &geometry,
                             double duration) {
  return add_noise(stream, sensor, geometry, 0.0, duration);
}

} // namespace evframe
