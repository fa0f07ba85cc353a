#include "evframe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <tuple>

namespace evframe {

namespace {

// Threshold comparisons tolerate accumulated rounding of a few ulps, so an
// edge of height k*C releases exactly k events.
constexpr double kThresholdSlack = 1e-9;

} // namespace

SyntheticScene::SyntheticScene(SensorGeometry geometry, std::vector<double> log_brightness, Boundary boundary)
    : geometry_(geometry), field_(std::move(log_brightness)), boundary_(boundary) {
  if (geometry_.width < 1 || geometry_.height < 1)
    throw Error(ErrorCode::InvalidConfig, "scene geometry must be at least 1x1");
  if (field_.size() != geometry_.area())
    throw Error(ErrorCode::InvalidConfig, "log brightness grid does not match the scene geometry");
  for (double v : field_)
    if (!std::isfinite(v))
      throw Error(ErrorCode::InvalidConfig, "log brightness must be finite");
}

SyntheticScene SyntheticScene::step_edge(SensorGeometry geometry, double height, int edge_column) {
  std::vector<double> field(geometry.area(), 0.0);
  for (int y = 0; y < geometry.height; ++y)
    for (int x = 0; x < std::min(edge_column, geometry.width); ++x)
      field[static_cast<std::size_t>(y) * geometry.width + x] = height;
  return SyntheticScene(geometry, std::move(field), Boundary::Clamp);
}

SyntheticScene SyntheticScene::bars(SensorGeometry geometry, double height, int period, int soft_width) {
  if (period < 2 || soft_width < 1 || soft_width >= period)
    throw Error(ErrorCode::InvalidConfig, "bars need period >= 2 and 1 <= soft_width < period");
  std::vector<double> field(geometry.area(), 0.0);
  const int bright = (period - soft_width) / 2;
  for (int x = 0; x < geometry.width; ++x) {
    const int phase = x % period;
    double value = 0.0;
    if (phase < bright)
      value = height;
    else if (phase < bright + soft_width)
      value = height * (1.0 - static_cast<double>(phase - bright + 1) / static_cast<double>(soft_width + 1));
    for (int y = 0; y < geometry.height; ++y)
      field[static_cast<std::size_t>(y) * geometry.width + x] = value;
  }
  return SyntheticScene(geometry, std::move(field), Boundary::Wrap);
}

SyntheticScene SyntheticScene::checker(SensorGeometry geometry, double height, int square) {
  if (square < 1)
    throw Error(ErrorCode::InvalidConfig, "checker square size must be >= 1");
  std::vector<double> field(geometry.area(), 0.0);
  for (int y = 0; y < geometry.height; ++y)
    for (int x = 0; x < geometry.width; ++x)
      if (((x / square) + (y / square)) % 2 == 0)
        field[static_cast<std::size_t>(y) * geometry.width + x] = height;
  return SyntheticScene(geometry, std::move(field), Boundary::Wrap);
}

double SyntheticScene::grid(long i, long j) const {
  const long w = geometry_.width;
  const long h = geometry_.height;
  if (boundary_ == Boundary::Clamp) {
    i = std::clamp(i, 0L, w - 1);
    j = std::clamp(j, 0L, h - 1);
  } else {
    i = ((i % w) + w) % w;
    j = ((j % h) + h) % h;
  }
  return field_[static_cast<std::size_t>(j) * geometry_.width + static_cast<std::size_t>(i)];
}

double SyntheticScene::sample(double u, double v) const {
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const double au = u - fu;
  const double av = v - fv;
  const long i = static_cast<long>(fu);
  const long j = static_cast<long>(fv);
  const double top = grid(i, j) * (1.0 - au) + grid(i + 1, j) * au;
  if (av == 0.0)
    return top;
  const double bottom = grid(i, j + 1) * (1.0 - au) + grid(i + 1, j + 1) * au;
  return top * (1.0 - av) + bottom * av;
}

MotionProfile::MotionProfile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  for (const auto &p : pieces_)
    if (!(p.duration > 0.0) || !std::isfinite(p.vx) || !std::isfinite(p.vy))
      throw Error(ErrorCode::InvalidConfig, "motion pieces need a positive duration and finite velocity");
}

MotionProfile MotionProfile::constant(double vx, double vy, double duration) {
  return MotionProfile({Piece{vx, vy, duration}});
}

MotionProfile &MotionProfile::then(double vx, double vy, double duration) {
  if (!(duration > 0.0))
    throw Error(ErrorCode::InvalidConfig, "motion pieces need a positive duration");
  pieces_.push_back({vx, vy, duration});
  return *this;
}

double MotionProfile::duration() const {
  double total = 0.0;
  for (const auto &p : pieces_)
    total += p.duration;
  return total;
}

std::pair<double, double> MotionProfile::displacement(double t) const {
  double dx = 0.0;
  double dy = 0.0;
  double start = 0.0;
  for (const auto &p : pieces_) {
    const double span = std::min(p.duration, t - start);
    if (span <= 0.0)
      break;
    dx += p.vx * span;
    dy += p.vy * span;
    start += p.duration;
  }
  return {dx, dy};
}

double MotionProfile::max_speed() const {
  double best = 0.0;
  for (const auto &p : pieces_)
    best = std::max(best, std::hypot(p.vx, p.vy));
  return best;
}

std::size_t expected_event_count(double edge_height, double contrast_threshold) {
  if (!(contrast_threshold > 0.0))
    throw Error(ErrorCode::InvalidConfig, "contrast threshold must be > 0");
  if (edge_height < 0.0)
    throw Error(ErrorCode::InvalidConfig, "edge height must be >= 0");
  return static_cast<std::size_t>(std::floor(edge_height / contrast_threshold + kThresholdSlack));
}

EventStream generate_events(const SyntheticScene &scene, const MotionProfile &motion, const SensorModel &sensor,
                            double time_step) {
  if (!(sensor.contrast_threshold > 0.0))
    throw Error(ErrorCode::InvalidConfig, "contrast threshold must be > 0");
  if (!(time_step > 0.0))
    throw Error(ErrorCode::InvalidConfig, "time step must be > 0");
  if (motion.max_speed() * time_step >= 0.5)
    throw Error(ErrorCode::InvalidConfig, "time step too coarse: the scene must move less than half a pixel per step");

  const auto &geometry = scene.geometry();
  const double duration = motion.duration();
  const double threshold = sensor.contrast_threshold;
  const double slack = kThresholdSlack * threshold;

  // Reference level of each pixel is its initial brightness plus a whole
  // number of thresholds, so the reference never accumulates rounding.
  std::vector<double> initial(geometry.area());
  std::vector<long> crossings(geometry.area(), 0);
  for (int y = 0; y < geometry.height; ++y)
    for (int x = 0; x < geometry.width; ++x)
      initial[static_cast<std::size_t>(y) * geometry.width + x] = scene.sample(x, y);

  EventStream events;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / time_step - kThresholdSlack));
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = std::min(static_cast<double>(i) * time_step, duration);
    const Nanos stamp = from_seconds(t);
    const auto [dx, dy] = motion.displacement(t);
    for (int y = 0; y < geometry.height; ++y) {
      for (int x = 0; x < geometry.width; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * geometry.width + x;
        const double level = scene.sample(x - dx, y - dy);
        long &n = crossings[idx];
        while (level - (initial[idx] + static_cast<double>(n) * threshold) >= threshold - slack) {
          ++n;
          events.push_back({stamp, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), 1});
        }
        while (level - (initial[idx] + static_cast<double>(n) * threshold) <= -threshold + slack) {
          --n;
          events.push_back({stamp, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), -1});
        }
      }
    }
  }

  if (sensor.noise_rate > 0.0)
    return add_noise(events, sensor, geometry, 0.0, duration);
  return events;
}

EventStream add_noise(const EventStream &stream, const SensorModel &sensor, const SensorGeometry &geometry,
                      double begin, double end) {
  if (sensor.noise_rate < 0.0)
    throw Error(ErrorCode::InvalidConfig, "noise rate must be >= 0");
  if (sensor.noise_rate == 0.0 || !(end > begin))
    return stream;

  std::mt19937_64 rng(sensor.seed);
  const double mean = sensor.noise_rate * static_cast<double>(geometry.area()) * (end - begin);
  std::poisson_distribution<long long> count_dist(mean);
  const long long count = count_dist(rng);

  const Nanos lo = from_seconds(begin);
  const Nanos hi = from_seconds(end);
  std::uniform_int_distribution<std::int64_t> time_dist(lo.count(), hi.count() - 1);
  std::uniform_int_distribution<int> x_dist(0, geometry.width - 1);
  std::uniform_int_distribution<int> y_dist(0, geometry.height - 1);
  std::bernoulli_distribution polarity_dist(0.5);

  EventStream noise;
  noise.reserve(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; ++k) {
    Event e;
    e.t = Nanos{time_dist(rng)};
    e.x = static_cast<std::uint16_t>(x_dist(rng));
    e.y = static_cast<std::uint16_t>(y_dist(rng));
    e.p = polarity_dist(rng) ? 1 : -1;
    noise.push_back(e);
  }
  std::sort(noise.begin(), noise.end(), [](const Event &a, const Event &b) {
    return std::tie(a.t, a.y, a.x, a.p) < std::tie(b.t, b.y, b.x, b.p);
  });

  EventStream merged;
  merged.reserve(stream.size() + noise.size());
  std::merge(stream.begin(), stream.end(), noise.begin(), noise.end(), std::back_inserter(merged),
             [](const Event &a, const Event &b) { return a.t < b.t; });
  return merged;
}

} // namespace evframe
