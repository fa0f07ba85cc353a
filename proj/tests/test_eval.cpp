#include "evframe/eval.hpp"
#include "evframe/pipeline.hpp"
#include "evframe/scenarios.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace evframe;

namespace {

EventFrame frame_of(std::vector<double> px, int w, int h, double neutral = 0.0) {
  EventFrame f{{w, h, 8}, std::move(px)};
  f.neutral = neutral;
  return f;
}

// Straightforward two-pass NCC used as a reference.
double reference_ncc(const std::vector<double> &a, const std::vector<double> &b) {
  long double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  long double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(num / std::sqrt(da * db));
}

} // namespace

TEST_CASE("ncc examples") {
  const auto a = frame_of({0.0, 0.2, 0.4, 1.0}, 2, 2);
  CHECK(ncc(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  const auto inv = frame_of({1.0, 0.8, 0.6, 0.0}, 2, 2);
  CHECK(ncc(a, inv) == doctest::Approx(-1.0).epsilon(1e-12));
  const auto flat = frame_of({0.3, 0.3, 0.3, 0.3}, 2, 2);
  try {
    ncc(a, flat);
    FAIL("expected Degenerate");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::Degenerate);
  }
}

TEST_CASE("ncc properties") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int round = 0; round < 50; ++round) {
    std::vector<double> x(64), y(64);
    for (auto &v : x)
      v = unit(rng);
    for (auto &v : y)
      v = unit(rng);
    const auto a = frame_of(x, 8, 8);
    const auto b = frame_of(y, 8, 8);
    const double s = ncc(a, b);
    CHECK(s == doctest::Approx(ncc(b, a)).epsilon(1e-12));
    CHECK(s == doctest::Approx(reference_ncc(x, y)).epsilon(1e-9));
    CHECK(std::abs(s) <= 1.0 + 1e-12);
    const double scale = 0.1 + unit(rng), shift = unit(rng) - 0.5;
    std::vector<double> z(x);
    for (auto &v : z)
      v = v * scale + shift;
    CHECK(ncc(frame_of(z, 8, 8), b) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("fill ratio and saturation") {
  CHECK(fill_ratio(frame_of({0.0, 0.0, 0.0, 0.0}, 2, 2)) == 0.0);
  CHECK(fill_ratio(frame_of({0.0, 0.5, 1.0, 0.0}, 2, 2)) == 0.5);
  CHECK(fill_ratio(frame_of({0.5, 0.5, 1.0, 0.0}, 2, 2, 0.5)) == 0.5);
  CHECK(saturation_fraction(frame_of({0.0, 0.5, 1.0, 0.0}, 2, 2)) == 0.5);
  CHECK(saturation_fraction(frame_of({0.0, 0.0, 0.0, 0.0}, 2, 2)) == 0.0);
  CHECK(distinct_levels(frame_of({0.0, 0.5, 1.0, 0.0}, 2, 2)) == 3);
}

TEST_CASE("side_by_side") {
  const auto a = frame_of({0.1, 0.2, 0.3, 0.4}, 2, 2);
  const auto b = frame_of({0.5, 0.6, 0.7, 0.8}, 2, 2);
  const std::vector<EventFrame> both{a, b};
  const auto c = side_by_side(both);
  CHECK(c.spec.width == 4);
  CHECK(c.spec.height == 2);
  CHECK(c.at(0, 1) == 0.3);
  CHECK(c.at(3, 0) == 0.6);
}

TEST_CASE("few large contributions leave few gray levels") {
  const auto events = scenarios::bars_stream();
  const FrameSpec spec{scenarios::kGeometry.width, scenarios::kGeometry.height, 8};
  AccumulatorConfig cfg;
  cfg.window_size = 2000;
  const std::vector<double> cs{1.0, 0.5};
  const auto rows = contribution_sweep(events, cfg, spec, cs, Nanos{0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].max_levels <= 2);
  CHECK(rows[1].max_levels <= 3);
  CHECK(rows[0].levels.size() == rows[1].levels.size());
}

TEST_CASE("fill grows with window size") {
  const auto events = scenarios::bars_stream();
  const FrameSpec spec{scenarios::kGeometry.width, scenarios::kGeometry.height, 8};
  AccumulatorConfig cfg;
  cfg.contribution = 0.2;
  const std::vector<std::size_t> sizes{100, 400, 1600, 3200};
  const auto rows = window_sweep(events, cfg, spec, sizes, Nanos{0});
  REQUIRE(rows.size() == sizes.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].mean_fill >= rows[i - 1].mean_fill);
    CHECK(rows[i].mean_saturation >= rows[i - 1].mean_saturation);
  }
  for (const auto &r : rows)
    CHECK(r.frames > 0);
}

TEST_CASE("run_slices pairs every slice with a frame") {
  const auto events = scenarios::bars_stream();
  const FrameSpec spec{scenarios::kGeometry.width, scenarios::kGeometry.height, 8};
  AccumulatorConfig cfg;
  cfg.window_size = 500;
  const auto run = run_slices(events, cfg, spec, Nanos{0});
  REQUIRE(run.slices.size() == run.frames.size());
  for (std::size_t i = 0; i < run.slices.size(); ++i)
    CHECK(run.frames[i].stamp == run.slices[i].publish_stamp);
}

TEST_CASE("signed frames at c=1 use at most three levels") {
  const auto events = scenarios::bars_stream();
  const FrameSpec spec{scenarios::kGeometry.width, scenarios::kGeometry.height, 8};
  AccumulatorConfig cfg;
  cfg.polarity_mode = PolarityMode::Signed;
  cfg.contribution = 1.0;
  cfg.window_size = 1500;
  for (const auto &f : accumulate_stream(events, cfg, spec, Nanos{0}))
    CHECK(distinct_levels(f) <= 3);
}
