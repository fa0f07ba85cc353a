#include "evframe/accumulator.hpp"
#include "evframe/eval.hpp"
#include "evframe/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace evframe;

namespace {

const FrameSpec kSpec{8, 6, 8};

AccumulatorConfig step_config(PolarityMode mode, double c) {
  AccumulatorConfig config;
  config.slice_method = SliceMethod::ByTimeAndNumber;
  config.polarity_mode = mode;
  config.contribution = c;
  config.window_size = 1000;
  return config;
}

Slice make_slice(EventStream events, Nanos stamp, std::size_t interval_count = 1000) {
  Slice s;
  s.events = std::move(events);
  s.publish_stamp = stamp;
  s.interval_event_count = interval_count;
  return s;
}

EventStream random_events(std::mt19937_64 &rng, std::size_t n, const FrameSpec &spec) {
  std::uniform_int_distribution<int> xs(0, spec.width - 1), ys(0, spec.height - 1), pol(0, 1);
  EventStream out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({Nanos{static_cast<std::int64_t>(i) * 1000}, static_cast<std::uint16_t>(xs(rng)),
                   static_cast<std::uint16_t>(ys(rng)), static_cast<std::int8_t>(pol(rng) ? 1 : -1)});
  return out;
}

} // namespace

TEST_CASE("signed_contribution") {
  const Event neg{Nanos{0}, 0, 0, -1};
  const Event pos{Nanos{0}, 0, 0, 1};
  CHECK(signed_contribution(neg, PolarityMode::Rectified, 0.2) == 0.2);
  CHECK(signed_contribution(neg, PolarityMode::Signed, 0.2) == -0.2);
  CHECK(signed_contribution(pos, PolarityMode::Signed, 1.0) == 1.0);
}

TEST_CASE("integrate_event examples") {
  const SensorGeometry g{4, 4};
  std::vector<double> px(16, 0.0);
  const Event e{Nanos{0}, 1, 2, 1};
  integrate_event(px, g, e, PolarityMode::Rectified, 0.5);
  integrate_event(px, g, e, PolarityMode::Rectified, 0.5);
  CHECK(px[2 * 4 + 1] == 1.0);
  CHECK(quantize_value(px[2 * 4 + 1], 8) == 255);
  CHECK(std::count(px.begin(), px.end(), 0.0) == 15);

  std::vector<double> mid(16, 0.5);
  integrate_event(mid, g, {Nanos{0}, 0, 0, -1}, PolarityMode::Signed, 0.2);
  CHECK(mid[0] == doctest::Approx(0.3).epsilon(1e-15));

  std::vector<double> high(16, 0.9);
  integrate_event(high, g, {Nanos{0}, 3, 3, 1}, PolarityMode::Rectified, 0.5);
  CHECK(high[15] == 1.0);

  std::vector<double> low(16, 0.1);
  integrate_event(low, g, {Nanos{0}, 3, 3, -1}, PolarityMode::Signed, 0.5);
  CHECK(low[15] == 0.0);
}

TEST_CASE("integrate_event rejects out-of-bounds events") {
  const SensorGeometry g{4, 4};
  std::vector<double> px(16, 0.0);
  for (const Event e : {Event{Nanos{0}, 4, 0, 1}, Event{Nanos{0}, 0, 4, 1}}) {
    try {
      integrate_event(px, g, e, PolarityMode::Rectified, 0.5);
      FAIL("expected OutOfBounds");
    } catch (const Error &err) {
      CHECK(err.code() == ErrorCode::OutOfBounds);
    }
  }
}

TEST_CASE("apply_decay analytics") {
  std::vector<double> v{1.0};
  apply_decay(v, 0.25, ExponentialDecay{0.25}, 0.0);
  CHECK(std::abs(v[0] - std::exp(-1.0)) < 1e-12);
  CHECK(std::abs(v[0] - 0.367879441171) < 1e-9);

  std::vector<double> lin{0.8};
  apply_decay(lin, 0.1, LinearDecay{1.0}, 0.5);
  CHECK(lin[0] == doctest::Approx(0.7).epsilon(1e-12));
  lin = {0.8};
  apply_decay(lin, 1.0, LinearDecay{1.0}, 0.5);
  CHECK(lin[0] == 0.5);
  lin = {0.2};
  apply_decay(lin, 1.0, LinearDecay{1.0}, 0.5);
  CHECK(lin[0] == 0.5);

  std::vector<double> step{0.3, 0.9};
  apply_decay(step, 100.0, StepDecay{}, 0.0);
  CHECK(step == std::vector<double>{0.3, 0.9});

  CHECK_THROWS_AS(apply_decay(step, -1.0, LinearDecay{1.0}, 0.0), Error);
}

TEST_CASE("exponential decay never crosses neutral") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const double neutral = unit(rng) < 0.5 ? 0.0 : 0.5;
    std::vector<double> v{unit(rng)};
    const double before = v[0] - neutral;
    apply_decay(v, 10.0 * unit(rng), ExponentialDecay{0.01 + unit(rng)}, neutral);
    const double after = v[0] - neutral;
    CHECK(after * before >= 0.0);
    CHECK(std::abs(after) <= std::abs(before));
    CHECK(v[0] >= 0.0);
    CHECK(v[0] <= 1.0);
  }
}

TEST_CASE("reset_frame") {
  const auto r = reset_frame({4, 4}, PolarityMode::Rectified);
  CHECK(r.size() == 16);
  CHECK(std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; }));
  const auto s = reset_frame({4, 4}, PolarityMode::Signed);
  CHECK(std::all_of(s.begin(), s.end(), [](double v) { return v == 0.5; }));
  EventFrame f{{4, 4, 8}, s};
  const auto q = quantize_frame(f, 8);
  CHECK(std::all_of(q.begin(), q.end(), [](std::uint16_t v) { return v == 128; }));
}

TEST_CASE("accumulate_slice examples") {
  AccumulatorCarry carry;
  const auto cfg = step_config(PolarityMode::Rectified, 0.33);
  const auto empty = accumulate_slice(make_slice({}, Nanos{10}), cfg, kSpec, carry);
  CHECK(fill_ratio(empty) == 0.0);
  CHECK_FALSE(empty.held);
  CHECK(empty.stamp == Nanos{10});

  const auto one = accumulate_slice(make_slice({{Nanos{1}, 2, 3, -1}}, Nanos{20}), cfg, kSpec, carry);
  CHECK(one.at(2, 3) == 0.33);
  CHECK(fill_ratio(one) == doctest::Approx(1.0 / 48.0));

  std::mt19937_64 rng(4);
  const auto events = random_events(rng, 200, kSpec);
  AccumulatorCarry c1, c2;
  const auto a = accumulate_slice(make_slice(events, Nanos{1'000'000}), cfg, kSpec, c1);
  const auto b = accumulate_slice(make_slice(events, Nanos{1'000'000}), cfg, kSpec, c2);
  CHECK(a.pixels == b.pixels);
}

TEST_CASE("accumulate_slice rejects unordered slices") {
  AccumulatorCarry carry;
  const auto slice = make_slice({{Nanos{5}, 0, 0, 1}, {Nanos{4}, 0, 0, 1}}, Nanos{10});
  CHECK_THROWS_AS(accumulate_slice(slice, step_config(PolarityMode::Rectified, 0.2), kSpec, carry), Error);
}

TEST_CASE("step decay frames are memoryless") {
  std::mt19937_64 rng(8);
  const auto cfg = step_config(PolarityMode::Signed, 0.2);
  const auto probe = random_events(rng, 100, kSpec);
  AccumulatorCarry fresh;
  const auto reference = accumulate_slice(make_slice(probe, Nanos{1'000'000'000}), cfg, kSpec, fresh).pixels;
  for (int round = 0; round < 25; ++round) {
    Accumulator acc(cfg, kSpec);
    const auto history = rng() % 5;
    for (std::size_t h = 0; h < history; ++h)
      acc.process(make_slice(random_events(rng, rng() % 300, kSpec), Nanos{static_cast<std::int64_t>(h + 1)}));
    CHECK(acc.process(make_slice(probe, Nanos{1'000'000'000})).pixels == reference);
  }
}

TEST_CASE("rectified accumulation is polarity blind") {
  std::mt19937_64 rng(12);
  const auto cfg = step_config(PolarityMode::Rectified, 0.1);
  for (int round = 0; round < 20; ++round) {
    auto events = random_events(rng, 300, kSpec);
    auto flipped = events;
    for (auto &e : flipped)
      e.p = static_cast<std::int8_t>(-e.p);
    AccumulatorCarry c1, c2;
    CHECK(accumulate_slice(make_slice(events, Nanos{1}), cfg, kSpec, c1).pixels ==
          accumulate_slice(make_slice(flipped, Nanos{1}), cfg, kSpec, c2).pixels);
  }
}

TEST_CASE("signed accumulation reflects about neutral when polarities flip") {
  std::mt19937_64 rng(13);
  // c = 1/16 is exact in binary and 7 events per pixel cannot reach a bound
  const auto cfg = step_config(PolarityMode::Signed, 1.0 / 16.0);
  for (int round = 0; round < 20; ++round) {
    EventStream events;
    std::vector<int> per_pixel(48, 0);
    for (const auto &e : random_events(rng, 400, kSpec)) {
      auto &n = per_pixel[e.y * kSpec.width + e.x];
      if (n < 7) {
        ++n;
        events.push_back(e);
      }
    }
    auto flipped = events;
    for (auto &e : flipped)
      e.p = static_cast<std::int8_t>(-e.p);
    AccumulatorCarry c1, c2;
    const auto a = accumulate_slice(make_slice(events, Nanos{1}), cfg, kSpec, c1);
    const auto b = accumulate_slice(make_slice(flipped, Nanos{1}), cfg, kSpec, c2);
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
      CHECK(a.pixels[i] == 1.0 - b.pixels[i]);
  }
}

TEST_CASE("rectified accumulation is order independent without saturation") {
  std::mt19937_64 rng(14);
  const auto cfg = step_config(PolarityMode::Rectified, 1.0 / 32.0);
  for (int round = 0; round < 20; ++round) {
    auto events = random_events(rng, 200, kSpec); // at most ~200/48 hits per pixel on average
    auto shuffled = events;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t i = 0; i < shuffled.size(); ++i)
      shuffled[i].t = events[i].t; // keep the slice time ordered
    AccumulatorCarry c1, c2;
    const auto a = accumulate_slice(make_slice(events, Nanos{1'000'000}), cfg, kSpec, c1);
    const auto b = accumulate_slice(make_slice(shuffled, Nanos{1'000'000}), cfg, kSpec, c2);
    if (*std::max_element(a.pixels.begin(), a.pixels.end()) < 1.0)
      CHECK(a.pixels == b.pixels);
  }
}

TEST_CASE("pixels stay in [0, 1] under every decay mode") {
  std::mt19937_64 rng(15);
  for (const Decay decay : {Decay{StepDecay{}}, Decay{LinearDecay{5.0}}, Decay{ExponentialDecay{0.05}}}) {
    for (const auto mode : {PolarityMode::Rectified, PolarityMode::Signed}) {
      auto cfg = step_config(mode, 0.7);
      cfg.decay = decay;
      Accumulator acc(cfg, kSpec);
      for (int k = 1; k <= 20; ++k) {
        auto events = random_events(rng, 500, kSpec);
        for (auto &e : events)
          e.t += Nanos{static_cast<std::int64_t>(k) * 1'000'000};
        const auto f = acc.process(make_slice(events, Nanos{static_cast<std::int64_t>(k + 1) * 1'000'000}));
        CHECK(std::all_of(f.pixels.begin(), f.pixels.end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
      }
    }
  }
}

TEST_CASE("persistent decay integrates overlapping events once") {
  auto cfg = step_config(PolarityMode::Rectified, 0.25);
  cfg.decay = LinearDecay{1e-6};
  Accumulator acc(cfg, kSpec);
  const Event e1{Nanos{100}, 1, 1, 1};
  const Event e2{Nanos{200}, 1, 1, 1};
  acc.process(make_slice({e1}, Nanos{150}));
  // the second slice repeats e1, as ByTimeAndNumber does at low event rates
  const auto f = acc.process(make_slice({e1, e2}, Nanos{250}));
  CHECK(f.at(1, 1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("exponential accumulator decays toward neutral between frames") {
  auto cfg = step_config(PolarityMode::Signed, 0.4);
  cfg.decay = ExponentialDecay{0.1};
  Accumulator acc(cfg, kSpec);
  const auto f1 = acc.process(make_slice({{Nanos{0}, 2, 2, 1}}, from_seconds(0.1)));
  CHECK(f1.at(2, 2) == doctest::Approx(0.5 + 0.4 * std::exp(-1.0)).epsilon(1e-12));
  const auto f2 = acc.process(make_slice({}, from_seconds(0.2)));
  CHECK(f2.at(2, 2) == doctest::Approx(0.5 + 0.4 * std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("hold_previous") {
  auto cfg = step_config(PolarityMode::Rectified, 0.5);
  cfg.no_motion_threshold = 200;
  Accumulator acc(cfg, kSpec);
  std::mt19937_64 rng(16);
  const auto moving = acc.process(make_slice(random_events(rng, 300, kSpec), Nanos{10}, 300));
  CHECK_FALSE(moving.held);
  const auto h1 = acc.process(make_slice(random_events(rng, 20, kSpec), Nanos{20}, 20));
  const auto h2 = acc.process(make_slice(random_events(rng, 20, kSpec), Nanos{30}, 150));
  CHECK(h1.held);
  CHECK(h2.held);
  CHECK(h1.stamp == Nanos{20});
  CHECK(h2.stamp == Nanos{30});
  CHECK(h1.pixels == moving.pixels);
  CHECK(h2.pixels == moving.pixels);
  CHECK(quantize_frame(h2) == quantize_frame(moving));

  const auto resumed = acc.process(make_slice(random_events(rng, 300, kSpec), Nanos{40}, 200));
  CHECK_FALSE(resumed.held);
}

TEST_CASE("hold at stream start yields a flagged neutral frame") {
  auto cfg = step_config(PolarityMode::Signed, 0.5);
  cfg.no_motion_threshold = 200;
  Accumulator acc(cfg, kSpec);
  const auto f = acc.process(make_slice({{Nanos{1}, 0, 0, 1}}, Nanos{10}, 1));
  CHECK(f.held);
  CHECK(std::all_of(f.pixels.begin(), f.pixels.end(), [](double v) { return v == 0.5; }));
}

TEST_CASE("signed and rectified frames around a direction reversal") {
  const SensorGeometry g{48, 8};
  const auto scene = SyntheticScene::step_edge(g, 0.6, 16);
  const auto motion = MotionProfile::constant(40.0, 0.0, 0.25).then(-40.0, 0.0, 0.25);
  const auto events = generate_events(scene, motion, SensorModel{0.2, 0.0, 0}, 1e-3);
  const FrameSpec spec{g.width, g.height, 8};
  for (const auto mode : {PolarityMode::Signed, PolarityMode::Rectified}) {
    AccumulatorConfig cfg = step_config(mode, 0.2);
    cfg.window_size = 48;
    cfg.interval = 0.05;
    const auto run = run_slices(events, cfg, spec, Nanos{0});
    // frame 3 ends at 0.15 s (forward), frame 8 at 0.4 s (backward)
    const auto &fwd = run.frames.at(2);
    const auto &back = run.frames.at(7);
    for (const auto *f : {&fwd, &back}) {
      for (double v : f->pixels) {
        if (v == f->neutral)
          continue;
        if (mode == PolarityMode::Rectified)
          CHECK(v > 0.0);
        else if (f == &fwd)
          CHECK(v > 0.5);
        else
          CHECK(v < 0.5);
      }
    }
  }
}
