#include "evframe/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace evframe;
namespace fs = std::filesystem;

namespace {

ErrorCode parse_error(const std::string &line) {
  try {
    parse_event_line(line, 7);
  } catch (const Error &e) {
    CHECK(std::string(e.what()).rfind("line 7: ", 0) == 0);
    return e.code();
  }
  FAIL("no error for '" << line << "'");
  return ErrorCode::Io;
}

ErrorCode read_error(const std::string &text, SensorGeometry g = {240, 180}) {
  std::istringstream in(text);
  EventReader reader(in, g);
  try {
    while (reader.next()) {
    }
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error reading stream");
  return ErrorCode::Io;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("evframe_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("parse_event_line examples") {
  const auto a = parse_event_line("0.000123 10 20 1");
  CHECK(a.t == Nanos{123'000});
  CHECK(a.x == 10);
  CHECK(a.y == 20);
  CHECK(a.p == 1);
  const auto b = parse_event_line("1.5 0 0 0");
  CHECK(b.t == Nanos{1'500'000'000});
  CHECK(b.p == -1);
  CHECK(parse_event_line("  2.000000001\t3  4 1\r").t == Nanos{2'000'000'001});
  CHECK(parse_event_line("12 3 4 1").t == Nanos{12'000'000'000});
  CHECK(parse_event_line("1e-3 3 4 1").t == Nanos{1'000'000});
}

TEST_CASE("parse_event_line errors") {
  CHECK(parse_error("0.1 1 1 2") == ErrorCode::InvalidPolarity);
  CHECK(parse_error("0.1 1 1 -1") == ErrorCode::InvalidPolarity);
  CHECK(parse_error("0.1 1 1") == ErrorCode::MalformedField);
  CHECK(parse_error("0.1 1 1 1 1") == ErrorCode::MalformedField);
  CHECK(parse_error("abc 1 1 1") == ErrorCode::MalformedField);
  CHECK(parse_error("0.1 x 1 1") == ErrorCode::MalformedField);
  CHECK(parse_error("0.1 1 1 yes") == ErrorCode::MalformedField);
  CHECK(parse_error("-0.5 1 1 1") == ErrorCode::NegativeTimestamp);
}

TEST_CASE("format and parse round-trip") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::int64_t> ts(0, 4'000'000'000'000LL);
  for (int i = 0; i < 2000; ++i) {
    const Event e{Nanos{ts(rng)}, static_cast<std::uint16_t>(rng() % 640), static_cast<std::uint16_t>(rng() % 480),
                  static_cast<std::int8_t>(rng() % 2 ? 1 : -1)};
    CHECK(parse_event_line(format_event_line(e)) == e);
  }
  CHECK(format_event_line({Nanos{1'500'000'000}, 3, 4, -1}) == "1.500000000 3 4 0");
}

TEST_CASE("stream reader validation") {
  CHECK(read_error("0.1 1 1 1\n0.05 1 1 1\n") == ErrorCode::NonMonotonic);
  CHECK(read_error("0.1 240 1 1\n", {240, 180}) == ErrorCode::OutOfBounds);
  CHECK(read_error("0.1 1 180 1\n", {240, 180}) == ErrorCode::OutOfBounds);
  CHECK(read_error("0.1 1 1 1\nbad line\n") == ErrorCode::MalformedField);

  std::istringstream in("0.1 1 1 1\n0.05 1 1 1\n");
  EventReader reader(in, {240, 180});
  reader.next();
  try {
    reader.next();
  } catch (const Error &e) {
    const std::string what = e.what();
    CHECK(what.find("line 2") != std::string::npos);
    CHECK(what.find("0.050000000") != std::string::npos);
    CHECK(what.find("0.100000000") != std::string::npos);
  }

  std::istringstream ok("# comment\n\n0.1 1 1 1\n0.1 2 1 0\n");
  EventReader r2(ok, {4, 4});
  std::vector<Event> batch;
  CHECK(r2.next_batch(batch, 10));
  CHECK(batch.size() == 2);
  CHECK_FALSE(r2.next_batch(batch, 10));
}

TEST_CASE("event file round-trip of 100k events") {
  TempDir dir;
  std::mt19937_64 rng(5);
  EventStream events;
  std::int64_t t = 0;
  for (int i = 0; i < 100000; ++i) {
    t += static_cast<std::int64_t>(rng() % 20000);
    events.push_back({Nanos{t}, static_cast<std::uint16_t>(rng() % 240), static_cast<std::uint16_t>(rng() % 180),
                      static_cast<std::int8_t>(rng() % 2 ? 1 : -1)});
  }
  const auto path = dir.path / "events.txt";
  write_stream(path, events);
  CHECK(read_stream(path, {240, 180}) == events);
  CHECK_THROWS_AS(read_stream(dir.path / "missing.txt", {240, 180}), Error);
}

TEST_CASE("PGM golden bytes") {
  std::ostringstream out;
  write_pgm(out, Raster{{2, 2, 8}, {0, 255, 128, 0}});
  const std::string expected = std::string("P5\n2 2\n255\n") + '\x00' + '\xff' + '\x80' + '\x00';
  CHECK(out.str() == expected);

  std::ostringstream out16;
  write_pgm(out16, Raster{{2, 1, 16}, {0x1234, 65535}});
  const std::string expected16 = std::string("P5\n2 1\n65535\n") + '\x12' + '\x34' + '\xff' + '\xff';
  CHECK(out16.str() == expected16);
}

TEST_CASE("PGM round-trip") {
  TempDir dir;
  std::mt19937_64 rng(9);
  for (int depth : {8, 16}) {
    Raster r{{13, 7, depth}, std::vector<std::uint16_t>(13 * 7)};
    for (auto &v : r.pixels)
      v = static_cast<std::uint16_t>(rng() % (depth == 8 ? 256 : 65536));
    const auto path = dir.path / ("r" + std::to_string(depth) + ".pgm");
    write_pgm(path, r);
    const auto back = read_pgm(path);
    CHECK(back.spec.width == 13);
    CHECK(back.spec.height == 7);
    CHECK(back.spec.bit_depth == depth);
    CHECK(back.pixels == r.pixels);
  }
}

TEST_CASE("frame writer output and index") {
  TempDir dir;
  FrameWriter writer(dir.path / "frames", 8);
  EventFrame a{{2, 2, 8}, {0.0, 1.0, 0.5, 0.0}};
  a.stamp = Nanos{33'333'333};
  EventFrame b = a;
  b.stamp = Nanos{66'666'667};
  b.held = true;
  writer.write(a);
  writer.write(b);
  writer.finish();
  CHECK(fs::exists(dir.path / "frames" / "frame_000000.pgm"));
  CHECK(fs::exists(dir.path / "frames" / "frame_000001.pgm"));
  CHECK(slurp(dir.path / "frames" / "frame_000000.pgm") == slurp(dir.path / "frames" / "frame_000001.pgm"));
  CHECK(read_pgm(dir.path / "frames" / "frame_000000.pgm").pixels == std::vector<std::uint16_t>{0, 255, 128, 0});
  CHECK(slurp(dir.path / "frames" / "index.csv") ==
        "stamp,filename,held\n0.033333333,frame_000000.pgm,0\n0.066666667,frame_000001.pgm,1\n");

  CHECK_THROWS_AS(FrameWriter(dir.path / "x", 12), Error);

  FrameWriter deep(dir.path / "deep", 16);
  deep.write(a);
  CHECK(read_pgm(dir.path / "deep" / "frame_000000.pgm").pixels == std::vector<std::uint16_t>{0, 65535, 32768, 0});
}
