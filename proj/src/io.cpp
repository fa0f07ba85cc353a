#include "evframe/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace evframe {

namespace {

std::string at_line(std::size_t line_number) {
  return line_number > 0 ? "line " + std::to_string(line_number) + ": " : std::string{};
}

[[noreturn]] void fail(ErrorCode code, std::size_t line_number, const std::string &what) {
  throw Error(code, at_line(line_number) + what);
}

bool all_digits(std::string_view s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (c < '0' || c > '9')
      return false;
  return true;
}

// Plain decimals ("12.000345678") are converted digit by digit so that nine
// fractional digits survive exactly. Anything else goes through from_chars.
Nanos parse_timestamp(std::string_view token, std::size_t line_number) {
  if (!token.empty() && token.front() == '-') {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      fail(ErrorCode::MalformedField, line_number, "malformed timestamp '" + std::string(token) + "'");
    if (value < 0.0)
      fail(ErrorCode::NegativeTimestamp, line_number, "negative timestamp '" + std::string(token) + "'");
    return Nanos{0};
  }

  const auto dot = token.find('.');
  const auto whole = token.substr(0, dot);
  const auto frac = dot == std::string_view::npos ? std::string_view{} : token.substr(dot + 1);
  const bool plain = all_digits(whole) && (dot == std::string_view::npos || frac.empty() || all_digits(frac)) &&
                     whole.size() <= 9;
  if (plain) {
    std::int64_t seconds = 0;
    std::from_chars(whole.data(), whole.data() + whole.size(), seconds);
    std::int64_t nanos = 0;
    for (std::size_t i = 0; i < 9; ++i)
      nanos = nanos * 10 + (i < frac.size() ? frac[i] - '0' : 0);
    if (frac.size() > 9 && frac[9] >= '5')
      ++nanos;
    return Nanos{seconds * 1'000'000'000 + nanos};
  }

  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value))
    fail(ErrorCode::MalformedField, line_number, "malformed timestamp '" + std::string(token) + "'");
  return from_seconds(value);
}

std::uint16_t parse_coordinate(std::string_view token, std::size_t line_number, const char *name) {
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value > 65535)
    fail(ErrorCode::MalformedField, line_number, std::string("malformed ") + name + " '" + std::string(token) + "'");
  return static_cast<std::uint16_t>(value);
}

} // namespace

Event parse_event_line(std::string_view line, std::size_t line_number) {
  std::array<std::string_view, 4> tokens;
  std::size_t count = 0;
  std::size_t pos = 0;
  while (true) {
    pos = line.find_first_not_of(" \t\r\n", pos);
    if (pos == std::string_view::npos)
      break;
    const auto end = line.find_first_of(" \t\r\n", pos);
    if (count == tokens.size())
      fail(ErrorCode::MalformedField, line_number, "expected 4 fields 't x y p', found more");
    tokens[count++] = line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (end == std::string_view::npos)
      break;
    pos = end;
  }
  if (count != tokens.size())
    fail(ErrorCode::MalformedField, line_number, "expected 4 fields 't x y p', found " + std::to_string(count));

  Event e;
  e.t = parse_timestamp(tokens[0], line_number);
  e.x = parse_coordinate(tokens[1], line_number, "x");
  e.y = parse_coordinate(tokens[2], line_number, "y");

  int polarity = 0;
  const auto ptok = tokens[3];
  const auto [ptr, ec] = std::from_chars(ptok.data(), ptok.data() + ptok.size(), polarity);
  if (ec != std::errc{} || ptr != ptok.data() + ptok.size())
    fail(ErrorCode::MalformedField, line_number, "malformed polarity '" + std::string(ptok) + "'");
  if (polarity != 0 && polarity != 1)
    fail(ErrorCode::InvalidPolarity, line_number, "polarity must be 0 or 1, got " + std::string(ptok));
  e.p = polarity == 1 ? 1 : -1;
  return e;
}

std::string format_seconds(Nanos t) {
  const auto ns = t.count();
  char buf[48];
  const auto whole = ns / 1'000'000'000;
  const auto frac = ns % 1'000'000'000;
  std::snprintf(buf, sizeof buf, "%lld.%09lld", static_cast<long long>(whole), static_cast<long long>(frac));
  return buf;
}

std::string format_event_line(const Event &event) {
  return format_seconds(event.t) + ' ' + std::to_string(event.x) + ' ' + std::to_string(event.y) + ' ' +
         (event.p > 0 ? '1' : '0');
}

EventReader::EventReader(std::istream &in, SensorGeometry geometry) : in_(&in), geometry_(geometry) {}

EventReader::EventReader(const std::filesystem::path &path, SensorGeometry geometry)
    : file_(std::in_place, path), in_(nullptr), geometry_(geometry) {
  if (!*file_)
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  in_ = &*file_;
}

std::optional<Event> EventReader::next() {
  while (std::getline(*in_, line_)) {
    ++line_number_;
    const auto first = line_.find_first_not_of(" \t\r");
    if (first == std::string::npos || line_[first] == '#')
      continue;
    const Event e = parse_event_line(line_, line_number_);
    if (!geometry_.contains(e))
      fail(ErrorCode::OutOfBounds, line_number_,
           "event at (" + std::to_string(e.x) + ", " + std::to_string(e.y) + ") is outside the " +
               std::to_string(geometry_.width) + "x" + std::to_string(geometry_.height) + " sensor");
    if (last_t_ && e.t < *last_t_)
      fail(ErrorCode::NonMonotonic, line_number_,
           "timestamp " + format_seconds(e.t) + " follows later timestamp " + format_seconds(*last_t_));
    last_t_ = e.t;
    return e;
  }
  if (in_->bad())
    throw Error(ErrorCode::Io, "read failure after line " + std::to_string(line_number_));
  return std::nullopt;
}

bool EventReader::next_batch(std::vector<Event> &out, std::size_t max_events) {
  out.clear();
  while (out.size() < max_events) {
    auto e = next();
    if (!e)
      return !out.empty();
    out.push_back(*e);
  }
  return true;
}

EventStream read_stream(const std::filesystem::path &path, const SensorGeometry &geometry) {
  EventReader reader(path, geometry);
  EventStream events;
  while (auto e = reader.next())
    events.push_back(*e);
  return events;
}

void write_stream(std::ostream &out, std::span<const Event> events) {
  for (const auto &e : events)
    out << format_event_line(e) << '\n';
  if (!out)
    throw Error(ErrorCode::Io, "failed writing event stream");
}

void write_stream(const std::filesystem::path &path, std::span<const Event> events) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_stream(out, events);
}

void write_pgm(std::ostream &out, const Raster &raster) {
  validate(raster.spec);
  if (raster.pixels.size() != raster.spec.geometry().area())
    throw Error(ErrorCode::InvalidConfig, "raster size does not match its geometry");
  const unsigned max_value = (1u << raster.spec.bit_depth) - 1u;
  out << "P5\n" << raster.spec.width << ' ' << raster.spec.height << '\n' << max_value << '\n';
  std::vector<char> payload;
  if (raster.spec.bit_depth == 8) {
    payload.reserve(raster.pixels.size());
    for (auto v : raster.pixels)
      payload.push_back(static_cast<char>(static_cast<std::uint8_t>(std::min<unsigned>(v, max_value))));
  } else {
    payload.reserve(2 * raster.pixels.size());
    for (auto v : raster.pixels) {
      payload.push_back(static_cast<char>(v >> 8));
      payload.push_back(static_cast<char>(v & 0xff));
    }
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out)
    throw Error(ErrorCode::Io, "failed writing PGM");
}

void write_pgm(const std::filesystem::path &path, const Raster &raster) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_pgm(out, raster);
}

Raster read_pgm(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string magic;
  unsigned width = 0, height = 0, max_value = 0;
  in >> magic >> width >> height >> max_value;
  if (!in || magic != "P5" || (max_value != 255 && max_value != 65535))
    throw Error(ErrorCode::MalformedField, path.string() + " is not an 8 or 16 bit binary PGM");
  in.get(); // single whitespace after maxval
  Raster raster;
  raster.spec = {static_cast<int>(width), static_cast<int>(height), max_value == 255 ? 8 : 16};
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const std::size_t bytes = max_value == 255 ? n : 2 * n;
  std::vector<unsigned char> payload(bytes);
  in.read(reinterpret_cast<char *>(payload.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes)
    throw Error(ErrorCode::MalformedField, path.string() + " is truncated");
  raster.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    raster.pixels[i] = max_value == 255 ? payload[i]
                                        : static_cast<std::uint16_t>((payload[2 * i] << 8) | payload[2 * i + 1]);
  return raster;
}

void write_frame_index(std::ostream &out, std::span<const FrameIndexEntry> entries) {
  out << "stamp,filename,held\n";
  for (const auto &e : entries)
    out << format_seconds(e.stamp) << ',' << e.filename << ',' << (e.held ? 1 : 0) << '\n';
  if (!out)
    throw Error(ErrorCode::Io, "failed writing frame index");
}

void write_frame_index(const std::filesystem::path &path, std::span<const FrameIndexEntry> entries) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_frame_index(out, entries);
}

FrameWriter::FrameWriter(std::filesystem::path directory, int bit_depth)
    : directory_(std::move(directory)), bit_depth_(bit_depth) {
  if (bit_depth_ != 8 && bit_depth_ != 16)
    throw Error(ErrorCode::UnsupportedBitDepth, "bit depth must be 8 or 16");
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec)
    throw Error(ErrorCode::Io, "cannot create " + directory_.string() + ": " + ec.message());
}

void FrameWriter::write(const EventFrame &frame) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06zu.pgm", index_.size());
  Raster raster{{frame.spec.width, frame.spec.height, bit_depth_}, quantize_frame(frame, bit_depth_)};
  write_pgm(directory_ / name, raster);
  index_.push_back({frame.stamp, name, frame.held});
}

void FrameWriter::finish() { write_frame_index(directory_ / "index.csv", index_); }

} // namespace evframe
