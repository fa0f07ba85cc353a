#pragma once

#include "evframe/core.hpp"

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace evframe {

/// Parses one "t x y p" line of the Event Camera Dataset text format. The
/// timestamp is read exactly to nanosecond resolution; p=1 maps to +1 and
/// p=0 to -1. Errors carry the line number.
Event parse_event_line(std::string_view line, std::size_t line_number = 0);

/// Inverse of parse_event_line, with nine fractional digits.
std::string format_event_line(const Event &event);

/// Streams events from a text source, validating ordering and geometry as it
/// goes. Memory use does not depend on the length of the source. Blank lines
/// and lines starting with '#' are skipped.
class EventReader {
public:
  EventReader(std::istream &in, SensorGeometry geometry);
  explicit EventReader(const std::filesystem::path &path, SensorGeometry geometry);

  std::optional<Event> next();
  /// Reads up to `max_events` into `out` (cleared first). Returns false at end of input.
  bool next_batch(std::vector<Event> &out, std::size_t max_events);

  std::size_t line_number() const { return line_number_; }

private:
  std::optional<std::ifstream> file_;
  std::istream *in_;
  SensorGeometry geometry_;
  std::string line_;
  std::size_t line_number_ = 0;
  std::optional<Nanos> last_t_;
};

EventStream read_stream(const std::filesystem::path &path, const SensorGeometry &geometry);
void write_stream(std::ostream &out, std::span<const Event> events);
void write_stream(const std::filesystem::path &path, std::span<const Event> events);

struct Raster {
  FrameSpec spec;
  std::vector<std::uint16_t> pixels;
};

/// Binary PGM (P5), maxval 2^bit_depth - 1, rows top to bottom. 16-bit
/// samples are big-endian as the format requires.
void write_pgm(std::ostream &out, const Raster &raster);
void write_pgm(const std::filesystem::path &path, const Raster &raster);
Raster read_pgm(const std::filesystem::path &path);

struct FrameIndexEntry {
  Nanos stamp{0};
  std::string filename;
  bool held = false;
};

/// CSV "stamp,filename,held", one row per frame in publish order.
void write_frame_index(std::ostream &out, std::span<const FrameIndexEntry> entries);
void write_frame_index(const std::filesystem::path &path, std::span<const FrameIndexEntry> entries);

std::string format_seconds(Nanos t);

/// Writes frame_%06d.pgm files into a directory and keeps the index.
class FrameWriter {
public:
  FrameWriter(std::filesystem::path directory, int bit_depth);

  void write(const EventFrame &frame);
  /// Writes index.csv next to the frames.
  void finish();

  const std::vector<FrameIndexEntry> &index() const { return index_; }

private:
  std::filesystem::path directory_;
  int bit_depth_;
  std::vector<FrameIndexEntry> index_;
};

} // namespace evframe
