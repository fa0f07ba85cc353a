#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "evframe/accumulator.hpp"
#include "evframe/eval.hpp"
#include "evframe/io.hpp"
#include "evframe/pipeline.hpp"
#include "evframe/presets.hpp"
#include "evframe/slicer.hpp"
#include "evframe/synth.hpp"

namespace py = pybind11;
using namespace evframe;

namespace {

py::array_t<double> frame_pixels(const EventFrame &f) {
  py::array_t<double> out({f.spec.height, f.spec.width});
  std::copy(f.pixels.begin(), f.pixels.end(), out.mutable_data());
  return out;
}

std::vector<double> to_pixels(const py::array_t<double, py::array::c_style | py::array::forcecast> &a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

std::optional<Nanos> optional_seconds(std::optional<double> t) {
  return t ? std::optional<Nanos>(from_seconds(*t)) : std::nullopt;
}

} // namespace

PYBIND11_MODULE(_evframe, m) {
  m.doc() = "Event-camera stream slicing, frame accumulation and synthetic event generation";

  py::register_exception<Error>(m, "EvframeError", PyExc_ValueError);

  py::class_<Event>(m, "Event")
      .def(py::init([](double t, int x, int y, int p) {
             if (p != 1 && p != -1)
               throw Error(ErrorCode::InvalidPolarity, "polarity must be +1 or -1");
             if (x < 0 || y < 0 || x > 65535 || y > 65535)
               throw Error(ErrorCode::OutOfBounds, "coordinates must be in [0, 65535]");
             return Event{from_seconds(t), static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                          static_cast<std::int8_t>(p)};
           }),
           py::arg("t"), py::arg("x"), py::arg("y"), py::arg("p"))
      .def_property_readonly("t", [](const Event &e) { return to_seconds(e.t); })
      .def_property_readonly("t_ns", [](const Event &e) { return e.t.count(); })
      .def_readonly("x", &Event::x)
      .def_readonly("y", &Event::y)
      .def_property_readonly("p", [](const Event &e) { return static_cast<int>(e.p); })
      .def(py::self == py::self)
      .def("__repr__", [](const Event &e) { return "Event(" + format_event_line(e) + ")"; });

  py::class_<SensorGeometry>(m, "SensorGeometry")
      .def(py::init<int, int>(), py::arg("width"), py::arg("height"))
      .def_readwrite("width", &SensorGeometry::width)
      .def_readwrite("height", &SensorGeometry::height);
  m.def("parse_geometry", &parse_geometry);

  py::class_<FrameSpec>(m, "FrameSpec")
      .def(py::init<int, int, int>(), py::arg("width"), py::arg("height"), py::arg("bit_depth") = 8)
      .def_readwrite("width", &FrameSpec::width)
      .def_readwrite("height", &FrameSpec::height)
      .def_readwrite("bit_depth", &FrameSpec::bit_depth);

  py::class_<EventFrame>(m, "EventFrame")
      .def_readonly("spec", &EventFrame::spec)
      .def_property_readonly("pixels", &frame_pixels)
      .def_property_readonly("stamp", [](const EventFrame &f) { return to_seconds(f.stamp); })
      .def_readonly("held", &EventFrame::held)
      .def_readonly("neutral", &EventFrame::neutral);

  py::enum_<SliceMethod>(m, "SliceMethod")
      .value("ByNumber", SliceMethod::ByNumber)
      .value("ByTime", SliceMethod::ByTime)
      .value("ByTimeAndNumber", SliceMethod::ByTimeAndNumber);
  py::enum_<PolarityMode>(m, "PolarityMode")
      .value("Rectified", PolarityMode::Rectified)
      .value("Signed", PolarityMode::Signed);

  py::class_<StepDecay>(m, "StepDecay").def(py::init<>());
  py::class_<LinearDecay>(m, "LinearDecay")
      .def(py::init<double>(), py::arg("rate") = 1.0)
      .def_readwrite("rate", &LinearDecay::rate);
  py::class_<ExponentialDecay>(m, "ExponentialDecay")
      .def(py::init<double>(), py::arg("tau") = 0.1)
      .def_readwrite("tau", &ExponentialDecay::tau);

  py::class_<AccumulatorConfig>(m, "AccumulatorConfig")
      .def(py::init<>())
      .def_readwrite("slice_method", &AccumulatorConfig::slice_method)
      .def_readwrite("window_size", &AccumulatorConfig::window_size)
      .def_readwrite("interval", &AccumulatorConfig::interval)
      .def_readwrite("contribution", &AccumulatorConfig::contribution)
      .def_readwrite("polarity_mode", &AccumulatorConfig::polarity_mode)
      .def_readwrite("decay", &AccumulatorConfig::decay)
      .def_readwrite("no_motion_threshold", &AccumulatorConfig::no_motion_threshold)
      .def("validate", [](const AccumulatorConfig &c) { validate(c); })
      .def("__repr__", [](const AccumulatorConfig &c) { return "AccumulatorConfig(" + describe(c) + ")"; });

  m.def("preset", [](const std::string &name) { return preset(name); });
  m.def("preset_names", &preset_names);
  m.def("neutral_value", &neutral_value);
  m.def("window_size_for", &window_size_for, py::arg("events_per_pixel"), py::arg("geometry"));
  m.def(
      "quantize_frame",
      [](const EventFrame &f, int bit_depth) {
        const auto raster = quantize_frame(f, bit_depth);
        py::array_t<std::uint16_t> out({f.spec.height, f.spec.width});
        std::copy(raster.begin(), raster.end(), out.mutable_data());
        return out;
      },
      py::arg("frame"), py::arg("bit_depth") = 8);

  m.def("signed_contribution", &signed_contribution, py::arg("event"), py::arg("mode"), py::arg("contribution"));
  m.def(
      "apply_decay",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> pixels, double dt, const Decay &decay,
         double neutral) {
        auto values = to_pixels(pixels);
        apply_decay(values, dt, decay, neutral);
        py::array_t<double> out(pixels.request().shape);
        std::copy(values.begin(), values.end(), out.mutable_data());
        return out;
      },
      py::arg("pixels"), py::arg("dt"), py::arg("decay"), py::arg("neutral"));

  py::class_<Slice>(m, "Slice")
      .def_readonly("events", &Slice::events)
      .def_property_readonly("publish_stamp", [](const Slice &s) { return to_seconds(s.publish_stamp); })
      .def_readonly("interval_event_count", &Slice::interval_event_count)
      .def_readonly("partial", &Slice::partial)
      .def_readonly("index", &Slice::index);

  m.def(
      "slice_by_number",
      [](const EventStream &events, std::size_t n) {
        auto r = slice_by_number(events, n);
        return py::make_tuple(r.slices, r.pending);
      },
      py::arg("events"), py::arg("window_size"), "Returns (slices, pending events).");
  m.def(
      "slice_by_time",
      [](const EventStream &events, double interval, std::optional<double> t0) {
        return slice_by_time(events, interval, optional_seconds(t0));
      },
      py::arg("events"), py::arg("interval"), py::arg("t0") = py::none());
  m.def(
      "slice_by_time_and_number",
      [](const EventStream &events, double interval, std::size_t n, std::optional<double> t0) {
        return slice_by_time_and_number(events, interval, n, optional_seconds(t0));
      },
      py::arg("events"), py::arg("interval"), py::arg("window_size"), py::arg("t0") = py::none());
  m.def("detect_no_motion", &detect_no_motion, py::arg("interval_event_count"), py::arg("threshold"));

  py::class_<Accumulator>(m, "Accumulator")
      .def(py::init<AccumulatorConfig, FrameSpec>(), py::arg("config"), py::arg("spec"))
      .def("process", &Accumulator::process)
      .def("accumulate", &Accumulator::accumulate)
      .def("hold", [](Accumulator &a, double stamp) { return a.hold(from_seconds(stamp)); });

  py::class_<PipelineStats>(m, "PipelineStats")
      .def_readonly("events_in", &PipelineStats::events_in)
      .def_readonly("frames", &PipelineStats::frames)
      .def_readonly("held_frames", &PipelineStats::held_frames)
      .def_readonly("partial_frames", &PipelineStats::partial_frames)
      .def_property_readonly("mean_events_per_slice", &PipelineStats::mean_events_per_slice)
      .def_property_readonly("mean_frame_build_ms", &PipelineStats::mean_frame_build_ms)
      .def_property_readonly("events_per_second", &PipelineStats::events_per_second);

  m.def(
      "accumulate_stream",
      [](const EventStream &events, const AccumulatorConfig &config, const FrameSpec &spec,
         std::optional<double> t0) {
        PipelineStats stats;
        auto frames = accumulate_stream(events, config, spec, optional_seconds(t0), &stats);
        return py::make_tuple(frames, stats);
      },
      py::arg("events"), py::arg("config"), py::arg("spec"), py::arg("t0") = py::none(),
      "Returns (frames, stats).");

  py::class_<SyntheticScene>(m, "SyntheticScene")
      .def_static("step_edge", &SyntheticScene::step_edge, py::arg("geometry"), py::arg("height"),
                  py::arg("edge_column"))
      .def_static("bars", &SyntheticScene::bars, py::arg("geometry"), py::arg("height"), py::arg("period"),
                  py::arg("soft_width"))
      .def_static("checker", &SyntheticScene::checker, py::arg("geometry"), py::arg("height"), py::arg("square"))
      .def("sample", &SyntheticScene::sample)
      .def_property_readonly("geometry", &SyntheticScene::geometry);

  py::class_<MotionProfile>(m, "MotionProfile")
      .def_static("constant", &MotionProfile::constant, py::arg("vx"), py::arg("vy"), py::arg("duration"))
      .def("then", &MotionProfile::then, py::return_value_policy::reference_internal)
      .def_property_readonly("duration", &MotionProfile::duration)
      .def("displacement", &MotionProfile::displacement);

  py::class_<SensorModel>(m, "SensorModel")
      .def(py::init<double, double, std::uint64_t>(), py::arg("contrast_threshold") = 0.2,
           py::arg("noise_rate") = 0.0, py::arg("seed") = 0)
      .def_readwrite("contrast_threshold", &SensorModel::contrast_threshold)
      .def_readwrite("noise_rate", &SensorModel::noise_rate)
      .def_readwrite("seed", &SensorModel::seed);

  m.def("generate_events", &generate_events, py::arg("scene"), py::arg("motion"), py::arg("sensor"),
        py::arg("time_step"));
  m.def("expected_event_count", &expected_event_count, py::arg("edge_height"), py::arg("contrast_threshold"));
  m.def(
      "add_noise",
      [](const EventStream &events, const SensorModel &sensor, const SensorGeometry &geometry, double duration) {
        return add_noise(events, sensor, geometry, duration);
      },
      py::arg("events"), py::arg("sensor"), py::arg("geometry"), py::arg("duration"));

  m.def("parse_event_line", [](const std::string &line) { return parse_event_line(line); });
  m.def("format_event_line", &format_event_line);
  m.def("read_stream", &read_stream, py::arg("path"), py::arg("geometry"));
  m.def(
      "write_stream",
      [](const std::filesystem::path &path, const EventStream &events) { write_stream(path, events); },
      py::arg("path"), py::arg("events"));

  m.def("ncc", &ncc);
  m.def("fill_ratio", &fill_ratio);
  m.def("saturation_fraction", &saturation_fraction);
  m.def(
      "distinct_levels", [](const EventFrame &f, int bit_depth) { return distinct_levels(f, bit_depth); },
      py::arg("frame"), py::arg("bit_depth") = 8);
}
