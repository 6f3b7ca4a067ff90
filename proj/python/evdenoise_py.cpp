#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"

#include "evdenoise/baseline.hpp"
#include "evdenoise/errors.hpp"
#include "evdenoise/event_io.hpp"
#include "evdenoise/hw_model.hpp"
#include "evdenoise/metrics.hpp"
#include "evdenoise/snn.hpp"
#include "evdenoise/synth.hpp"
#include "evdenoise/trainer.hpp"

namespace py = pybind11;
using namespace evdenoise;

namespace {

// Python objects cross the boundary as JSON text.
nlohmann::json to_native(const py::object& obj) {
    const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return nlohmann::json::parse(text);
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

// 1-D copy with shape and strides spelled out.
template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())},
                          std::vector<py::ssize_t>{static_cast<py::ssize_t>(sizeof(T))}, v.data());
}

template <typename T, typename F>
py::array_t<T> column(const EventStream& s, F&& get) {
    std::vector<T> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<T>(get(s[i]));
    return to_array(out);
}

EventStream from_arrays(int width, int height, py::array_t<std::uint16_t, py::array::forcecast> x,
                        py::array_t<std::uint16_t, py::array::forcecast> y,
                        py::array_t<std::uint64_t, py::array::forcecast> t,
                        py::array_t<std::uint8_t, py::array::forcecast> p,
                        std::optional<py::array_t<std::uint8_t, py::array::forcecast>> label) {
    const auto n = x.size();
    if (y.size() != n || t.size() != n || p.size() != n || (label && label->size() != n)) {
        throw ConfigError("event arrays differ in length");
    }
    auto vx = x.unchecked<1>();
    auto vy = y.unchecked<1>();
    auto vt = t.unchecked<1>();
    auto vp = p.unchecked<1>();
    std::vector<Event> events(static_cast<std::size_t>(n));
    for (py::ssize_t i = 0; i < n; ++i) {
        auto& e = events[static_cast<std::size_t>(i)];
        e.x = vx(i);
        e.y = vy(i);
        e.t = vt(i);
        if (vp(i) > 1) throw ValidationError("polarity must be 0 or 1");
        e.p = static_cast<Polarity>(vp(i));
        if (label) {
            const auto l = label->unchecked<1>()(i);
            if (l > 2) throw ValidationError("label must be 0, 1 or 2");
            e.label = static_cast<Label>(l);
        }
    }
    return EventStream({static_cast<std::uint16_t>(width), static_cast<std::uint16_t>(height)}, std::move(events));
}

WindowPolicy policy_from(std::uint64_t window_us, std::uint64_t window_events) {
    return window_events ? WindowPolicy::fixed_count(window_events) : WindowPolicy::fixed_time(window_us);
}

}  // namespace

PYBIND11_MODULE(_evdenoise, m) {
    m.doc() = "Event-camera denoising: EBBI features, quantized spiking classifier, baselines and metrics";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<OrderingError>(m, "OrderingError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<EventStream>(m, "EventStream")
        .def(py::init(&from_arrays), py::arg("width"), py::arg("height"), py::arg("x"), py::arg("y"), py::arg("t"),
             py::arg("p"), py::arg("label") = py::none())
        .def_property_readonly("width", [](const EventStream& s) { return s.geometry().width; })
        .def_property_readonly("height", [](const EventStream& s) { return s.geometry().height; })
        .def("__len__", &EventStream::size)
        .def_property_readonly("x", [](const EventStream& s) { return column<std::uint16_t>(s, [](const Event& e) { return e.x; }); })
        .def_property_readonly("y", [](const EventStream& s) { return column<std::uint16_t>(s, [](const Event& e) { return e.y; }); })
        .def_property_readonly("t", [](const EventStream& s) { return column<std::uint64_t>(s, [](const Event& e) { return e.t; }); })
        .def_property_readonly("p", [](const EventStream& s) { return column<std::uint8_t>(s, [](const Event& e) { return static_cast<int>(e.p); }); })
        .def_property_readonly("label", [](const EventStream& s) { return column<std::uint8_t>(s, [](const Event& e) { return static_cast<int>(e.label); }); })
        .def("fully_labeled", &EventStream::fully_labeled)
        .def(py::self == py::self);

    m.def("read_events", [](const std::filesystem::path& path) { return read_events(path, format_from_path(path)); },
          py::arg("path"), "Read a csv or packed (.evd/.bin) event file.");
    m.def("write_events",
          [](const EventStream& s, const std::filesystem::path& path) { write_events(s, path, format_from_path(path)); },
          py::arg("stream"), py::arg("path"));
    m.def("merge_streams", &merge_streams, py::arg("a"), py::arg("b"));

    m.def("benchmark_scene", [](std::uint64_t seed) { return to_python(benchmark_scene(seed)); }, py::arg("seed") = 1,
          "Scene recipe (dict) of the denoising benchmark.");
    m.def("synthesize",
          [](const py::object& scene) {
              const SynthConfig c = to_native(scene).get<SynthConfig>();
              py::gil_scoped_release release;
              return synthesize(c);
          },
          py::arg("scene"), "Generate the labeled stream described by a scene dict.");

    m.def("run_filter",
          [](const std::string& kind, const EventStream& s, std::uint64_t tau_us, int k, bool polarity_split) {
              BaselineOptions o;
              o.k = k;
              o.polarity_split = polarity_split;
              std::vector<Decision> d;
              {
                  py::gil_scoped_release release;
                  d = run_filter(parse_filter_kind(kind), s, tau_us, o);
              }
              std::vector<std::uint8_t> out(d.size());
              for (std::size_t i = 0; i < d.size(); ++i) out[i] = static_cast<std::uint8_t>(d[i]);
              return to_array(out);
          },
          py::arg("kind"), py::arg("stream"), py::arg("tau_us"), py::arg("k") = 4, py::arg("polarity_split") = false,
          "Per-event decisions (1 = signal) of baf, stcf or onf.");
    m.def("baseline_roc",
          [](const std::string& kind, const EventStream& s, std::optional<std::vector<std::uint64_t>> taus, int k) {
              BaselineOptions o;
              o.k = k;
              const auto grid = taus ? *taus : default_tau_grid();
              RocCurve r;
              {
                  py::gil_scoped_release release;
                  r = roc_by_tau(parse_filter_kind(kind), s, grid, o);
              }
              py::list points;
              for (const auto& pt : r.points) points.append(py::make_tuple(pt.threshold, pt.fpr, pt.tpr));
              py::dict out;
              out["auc"] = r.auc;
              out["points"] = points;
              return out;
          },
          py::arg("kind"), py::arg("stream"), py::arg("taus") = py::none(), py::arg("k") = 4);

    m.def("roc_auc",
          [](const std::vector<double>& scores, const std::vector<int>& labels) {
              std::vector<Label> l;
              for (int v : labels) {
                  if (v < 0 || v > 2) throw ValidationError("label must be 0, 1 or 2");
                  l.push_back(static_cast<Label>(v));
              }
              return roc_from_scores(scores, l).auc;
          },
          py::arg("scores"), py::arg("labels"), "Trapezoidal ROC AUC; label 1 is signal.");

    m.def("score_stream",
          [](const std::filesystem::path& model, const EventStream& s, int n_ebbi, int patch, std::uint64_t window_us,
             std::uint64_t window_events) {
              const auto net = load_network(model);
              std::vector<std::int64_t> scores;
              {
                  py::gil_scoped_release release;
                  scores = score_stream(net, s, n_ebbi, policy_from(window_us, window_events), patch);
              }
              return to_array(scores);
          },
          py::arg("model"), py::arg("stream"), py::arg("n_ebbi") = 2, py::arg("patch") = 5,
          py::arg("window_us") = 25'000, py::arg("window_events") = 0,
          "Integer classifier scores for every event of a stream.");

    m.def("hw_report",
          [](const py::object& config) {
              HwReportConfig c;
              if (!config.is_none()) c = to_native(config).get<HwReportConfig>();
              return to_python(hw_report(c));
          },
          py::arg("config") = py::none(), "Memory, timing and energy report as a dict.");
    m.def("memory_bits", [](int w, int h, int n_ebbi) {
        return memory_bits({static_cast<std::uint16_t>(w), static_cast<std::uint16_t>(h)}, n_ebbi);
    }, py::arg("width"), py::arg("height"), py::arg("n_ebbi") = 2);
}
