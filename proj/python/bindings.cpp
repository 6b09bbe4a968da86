#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>

#include "relay/attention.hpp"
#include "relay/occupancy.hpp"
#include "relay/penalty.hpp"
#include "relay/schedule_io.hpp"

namespace py = pybind11;

namespace {

using namespace relay;

using InputArray =
    py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix matrix_from_array(const InputArray& arr, const char* name) {
  if (arr.ndim() != 2) {
    throw ShapeError(std::string(name) + " must be a 2-D array");
  }
  DenseMatrix m(static_cast<std::size_t>(arr.shape(0)),
                static_cast<std::size_t>(arr.shape(1)));
  std::memcpy(m.data.data(), arr.data(), m.data.size() * sizeof(double));
  return m;
}

py::array_t<double> array_from_matrix(const DenseMatrix& m) {
  py::array_t<double> arr({static_cast<py::ssize_t>(m.rows),
                           static_cast<py::ssize_t>(m.cols)});
  std::memcpy(arr.mutable_data(), m.data.data(),
              m.data.size() * sizeof(double));
  return arr;
}

WindowPolicy window_from(const py::object& window) {
  if (py::isinstance<py::str>(window)) {
    const auto text = window.cast<std::string>();
    if (text == "auto") {
      return WindowPolicy::Auto();
    }
    throw ConfigError("window must be \"auto\" or a number, got \"" + text +
                      "\"");
  }
  return WindowPolicy::Explicit(window.cast<double>());
}

PenaltyMode mode_from(const std::string& mode) {
  if (mode == "soft") return PenaltyMode::kSoft;
  if (mode == "hard") return PenaltyMode::kHard;
  if (mode == "off") return PenaltyMode::kOff;
  throw ConfigError("mode must be \"soft\", \"hard\", or \"off\", got \"" +
                    mode + "\"");
}

std::string mode_name(PenaltyMode mode) {
  switch (mode) {
    case PenaltyMode::kSoft: return "soft";
    case PenaltyMode::kHard: return "hard";
    case PenaltyMode::kOff: return "off";
  }
  return "soft";
}

LogitProfile profile_from(const std::string& profile, std::uint64_t seed) {
  if (profile == "uniform") return LogitProfile::Uniform();
  if (profile == "random") return LogitProfile::Random(seed);
  throw ConfigError("profile must be \"uniform\" or \"random\", got \"" +
                    profile + "\"");
}

SegmentSchedule make_schedule(
    int video_frames,
    const std::vector<std::tuple<std::string, int, int>>& segments,
    const std::optional<std::string>& global_prompt) {
  ScheduleSpec spec;
  spec.video_frames = video_frames;
  spec.global_prompt = global_prompt;
  for (const auto& [prompt, start, end] : segments) {
    spec.segments.push_back({prompt, start, end});
  }
  return validate_schedule(spec);
}

TokenLayout make_layout(const SegmentSchedule& schedule, int tokens_per_frame,
                        const py::object& tokens_per_prompt,
                        int global_tokens) {
  if (py::isinstance<py::dict>(tokens_per_prompt)) {
    const auto counts =
        tokens_per_prompt.cast<std::map<std::string, int>>();
    return build_token_layout(schedule, tokens_per_frame, counts,
                              global_tokens);
  }
  return build_token_layout(schedule, tokens_per_frame,
                            tokens_per_prompt.cast<int>(), global_tokens);
}

AttentionInputs inputs_from(const InputArray& query, const InputArray& key,
                            const InputArray& value) {
  AttentionInputs inputs;
  inputs.query = matrix_from_array(query, "query");
  inputs.key = matrix_from_array(key, "key");
  inputs.value = matrix_from_array(value, "value");
  inputs.dim = inputs.query.cols;
  return inputs;
}

py::tuple output_tuple(const AttentionOutput& out) {
  return py::make_tuple(array_from_matrix(out.output),
                        array_from_matrix(out.weights));
}

}  // namespace

PYBIND11_MODULE(pyrelay, m) {
  m.doc() =
      "Temporal cross-attention routing: boundary-decay penalties, "
      "penalized softmax attention, and per-frame prompt occupancy.";

  py::register_exception<Error>(m, "RelayError");

  py::class_<TemporalSegment>(m, "TemporalSegment")
      .def_readonly("segment_id", &TemporalSegment::segment_id)
      .def_readonly("prompt_id", &TemporalSegment::prompt_id)
      .def_readonly("start_frame", &TemporalSegment::start_frame)
      .def_readonly("end_frame", &TemporalSegment::end_frame)
      .def_readonly("midpoint", &TemporalSegment::midpoint)
      .def_readonly("half_length", &TemporalSegment::half_length)
      .def("__repr__", [](const TemporalSegment& seg) {
        return "TemporalSegment(id=" + std::to_string(seg.segment_id) +
               ", prompt='" + seg.prompt_id + "', frames=[" +
               std::to_string(seg.start_frame) + ", " +
               std::to_string(seg.end_frame) + "])";
      });

  py::class_<SegmentSchedule>(m, "SegmentSchedule")
      .def_readonly("video_frames", &SegmentSchedule::video_frames)
      .def_readonly("segments", &SegmentSchedule::segments)
      .def_readonly("global_prompt", &SegmentSchedule::global_prompt)
      .def("segment_for_frame", &SegmentSchedule::segment_for_frame,
           py::arg("frame"), py::return_value_policy::copy);

  py::class_<TokenLayout>(m, "TokenLayout")
      .def_readonly("query_count", &TokenLayout::query_count)
      .def_readonly("key_count", &TokenLayout::key_count)
      .def_readonly("tokens_per_frame", &TokenLayout::tokens_per_frame)
      .def_readonly("query_frame", &TokenLayout::query_frame)
      .def_readonly("key_owner", &TokenLayout::key_owner);

  py::class_<OccupancyTrace>(m, "OccupancyTrace")
      .def_readonly("frames", &OccupancyTrace::frames)
      .def_readonly("prompts", &OccupancyTrace::prompts)
      .def_property_readonly(
          "mass",
          [](const OccupancyTrace& t) { return array_from_matrix(t.mass); })
      .def_property_readonly(
          "mode", [](const OccupancyTrace& t) { return mode_name(t.mode); });

  py::class_<BoundaryReport>(m, "BoundaryReport")
      .def_readonly("max_step", &BoundaryReport::max_step)
      .def_readonly("per_boundary_steps", &BoundaryReport::per_boundary_steps)
      .def_property_readonly(
          "mode", [](const BoundaryReport& r) { return mode_name(r.mode); });

  m.def("validate_schedule", &make_schedule, py::arg("video_frames"),
        py::arg("segments"), py::arg("global_prompt") = py::none(),
        "Validate a timeline given as [(prompt, start, end), ...].");

  m.def(
      "schedule_from_json",
      [](const std::string& text) {
        return validate_schedule(parse_schedule_json(text));
      },
      py::arg("text"), "Parse and validate a schedule JSON document.");

  m.def("build_token_layout", &make_layout, py::arg("schedule"),
        py::arg("tokens_per_frame") = 4, py::arg("tokens_per_prompt") = 8,
        py::arg("global_tokens") = 0,
        "tokens_per_prompt may be an int or a {prompt: count} dict.");

  m.def("sigma_for", &sigma_for, py::arg("half_length"), py::arg("window"),
        py::arg("epsilon"),
        "Decay rate with retained fraction epsilon at the segment "
        "endpoints.");

  m.def(
      "decay_curve",
      [](double half_length, double window, double epsilon,
         const py::array_t<double, py::array::forcecast>& offsets) {
        std::vector<double> grid(offsets.data(),
                                 offsets.data() + offsets.size());
        const DecayCurve curve =
            decay_curve(half_length, window, epsilon, grid);
        py::array_t<double> fractions(
            static_cast<py::ssize_t>(curve.points.size()));
        double* out = fractions.mutable_data();
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
          out[i] = curve.points[i].retained_fraction;
        }
        return fractions;
      },
      py::arg("half_length"), py::arg("window"), py::arg("epsilon"),
      py::arg("offsets"),
      "Retained attention fraction per offset from the segment midpoint.");

  m.def(
      "build_penalty_matrix",
      [](const SegmentSchedule& schedule, const TokenLayout& layout,
         double epsilon, const py::object& window, const std::string& mode) {
        const PenaltyConfig config{epsilon, window_from(window),
                                   mode_from(mode)};
        return array_from_matrix(
            build_penalty_matrix(schedule, layout, config).values());
      },
      py::arg("schedule"), py::arg("layout"), py::arg("epsilon") = 0.1,
      py::arg("window") = "auto", py::arg("mode") = "soft");

  m.def(
      "attention",
      [](const InputArray& query, const InputArray& key,
         const InputArray& value) {
        return output_tuple(attention(inputs_from(query, key, value)));
      },
      py::arg("query"), py::arg("key"), py::arg("value"),
      "Returns (output, weights).");

  m.def(
      "penalized_attention",
      [](const InputArray& query, const InputArray& key,
         const InputArray& value, const InputArray& penalty,
         const std::string& mode) {
        const PenaltyMatrix wrapped(matrix_from_array(penalty, "penalty"),
                                    mode_from(mode));
        return output_tuple(
            penalized_attention(inputs_from(query, key, value), wrapped));
      },
      py::arg("query"), py::arg("key"), py::arg("value"), py::arg("penalty"),
      py::arg("mode") = "soft", "Returns (output, weights).");

  m.def(
      "prior_multiplier_oracle",
      [](const InputArray& query, const InputArray& key,
         const InputArray& value, const InputArray& penalty,
         const std::string& mode) {
        const PenaltyMatrix wrapped(matrix_from_array(penalty, "penalty"),
                                    mode_from(mode));
        return output_tuple(
            prior_multiplier_oracle(inputs_from(query, key, value), wrapped));
      },
      py::arg("query"), py::arg("key"), py::arg("value"), py::arg("penalty"),
      py::arg("mode") = "soft",
      "Multiplicative-prior route; agrees with penalized_attention.");

  m.def(
      "occupancy",
      [](const SegmentSchedule& schedule, const TokenLayout& layout,
         double epsilon, const py::object& window, const std::string& mode,
         const std::string& profile, std::uint64_t seed) {
        const PenaltyConfig config{epsilon, window_from(window),
                                   mode_from(mode)};
        return occupancy(schedule, layout, config,
                         profile_from(profile, seed));
      },
      py::arg("schedule"), py::arg("layout"), py::arg("epsilon") = 0.1,
      py::arg("window") = "auto", py::arg("mode") = "soft",
      py::arg("profile") = "uniform", py::arg("seed") = 0,
      "Per-frame attention-mass fractions per prompt.");

  m.def("boundary_report", &boundary_report, py::arg("trace"),
        py::arg("schedule"),
        "Frame-to-frame L1 smoothness of an occupancy trace.");
}
