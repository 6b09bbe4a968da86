#include "relay/occupancy.hpp"

#include <random>

namespace relay {

namespace {

// Uniform double in [-1, 1) built from the generator's raw bits, so the
// stream is identical on every platform.
double unit_double(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  return 2.0 * u - 1.0;
}

std::size_t column_count(const SegmentSchedule& schedule) {
  return schedule.segments.size() + (schedule.global_prompt ? 1 : 0);
}

std::size_t owner_column(const SegmentSchedule& schedule, int owner) {
  if (owner == kGlobalOwner) {
    if (!schedule.global_prompt) {
      throw ConfigError(
          "layout has global-prompt keys but the schedule has no global "
          "prompt");
    }
    return schedule.segments.size();
  }
  if (owner < 1 ||
      static_cast<std::size_t>(owner) > schedule.segments.size()) {
    throw ConfigError("key owner " + std::to_string(owner) +
                      " is not a scheduled segment");
  }
  return static_cast<std::size_t>(owner - 1);
}

}  // namespace

AttentionInputs synth_inputs(const SegmentSchedule& schedule,
                             const TokenLayout& layout,
                             const LogitProfile& profile) {
  if (layout.query_frame.size() != layout.query_count ||
      layout.key_owner.size() != layout.key_count) {
    throw ShapeError("token layout index maps do not match its counts");
  }

  constexpr std::size_t kDim = 4;  // fixed embedding width for the rig

  AttentionInputs inputs;
  inputs.dim = kDim;
  inputs.query = DenseMatrix(layout.query_count, kDim, 0.0);
  inputs.key = DenseMatrix(layout.key_count, kDim, 0.0);
  if (profile.kind == LogitProfile::Kind::kRandom) {
    std::mt19937_64 rng(profile.seed);
    for (double& v : inputs.query.data) v = unit_double(rng);
    for (double& v : inputs.key.data) v = unit_double(rng);
  }

  // One-hot value rows: the attention output of a query is then exactly
  // its attention-mass distribution over prompt columns.
  inputs.value = DenseMatrix(layout.key_count, column_count(schedule), 0.0);
  for (std::size_t j = 0; j < layout.key_count; ++j) {
    inputs.value.at(j, owner_column(schedule, layout.key_owner[j])) = 1.0;
  }
  return inputs;
}

OccupancyTrace occupancy(const SegmentSchedule& schedule,
                         const TokenLayout& layout,
                         const PenaltyConfig& config,
                         const LogitProfile& profile) {
  const AttentionInputs inputs = synth_inputs(schedule, layout, profile);
  const PenaltyMatrix penalty = build_penalty_matrix(schedule, layout, config);
  const AttentionOutput att = penalized_attention(inputs, penalty);

  OccupancyTrace trace;
  trace.frames = static_cast<std::size_t>(schedule.video_frames);
  trace.mode = config.mode;
  for (const TemporalSegment& seg : schedule.segments) {
    trace.prompts.push_back(seg.prompt_id);
  }
  if (schedule.global_prompt) {
    trace.prompts.push_back(*schedule.global_prompt);
  }

  trace.mass = DenseMatrix(trace.frames, column_count(schedule), 0.0);
  for (std::size_t i = 0; i < layout.query_count; ++i) {
    const auto frame = static_cast<std::size_t>(layout.query_frame[i]);
    for (std::size_t j = 0; j < layout.key_count; ++j) {
      trace.mass.at(frame, owner_column(schedule, layout.key_owner[j])) +=
          att.weights.at(i, j);
    }
  }
  // Mean over each frame's queries; every frame owns exactly
  // tokens_per_frame of them.
  for (double& v : trace.mass.data) {
    v /= layout.tokens_per_frame;
  }
  return trace;
}

BoundaryReport boundary_report(const OccupancyTrace& trace,
                               const SegmentSchedule& schedule) {
  if (trace.frames != static_cast<std::size_t>(schedule.video_frames)) {
    throw ShapeError("trace covers " + std::to_string(trace.frames) +
                     " frames but the schedule has " +
                     std::to_string(schedule.video_frames));
  }
  if (trace.mass.rows != trace.frames) {
    throw ShapeError("trace mass has " + std::to_string(trace.mass.rows) +
                     " rows for " + std::to_string(trace.frames) + " frames");
  }

  BoundaryReport report;
  report.mode = trace.mode;

  std::vector<double> steps(trace.frames > 0 ? trace.frames - 1 : 0, 0.0);
  for (std::size_t f = 0; f + 1 < trace.frames; ++f) {
    double l1 = 0.0;
    for (std::size_t c = 0; c < trace.mass.cols; ++c) {
      l1 += std::abs(trace.mass.at(f + 1, c) - trace.mass.at(f, c));
    }
    steps[f] = l1;
    if (l1 > report.max_step) report.max_step = l1;
  }

  for (std::size_t s = 0; s + 1 < schedule.segments.size(); ++s) {
    // Step between the last frame of segment s and the first of s + 1.
    report.per_boundary_steps.push_back(
        steps[static_cast<std::size_t>(schedule.segments[s].end_frame)]);
  }
  return report;
}

}  // namespace relay
