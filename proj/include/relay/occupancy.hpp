#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relay/attention.hpp"
#include "relay/penalty.hpp"
#include "relay/timeline.hpp"

namespace relay {

// Synthetic logit profile for the verification rig. UNIFORM zeroes Q and
// K so attention weights equal the normalized penalty priors exactly;
// RANDOM draws Q and K entries deterministically from the seed.
struct LogitProfile {
  enum class Kind { kUniform, kRandom };

  static LogitProfile Uniform() { return {Kind::kUniform, 0}; }
  static LogitProfile Random(std::uint64_t seed) {
    return {Kind::kRandom, seed};
  }

  Kind kind = Kind::kUniform;
  std::uint64_t seed = 0;
};

// Per-frame attention-mass fractions per prompt column. Columns follow
// the segments in schedule order (labeled by prompt id), with the global
// prompt last when present. Every row sums to 1.
struct OccupancyTrace {
  std::size_t frames = 0;
  std::vector<std::string> prompts;
  DenseMatrix mass;  // frames x prompts
  PenaltyMode mode = PenaltyMode::kSoft;
};

// max_step is the maximum L1 distance between consecutive occupancy
// rows; per_boundary_steps holds the step at each segment boundary.
struct BoundaryReport {
  double max_step = 0.0;
  std::vector<double> per_boundary_steps;
  PenaltyMode mode = PenaltyMode::kSoft;
};

// Value rows are one-hot indicators of the owning prompt column, so
// attention outputs read directly as per-prompt mass.
AttentionInputs synth_inputs(const SegmentSchedule& schedule,
                             const TokenLayout& layout,
                             const LogitProfile& profile);

// Runs penalized attention on synth_inputs and averages each frame's
// query rows, grouping attention mass by key owner.
OccupancyTrace occupancy(const SegmentSchedule& schedule,
                         const TokenLayout& layout,
                         const PenaltyConfig& config,
                         const LogitProfile& profile);

BoundaryReport boundary_report(const OccupancyTrace& trace,
                               const SegmentSchedule& schedule);

}  // namespace relay
