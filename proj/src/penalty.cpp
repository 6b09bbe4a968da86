#include "relay/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relay/format.hpp"

namespace relay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double WindowPolicy::resolve(double half_length) const {
  if (is_auto) {
    return std::max(half_length - 2.0, 0.0);
  }
  return width;
}

double sigma_for(double half_length, double window, double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1), got " +
                      format_sig(epsilon));
  }
  if (!(window >= 0.0) || !(window < half_length)) {
    throw ConfigError("degenerate window: need 0 <= w < L, got w = " +
                      format_sig(window) + ", L = " +
                      format_sig(half_length));
  }
  return (half_length - window) / std::sqrt(2.0 * std::log(1.0 / epsilon));
}

double penalty_value(double frame, const TemporalSegment& segment,
                     double window, double sigma) {
  if (!(sigma > 0.0)) {
    throw ConfigError("sigma must be > 0, got " + format_sig(sigma));
  }
  if (!(window >= 0.0)) {
    throw ConfigError("window must be >= 0, got " + format_sig(window));
  }
  const double overshoot = std::abs(frame - segment.midpoint) - window;
  if (overshoot <= 0.0) {
    return 0.0;
  }
  return overshoot * overshoot / (2.0 * sigma * sigma);
}

PenaltyMatrix::PenaltyMatrix(DenseMatrix values, PenaltyMode mode)
    : PenaltyMatrix(std::move(values), mode, {}) {}

PenaltyMatrix::PenaltyMatrix(DenseMatrix values, PenaltyMode mode,
                             std::vector<int> query_frames)
    : values_(std::move(values)),
      mode_(mode),
      query_frames_(std::move(query_frames)) {
  if (!query_frames_.empty() && query_frames_.size() != values_.rows) {
    throw ShapeError("penalty matrix has " + std::to_string(values_.rows) +
                     " rows but " + std::to_string(query_frames_.size()) +
                     " query frames");
  }
  for (double v : values_.data) {
    if (std::isnan(v)) {
      throw ValueError("penalty entries must not be NaN");
    }
    if (v < 0.0) {
      throw ValueError("penalty entries must be >= 0, got " + format_sig(v));
    }
    if (v == kInf && mode_ != PenaltyMode::kHard) {
      throw ValueError("+inf penalty entries are only permitted in HARD mode");
    }
    if (mode_ == PenaltyMode::kOff && v != 0.0) {
      throw ValueError("OFF-mode penalty matrices must be all zero");
    }
  }
}

PenaltyMatrix build_penalty_matrix(const SegmentSchedule& schedule,
                                   const TokenLayout& layout,
                                   const PenaltyConfig& config) {
  if (layout.query_frame.size() != layout.query_count ||
      layout.key_owner.size() != layout.key_count) {
    throw ShapeError("token layout index maps do not match its counts");
  }

  // Per-segment window and decay rate, resolved up front so config errors
  // carry the offending segment id.
  struct SegmentParams {
    double window = 0.0;
    double sigma = 0.0;
  };
  std::vector<SegmentParams> params(schedule.segments.size());
  if (config.mode == PenaltyMode::kSoft) {
    for (std::size_t s = 0; s < schedule.segments.size(); ++s) {
      const TemporalSegment& seg = schedule.segments[s];
      const double w = config.window.resolve(seg.half_length);
      try {
        params[s] = {w, sigma_for(seg.half_length, w, config.epsilon)};
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " (segment " +
                          std::to_string(seg.segment_id) + ")");
      }
    }
  } else if (!(config.epsilon > 0.0) || !(config.epsilon < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1), got " +
                      format_sig(config.epsilon));
  }

  DenseMatrix values(layout.query_count, layout.key_count, 0.0);
  for (std::size_t j = 0; j < layout.key_count; ++j) {
    const int owner = layout.key_owner[j];
    if (owner == kGlobalOwner) {
      continue;  // global-prompt keys are exempt in every mode
    }
    if (owner < 1 || static_cast<std::size_t>(owner) > schedule.segments.size()) {
      throw ConfigError("key " + std::to_string(j) + " is owned by segment " +
                        std::to_string(owner) +
                        ", which is not in the schedule");
    }
    const TemporalSegment& seg = schedule.segments[owner - 1];
    const SegmentParams& p = params[owner - 1];
    for (std::size_t i = 0; i < layout.query_count; ++i) {
      const int frame = layout.query_frame[i];
      switch (config.mode) {
        case PenaltyMode::kSoft:
          values.at(i, j) = penalty_value(frame, seg, p.window, p.sigma);
          break;
        case PenaltyMode::kHard:
          values.at(i, j) =
              (frame >= seg.start_frame && frame <= seg.end_frame) ? 0.0
                                                                   : kInf;
          break;
        case PenaltyMode::kOff:
          break;
      }
    }
  }
  return PenaltyMatrix(std::move(values), config.mode, layout.query_frame);
}

DecayCurve decay_curve(double half_length, double window, double epsilon,
                       std::span<const double> offsets) {
  const double sigma = sigma_for(half_length, window, epsilon);
  TemporalSegment centered;  // offsets are relative to the midpoint
  centered.midpoint = 0.0;

  DecayCurve curve;
  curve.points.reserve(offsets.size());
  for (double offset : offsets) {
    if (!std::isfinite(offset)) {
      throw ValueError("decay_curve: offsets must be finite");
    }
    curve.points.push_back(
        {offset, std::exp(-penalty_value(offset, centered, window, sigma))});
  }
  return curve;
}

}  // namespace relay
