#pragma once

#include <span>
#include <vector>

#include "relay/matrix.hpp"
#include "relay/timeline.hpp"

namespace relay {

enum class PenaltyMode { kSoft, kHard, kOff };

// Free-attention window selection. Auto picks w = max(L - 2, 0) per
// segment, which keeps L - w constant (and sigma a single constant) for
// every segment at least 4 frames long.
struct WindowPolicy {
  static WindowPolicy Auto() { return {true, 0.0}; }
  static WindowPolicy Explicit(double width) { return {false, width}; }

  double resolve(double half_length) const;

  bool is_auto = true;
  double width = 0.0;
};

struct PenaltyConfig {
  double epsilon = 0.1;
  WindowPolicy window = WindowPolicy::Auto();
  PenaltyMode mode = PenaltyMode::kSoft;
};

// Decay rate solving exp(-(L - w)^2 / (2 sigma^2)) = epsilon, so the
// retained attention fraction falls to epsilon exactly at the segment
// endpoints. Requires 0 < epsilon < 1 and 0 <= w < L.
double sigma_for(double half_length, double window, double epsilon);

// ReLU-Gaussian boundary decay: offsets |frame - midpoint| beyond
// `window` are penalized quadratically at rate 1/(2 sigma^2); offsets
// inside the window cost exactly 0.
double penalty_value(double frame, const TemporalSegment& segment,
                     double window, double sigma);

// Dense query x key matrix of penalties. Finite entries are >= 0; +inf
// is permitted only in HARD mode; OFF matrices are identically zero.
class PenaltyMatrix {
 public:
  PenaltyMatrix(DenseMatrix values, PenaltyMode mode);
  PenaltyMatrix(DenseMatrix values, PenaltyMode mode,
                std::vector<int> query_frames);

  const DenseMatrix& values() const { return values_; }
  PenaltyMode mode() const { return mode_; }

  // Latent frame per query row when built from a layout; empty when the
  // matrix was constructed directly.
  const std::vector<int>& query_frames() const { return query_frames_; }

 private:
  DenseMatrix values_;
  PenaltyMode mode_;
  std::vector<int> query_frames_;
};

// SOFT: entry (i,j) = penalty_value(f(i), owner(j), w_s, sigma_s) with
// w_s, sigma_s derived from the owning segment's half length and the
// config. HARD: 0 when f(i) lies in the owning segment's interval, +inf
// otherwise. OFF: all zeros. Global-prompt keys cost 0 in every mode.
// Window/config errors are tagged with the offending segment_id.
PenaltyMatrix build_penalty_matrix(const SegmentSchedule& schedule,
                                   const TokenLayout& layout,
                                   const PenaltyConfig& config);

// Retained attention fraction exp(-C) per offset from a segment
// midpoint. fraction(0) == 1 and fraction(+-L) == epsilon.
struct DecayCurve {
  struct Point {
    double offset;
    double retained_fraction;
  };

  std::vector<Point> points;
};

DecayCurve decay_curve(double half_length, double window, double epsilon,
                       std::span<const double> offsets);

}  // namespace relay
