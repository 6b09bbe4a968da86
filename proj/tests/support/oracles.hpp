// Test-only reference implementations, written independently of the
// library code paths they are used to check.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "relay/attention.hpp"
#include "relay/matrix.hpp"
#include "relay/occupancy.hpp"
#include "relay/penalty.hpp"
#include "relay/timeline.hpp"

namespace oracles {

// Plain i/j/k triple loop (the library accumulates in i/k/j order).
inline relay::DenseMatrix naive_matmul(const relay::DenseMatrix& a,
                                       const relay::DenseMatrix& b) {
  relay::DenseMatrix out(a.rows, b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) {
        acc += a.at(i, k) * b.at(k, j);
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

// Baseline attention with explicit scalar sums; no library matmul or
// softmax involved.
inline relay::AttentionOutput scalar_attention(
    const relay::AttentionInputs& in) {
  const std::size_t nq = in.query.rows;
  const std::size_t nk = in.key.rows;
  const std::size_t dv = in.value.cols;
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.dim));

  relay::AttentionOutput out;
  out.weights = relay::DenseMatrix(nq, nk);
  out.output = relay::DenseMatrix(nq, dv);
  for (std::size_t i = 0; i < nq; ++i) {
    std::vector<double> logits(nk, 0.0);
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nk; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < in.dim; ++t) {
        dot += in.query.at(i, t) * in.key.at(j, t);
      }
      logits[j] = dot * scale;
      row_max = std::max(row_max, logits[j]);
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < nk; ++j) {
      logits[j] = std::exp(logits[j] - row_max);
      denom += logits[j];
    }
    for (std::size_t j = 0; j < nk; ++j) {
      out.weights.at(i, j) = logits[j] / denom;
    }
    for (std::size_t v = 0; v < dv; ++v) {
      double acc = 0.0;
      for (std::size_t j = 0; j < nk; ++j) {
        acc += out.weights.at(i, j) * in.value.at(j, v);
      }
      out.output.at(i, v) = acc;
    }
  }
  return out;
}

// Decay prior written out from scratch: sigma and the quadratic overshoot
// are recomputed inline rather than via the library helpers.
inline double reference_prior(double frame, double midpoint,
                              double half_length, double window,
                              double epsilon) {
  const double sigma =
      (half_length - window) / std::sqrt(2.0 * std::log(1.0 / epsilon));
  const double overshoot = std::fabs(frame - midpoint) - window;
  if (overshoot <= 0.0) return 1.0;
  return std::exp(-(overshoot * overshoot) / (2.0 * sigma * sigma));
}

inline double resolve_window(const relay::PenaltyConfig& config,
                             double half_length) {
  if (config.window.is_auto) return std::max(half_length - 2.0, 0.0);
  return config.window.width;
}

// Closed-form occupancy row under uniform logits: every key of segment s
// contributes the prior exp(-C_s(f)), global keys contribute 1, and the
// row is the normalized per-column total.
inline std::vector<double> closed_form_occupancy_row(
    const relay::SegmentSchedule& schedule, const relay::TokenLayout& layout,
    const relay::PenaltyConfig& config, int frame) {
  const std::size_t n_cols =
      schedule.segments.size() + (schedule.global_prompt ? 1 : 0);
  std::vector<double> totals(n_cols, 0.0);
  for (std::size_t j = 0; j < layout.key_count; ++j) {
    const int owner = layout.key_owner[j];
    if (owner == relay::kGlobalOwner) {
      totals[schedule.segments.size()] += 1.0;
      continue;
    }
    const relay::TemporalSegment& seg = schedule.segments[owner - 1];
    double prior = 1.0;
    if (config.mode == relay::PenaltyMode::kSoft) {
      prior = reference_prior(frame, seg.midpoint, seg.half_length,
                              resolve_window(config, seg.half_length),
                              config.epsilon);
    } else if (config.mode == relay::PenaltyMode::kHard) {
      prior =
          (frame >= seg.start_frame && frame <= seg.end_frame) ? 1.0 : 0.0;
    }
    totals[static_cast<std::size_t>(owner - 1)] += prior;
  }
  double denom = 0.0;
  for (double t : totals) denom += t;
  for (double& t : totals) t /= denom;
  return totals;
}

// Full dense evaluation on the synthetic inputs: scalar logits, penalty
// subtraction, naive softmax, owner grouping, per-frame averaging.
inline relay::DenseMatrix brute_force_occupancy(
    const relay::SegmentSchedule& schedule, const relay::TokenLayout& layout,
    const relay::PenaltyConfig& config, const relay::LogitProfile& profile) {
  const relay::AttentionInputs in =
      relay::synth_inputs(schedule, layout, profile);
  const relay::PenaltyMatrix penalty =
      relay::build_penalty_matrix(schedule, layout, config);
  const relay::DenseMatrix& c = penalty.values();

  const std::size_t n_cols =
      schedule.segments.size() + (schedule.global_prompt ? 1 : 0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.dim));
  relay::DenseMatrix mass(static_cast<std::size_t>(schedule.video_frames),
                          n_cols, 0.0);

  std::vector<double> row(layout.key_count);
  for (std::size_t i = 0; i < layout.query_count; ++i) {
    double row_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < layout.key_count; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < in.dim; ++t) {
        dot += in.query.at(i, t) * in.key.at(j, t);
      }
      row[j] = dot * scale - c.at(i, j);  // finite - inf == -inf
      row_max = std::max(row_max, row[j]);
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < layout.key_count; ++j) {
      row[j] = std::exp(row[j] - row_max);
      denom += row[j];
    }
    const auto frame = static_cast<std::size_t>(layout.query_frame[i]);
    for (std::size_t j = 0; j < layout.key_count; ++j) {
      const int owner = layout.key_owner[j];
      const std::size_t col = owner == relay::kGlobalOwner
                                  ? schedule.segments.size()
                                  : static_cast<std::size_t>(owner - 1);
      mass.at(frame, col) += row[j] / denom;
    }
  }
  for (double& v : mass.data) {
    v /= layout.tokens_per_frame;  // exact mean for one-hot rows
  }
  return mass;
}

// Platform-independent uniform double in [-1, 1).
inline double unit_double(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

inline relay::DenseMatrix random_matrix(std::mt19937_64& rng,
                                        std::size_t rows, std::size_t cols,
                                        double amplitude = 1.0) {
  relay::DenseMatrix m(rows, cols);
  for (double& v : m.data) {
    v = amplitude * unit_double(rng);
  }
  return m;
}

}  // namespace oracles
