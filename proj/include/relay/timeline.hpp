#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relay/errors.hpp"

namespace relay {

// One prompt bound to an inclusive latent-frame interval. midpoint and
// half_length may be half-integers; start = midpoint - half_length and
// end = midpoint + half_length hold exactly.
struct TemporalSegment {
  int segment_id = 0;  // 1-based position in the schedule
  std::string prompt_id;
  int start_frame = 0;  // inclusive
  int end_frame = 0;    // inclusive
  double midpoint = 0.0;
  double half_length = 0.0;
};

// Raw, unvalidated schedule description as read from a schedule file.
struct ScheduleSpec {
  struct Item {
    std::string prompt;
    int start = 0;
    int end = 0;
  };

  int video_frames = 0;
  std::vector<Item> segments;
  std::optional<std::string> global_prompt;
};

// Validated timeline: segments sorted by start frame, pairwise
// non-overlapping, covering every frame of [0, video_frames - 1]
// exactly once. Immutable after validation.
struct SegmentSchedule {
  int video_frames = 0;
  std::vector<TemporalSegment> segments;
  std::optional<std::string> global_prompt;

  // Unique segment covering `frame`. Throws ScheduleError when the frame
  // is outside [0, video_frames - 1].
  const TemporalSegment& segment_for_frame(int frame) const;
};

// Normalizes and checks a raw description. Throws ScheduleError on
// overlaps (naming the doubly covered frame), gaps (naming the uncovered
// frame), intervals outside the video, and empty segment lists.
SegmentSchedule validate_schedule(const ScheduleSpec& raw);

// Owner tag for key tokens that belong to the global prompt rather than a
// scheduled segment.
inline constexpr int kGlobalOwner = 0;

// Flattened token-index geometry: which latent frame each query token
// sits in (frame-major flattening, f(i) = floor(i / tokens_per_frame))
// and which segment, or the global prompt, each key token belongs to.
struct TokenLayout {
  std::size_t query_count = 0;
  std::size_t key_count = 0;
  int tokens_per_frame = 1;
  std::vector<int> query_frame;  // query index -> latent frame
  std::vector<int> key_owner;    // key index -> segment_id or kGlobalOwner
};

// Keys are laid out segment by segment in schedule order, global-prompt
// keys last. Every scheduled prompt must appear in tokens_per_prompt with
// a count >= 1; global_tokens must be positive exactly when the schedule
// carries a global prompt.
TokenLayout build_token_layout(const SegmentSchedule& schedule,
                               int tokens_per_frame,
                               const std::map<std::string, int>& tokens_per_prompt,
                               int global_tokens);

// Same per-prompt token count for every scheduled prompt.
TokenLayout build_token_layout(const SegmentSchedule& schedule,
                               int tokens_per_frame,
                               int tokens_per_prompt,
                               int global_tokens);

}  // namespace relay
