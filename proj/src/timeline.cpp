#include "relay/timeline.hpp"

#include <algorithm>

namespace relay {

namespace {

std::string describe(const ScheduleSpec::Item& item, int position) {
  return "segment " + std::to_string(position) + " (prompt \"" + item.prompt +
         "\")";
}

}  // namespace

const TemporalSegment& SegmentSchedule::segment_for_frame(int frame) const {
  if (frame < 0 || frame >= video_frames) {
    throw ScheduleError("frame " + std::to_string(frame) +
                        " outside video frames [0, " +
                        std::to_string(video_frames - 1) + "]");
  }
  auto it = std::upper_bound(
      segments.begin(), segments.end(), frame,
      [](int f, const TemporalSegment& seg) { return f < seg.start_frame; });
  // Coverage is gap-free, so the preceding segment always contains the frame.
  return *std::prev(it);
}

SegmentSchedule validate_schedule(const ScheduleSpec& raw) {
  if (raw.segments.empty()) {
    throw ScheduleError("empty schedule: at least one segment is required");
  }
  if (raw.video_frames < 1) {
    throw ScheduleError("video_frames must be >= 1, got " +
                        std::to_string(raw.video_frames));
  }

  std::vector<ScheduleSpec::Item> items = raw.segments;
  std::stable_sort(items.begin(), items.end(),
                   [](const ScheduleSpec::Item& a, const ScheduleSpec::Item& b) {
                     return a.start < b.start;
                   });

  SegmentSchedule schedule;
  schedule.video_frames = raw.video_frames;
  schedule.global_prompt = raw.global_prompt;
  schedule.segments.reserve(items.size());

  int id = 1;
  for (const ScheduleSpec::Item& item : items) {
    if (item.start > item.end) {
      throw ScheduleError(describe(item, id) + ": start " +
                          std::to_string(item.start) + " > end " +
                          std::to_string(item.end));
    }
    if (item.start < 0 || item.end > raw.video_frames - 1) {
      throw ScheduleError(describe(item, id) + ": interval [" +
                          std::to_string(item.start) + ", " +
                          std::to_string(item.end) +
                          "] outside video frames [0, " +
                          std::to_string(raw.video_frames - 1) + "]");
    }
    TemporalSegment seg;
    seg.segment_id = id;
    seg.prompt_id = item.prompt;
    seg.start_frame = item.start;
    seg.end_frame = item.end;
    seg.midpoint = (item.start + item.end) / 2.0;
    seg.half_length = (item.end - item.start) / 2.0;
    schedule.segments.push_back(std::move(seg));
    ++id;
  }

  // Sorted segments must tile [0, video_frames - 1] with no overlap.
  int next_uncovered = 0;
  for (const TemporalSegment& seg : schedule.segments) {
    if (seg.start_frame < next_uncovered) {
      throw ScheduleError("overlap at frame " +
                          std::to_string(seg.start_frame));
    }
    if (seg.start_frame > next_uncovered) {
      throw ScheduleError("gap at frame " + std::to_string(next_uncovered));
    }
    next_uncovered = seg.end_frame + 1;
  }
  if (next_uncovered != raw.video_frames) {
    throw ScheduleError("gap at frame " + std::to_string(next_uncovered));
  }

  return schedule;
}

TokenLayout build_token_layout(const SegmentSchedule& schedule,
                               int tokens_per_frame,
                               const std::map<std::string, int>& tokens_per_prompt,
                               int global_tokens) {
  if (tokens_per_frame < 1) {
    throw ConfigError("tokens_per_frame must be >= 1, got " +
                      std::to_string(tokens_per_frame));
  }
  if (global_tokens < 0) {
    throw ConfigError("global_tokens must be >= 0, got " +
                      std::to_string(global_tokens));
  }
  if (schedule.global_prompt.has_value() && global_tokens == 0) {
    throw ConfigError(
        "schedule has a global prompt; global_tokens must be >= 1");
  }
  if (!schedule.global_prompt.has_value() && global_tokens > 0) {
    throw ConfigError("global_tokens > 0 but the schedule has no global prompt");
  }

  TokenLayout layout;
  layout.tokens_per_frame = tokens_per_frame;
  layout.query_count =
      static_cast<std::size_t>(schedule.video_frames) * tokens_per_frame;
  layout.query_frame.resize(layout.query_count);
  for (std::size_t i = 0; i < layout.query_count; ++i) {
    layout.query_frame[i] = static_cast<int>(i / tokens_per_frame);
  }

  for (const TemporalSegment& seg : schedule.segments) {
    auto it = tokens_per_prompt.find(seg.prompt_id);
    if (it == tokens_per_prompt.end()) {
      throw ConfigError("missing token count for prompt \"" + seg.prompt_id +
                        "\" (segment " + std::to_string(seg.segment_id) + ")");
    }
    if (it->second < 1) {
      throw ConfigError("token count for prompt \"" + seg.prompt_id +
                        "\" must be >= 1, got " + std::to_string(it->second));
    }
    layout.key_owner.insert(layout.key_owner.end(), it->second,
                            seg.segment_id);
  }
  layout.key_owner.insert(layout.key_owner.end(), global_tokens, kGlobalOwner);
  layout.key_count = layout.key_owner.size();
  return layout;
}

TokenLayout build_token_layout(const SegmentSchedule& schedule,
                               int tokens_per_frame, int tokens_per_prompt,
                               int global_tokens) {
  std::map<std::string, int> counts;
  for (const TemporalSegment& seg : schedule.segments) {
    counts[seg.prompt_id] = tokens_per_prompt;
  }
  return build_token_layout(schedule, tokens_per_frame, counts, global_tokens);
}

}  // namespace relay
