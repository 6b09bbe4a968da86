#pragma once

#include <string>
#include <string_view>

#include "relay/timeline.hpp"

namespace relay {

// Parses the JSON schedule document:
//
//   {
//     "video_frames": 12,
//     "global_prompt": "city street at dusk",   // optional
//     "segments": [
//       {"prompt": "pouring cereal", "start": 0, "end": 5},
//       {"prompt": "pouring milk",   "start": 6, "end": 11}
//     ]
//   }
//
// Unknown fields are rejected. The result is unvalidated; feed it to
// validate_schedule.
ScheduleSpec parse_schedule_json(std::string_view text);

ScheduleSpec load_schedule_file(const std::string& path);

}  // namespace relay
