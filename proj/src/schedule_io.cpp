#include "relay/schedule_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relay {

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& object,
                           std::initializer_list<const char*> known,
                           const char* where) {
  for (const auto& item : object.items()) {
    bool recognized = false;
    for (const char* name : known) {
      if (item.key() == name) {
        recognized = true;
        break;
      }
    }
    if (!recognized) {
      throw ScheduleError(std::string("schedule: unknown field \"") +
                          item.key() + "\" in " + where);
    }
  }
}

int require_int(const json& object, const char* field, const char* where) {
  auto it = object.find(field);
  if (it == object.end()) {
    throw ScheduleError(std::string("schedule: missing field \"") + field +
                        "\" in " + where);
  }
  if (!it->is_number_integer()) {
    throw ScheduleError(std::string("schedule: field \"") + field + "\" in " +
                        where + " must be an integer");
  }
  return it->get<int>();
}

std::string require_string(const json& object, const char* field,
                           const char* where) {
  auto it = object.find(field);
  if (it == object.end()) {
    throw ScheduleError(std::string("schedule: missing field \"") + field +
                        "\" in " + where);
  }
  if (!it->is_string()) {
    throw ScheduleError(std::string("schedule: field \"") + field + "\" in " +
                        where + " must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

ScheduleSpec parse_schedule_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScheduleError(std::string("schedule: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ScheduleError("schedule: top-level value must be an object");
  }
  reject_unknown_fields(doc, {"video_frames", "global_prompt", "segments"},
                        "the top-level object");

  ScheduleSpec spec;
  spec.video_frames = require_int(doc, "video_frames", "the top-level object");

  if (auto it = doc.find("global_prompt"); it != doc.end()) {
    if (!it->is_string()) {
      throw ScheduleError("schedule: field \"global_prompt\" must be a string");
    }
    spec.global_prompt = it->get<std::string>();
  }

  auto segs = doc.find("segments");
  if (segs == doc.end()) {
    throw ScheduleError("schedule: missing field \"segments\"");
  }
  if (!segs->is_array()) {
    throw ScheduleError("schedule: field \"segments\" must be a list");
  }
  for (const json& entry : *segs) {
    if (!entry.is_object()) {
      throw ScheduleError("schedule: each segment must be an object");
    }
    reject_unknown_fields(entry, {"prompt", "start", "end"}, "a segment");
    ScheduleSpec::Item item;
    item.prompt = require_string(entry, "prompt", "a segment");
    item.start = require_int(entry, "start", "a segment");
    item.end = require_int(entry, "end", "a segment");
    spec.segments.push_back(std::move(item));
  }
  return spec;
}

ScheduleSpec load_schedule_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScheduleError("cannot open schedule file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_schedule_json(buffer.str());
}

}  // namespace relay
