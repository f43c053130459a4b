#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace lago {

// UTC instant at second granularity. Every datestamp on the wire and on disk
// uses this type.
using Timestamp = std::chrono::sys_seconds;

// YYYY-MM-DDThh:mm:ssZ
std::string format_datestamp(Timestamp t);
// YYYY-MM-DD
std::string format_date(Timestamp t);

// Accepts only YYYY-MM-DDThh:mm:ssZ.
std::optional<Timestamp> parse_datestamp(std::string_view text);

// True for a real calendar date written as YYYY-MM-DD.
bool is_calendar_date(std::string_view text);

struct OaiDate {
  Timestamp value;
  bool day_granularity = false;
};

// Accepts either OAI granularity. Day values map to 00:00:00 of that day.
std::optional<OaiDate> parse_oai_date(std::string_view text);

}  // namespace lago
