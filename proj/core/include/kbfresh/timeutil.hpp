#pragma once
// ISO-8601 timestamps as UTC unix seconds. Accepted forms:
//   YYYY-MM-DD                (midnight UTC)
//   YYYY-MM-DD[T ]HH:MM:SS    (optional trailing 'Z', fractional part dropped)

#include <cstdint>
#include <string>
#include <string_view>

namespace kbfresh {

using Timestamp = std::int64_t;

Timestamp parse_iso8601(std::string_view s);

// Always renders the full form, e.g. 2023-07-01T00:00:00Z.
std::string format_iso8601(Timestamp t);

// Labeling interval (start, end], written "start..end" on the CLI.
struct LabelWindow {
    Timestamp start = 0;
    Timestamp end = 0;

    bool contains(Timestamp t) const { return t > start && t <= end; }
};

// Parses "2023-07-01..2023-08-01"; requires start < end.
LabelWindow parse_window(std::string_view spec);

}  // namespace kbfresh
