#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "evdenoise/event.hpp"

namespace evdenoise {

// csv:    "# evdenoise-csv v1 W=<int> H=<int>" then "x,y,t,p,label" per line,
//         p in {0,1} (1 = positive), label in {0,1,2} (noise, signal, unlabeled).
// packed: "EVD1", u16 W, u16 H, u64 count, then 14-byte records
//         u16 x, u16 y, u64 t, u8 p, u8 label. All little-endian.
enum class EventFormat { kCsv, kPacked };

inline constexpr std::size_t kPackedHeaderBytes = 4 + 2 + 2 + 8;
inline constexpr std::size_t kPackedRecordBytes = 2 + 2 + 8 + 1 + 1;

// Accepts "csv" or "packed".
EventFormat parse_event_format(std::string_view name);

// Picks the format from the extension: ".evd"/".bin" are packed, anything else csv.
EventFormat format_from_path(const std::filesystem::path& path);

EventStream read_events(const std::filesystem::path& path, EventFormat format);
EventStream read_events(std::istream& in, EventFormat format);

// The file appears only once completely written (written to a temporary
// sibling and renamed).
void write_events(const EventStream& stream, const std::filesystem::path& path,
                  EventFormat format);
void write_events(const EventStream& stream, std::ostream& out, EventFormat format);

}  // namespace evdenoise
