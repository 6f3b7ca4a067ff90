#include "evdenoise/event_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "evdenoise/errors.hpp"
#include "evdenoise/file_util.hpp"
#include "le_io.hpp"

namespace evdenoise {

namespace {

constexpr std::string_view kCsvTag = "# evdenoise-csv v1";
constexpr std::string_view kPackedMagic = "EVD1";

std::uint64_t parse_uint(std::string_view field, std::size_t line, const char* what) {
    std::uint64_t value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
    }
    return value;
}

SensorGeometry parse_csv_header(std::string_view header) {
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header.substr(0, kCsvTag.size()) != kCsvTag) {
        throw ParseError("missing '# evdenoise-csv v1' header", 1);
    }
    std::string_view rest = header.substr(kCsvTag.size());
    std::uint64_t w = 0;
    std::uint64_t h = 0;
    bool have_w = false;
    bool have_h = false;
    while (!rest.empty()) {
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        if (rest.empty()) break;
        const auto end = rest.find(' ');
        std::string_view token = rest.substr(0, end);
        rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
        if (token.starts_with("W=")) {
            w = parse_uint(token.substr(2), 1, "header width");
            have_w = true;
        } else if (token.starts_with("H=")) {
            h = parse_uint(token.substr(2), 1, "header height");
            have_h = true;
        } else {
            throw ParseError("unexpected header token '" + std::string(token) + "'", 1);
        }
    }
    if (!have_w || !have_h) throw ParseError("header must declare W= and H=", 1);
    if (w < 1 || h < 1 || w > 0xFFFF || h > 0xFFFF) {
        throw ValidationError("header geometry out of range");
    }
    return SensorGeometry{static_cast<std::uint16_t>(w), static_cast<std::uint16_t>(h)};
}

void check_event(const SensorGeometry& g, std::uint64_t x, std::uint64_t y, std::uint64_t t,
                 std::uint64_t prev_t, bool has_prev, std::size_t location) {
    if (x >= g.width || y >= g.height) {
        throw ValidationError("event at (" + std::to_string(x) + "," + std::to_string(y) +
                              ") outside geometry, at " + std::to_string(location));
    }
    if (has_prev && t < prev_t) {
        throw OrderingError("decreasing timestamp " + std::to_string(prev_t) + " -> " +
                            std::to_string(t) + " at " + std::to_string(location));
    }
}

EventStream read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file, missing header", 1);
    const SensorGeometry geometry = parse_csv_header(line);

    std::vector<Event> events;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rec = line;
        if (!rec.empty() && rec.back() == '\r') rec.remove_suffix(1);
        if (rec.empty()) continue;
        std::string_view fields[5];
        std::size_t n = 0;
        while (true) {
            const auto comma = rec.find(',');
            if (n == 5) throw ParseError("too many fields", line_no);
            fields[n++] = rec.substr(0, comma);
            if (comma == std::string_view::npos) break;
            rec.remove_prefix(comma + 1);
        }
        if (n != 5) throw ParseError("expected 5 fields x,y,t,p,label", line_no);
        const auto x = parse_uint(fields[0], line_no, "x");
        const auto y = parse_uint(fields[1], line_no, "y");
        const auto t = parse_uint(fields[2], line_no, "t");
        const auto p = parse_uint(fields[3], line_no, "polarity");
        const auto label = parse_uint(fields[4], line_no, "label");
        if (p > 1) throw ParseError("polarity must be 0 or 1", line_no);
        if (label > 2) throw ParseError("label must be 0, 1 or 2", line_no);
        check_event(geometry, x, y, t, events.empty() ? 0 : events.back().t, !events.empty(),
                    line_no);
        events.push_back(Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), t,
                               static_cast<Polarity>(p), static_cast<Label>(label)});
    }
    return EventStream(geometry, std::move(events));
}

EventStream read_packed(std::istream& in) {
    std::size_t offset = 0;
    detail::expect_magic(in, kPackedMagic, offset);
    const auto w = detail::get_le<std::uint16_t>(in, offset);
    const auto h = detail::get_le<std::uint16_t>(in, offset);
    const auto count = detail::get_le<std::uint64_t>(in, offset);
    const SensorGeometry geometry{w, h};
    if (w < 1 || h < 1) throw ValidationError("packed header geometry must be at least 1x1");

    std::vector<Event> events;
    // Guard the reservation against corrupt counts; the loop still detects truncation.
    events.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::size_t record_start = offset;
        const auto x = detail::get_le<std::uint16_t>(in, offset);
        const auto y = detail::get_le<std::uint16_t>(in, offset);
        const auto t = detail::get_le<std::uint64_t>(in, offset);
        const auto p = detail::get_le<std::uint8_t>(in, offset);
        const auto label = detail::get_le<std::uint8_t>(in, offset);
        if (p > 1) throw ParseError("polarity must be 0 or 1", record_start);
        if (label > 2) throw ParseError("label must be 0, 1 or 2", record_start);
        check_event(geometry, x, y, t, events.empty() ? 0 : events.back().t, !events.empty(),
                    record_start);
        events.push_back(Event{x, y, t, static_cast<Polarity>(p), static_cast<Label>(label)});
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ParseError("trailing bytes after last record", offset);
    }
    return EventStream(geometry, std::move(events));
}

void write_csv(const EventStream& stream, std::ostream& out) {
    const auto& g = stream.geometry();
    out << kCsvTag << " W=" << g.width << " H=" << g.height << '\n';
    std::string buf;
    buf.reserve(1 << 16);
    char tmp[24];
    auto append = [&](std::uint64_t v) {
        auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
        buf.append(tmp, ptr);
    };
    for (const Event& e : stream) {
        append(e.x);
        buf.push_back(',');
        append(e.y);
        buf.push_back(',');
        append(e.t);
        buf.push_back(',');
        append(static_cast<unsigned>(e.p));
        buf.push_back(',');
        append(static_cast<unsigned>(e.label));
        buf.push_back('\n');
        if (buf.size() > (1 << 16) - 64) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_packed(const EventStream& stream, std::ostream& out) {
    out.write(kPackedMagic.data(), kPackedMagic.size());
    detail::put_le(out, stream.geometry().width);
    detail::put_le(out, stream.geometry().height);
    detail::put_le(out, static_cast<std::uint64_t>(stream.size()));
    for (const Event& e : stream) {
        detail::put_le(out, e.x);
        detail::put_le(out, e.y);
        detail::put_le(out, e.t);
        detail::put_le(out, static_cast<std::uint8_t>(e.p));
        detail::put_le(out, static_cast<std::uint8_t>(e.label));
    }
}

}  // namespace

EventFormat parse_event_format(std::string_view name) {
    if (name == "csv") return EventFormat::kCsv;
    if (name == "packed") return EventFormat::kPacked;
    throw ConfigError("unknown event format '" + std::string(name) + "' (expected csv or packed)");
}

EventFormat format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".evd" || ext == ".bin") ? EventFormat::kPacked : EventFormat::kCsv;
}

EventStream read_events(std::istream& in, EventFormat format) {
    return format == EventFormat::kCsv ? read_csv(in) : read_packed(in);
}

EventStream read_events(const std::filesystem::path& path, EventFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open event file " + path.string());
    return read_events(in, format);
}

void write_events(const EventStream& stream, std::ostream& out, EventFormat format) {
    if (format == EventFormat::kCsv) {
        write_csv(stream, out);
    } else {
        write_packed(stream, out);
    }
}

void write_events(const EventStream& stream, const std::filesystem::path& path,
                  EventFormat format) {
    write_file_atomic(path, [&](std::ostream& out) { write_events(stream, out, format); });
}

}  // namespace evdenoise
