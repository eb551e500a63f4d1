#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace epcdisc {

enum class EventType { ObjectEvent, AssemblyEvent };
enum class Action { ADD, OBSERVE, DELETE_ };

inline std::string to_string(EventType t)
{
    return t == EventType::ObjectEvent ? "ObjectEvent" : "AssemblyEvent";
}

inline std::optional<EventType> event_type_from_string(std::string_view s)
{
    if (s == "ObjectEvent")
        return EventType::ObjectEvent;
    if (s == "AssemblyEvent")
        return EventType::AssemblyEvent;
    return std::nullopt;
}

inline std::string to_string(Action a)
{
    switch (a) {
    case Action::ADD: return "ADD";
    case Action::OBSERVE: return "OBSERVE";
    default: return "DELETE";
    }
}

inline std::optional<Action> action_from_string(std::string_view s)
{
    if (s == "ADD")
        return Action::ADD;
    if (s == "OBSERVE")
        return Action::OBSERVE;
    if (s == "DELETE")
        return Action::DELETE_;
    return std::nullopt;
}

/// ISO-8601 timestamp with explicit UTC offset, millisecond precision.
/// The original text is kept verbatim so serialisation is byte-faithful.
struct Timestamp {
    std::string text;     // e.g. "2021-04-28T00:00:00.000+02:00"
    std::int64_t epoch_ms = 0;
    std::string offset;   // "+02:00", "-05:00" or "Z"

    bool operator==(const Timestamp&) const = default;
};

namespace detail {
inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t n, int& out)
{
    if (pos + n > s.size())
        return false;
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9')
            return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

inline std::int64_t days_from_civil(int y, int m, int d)
{
    // Howard Hinnant's algorithm, days since 1970-01-01.
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}
} // namespace detail

/// Parses "YYYY-MM-DDTHH:MM:SS[.mmm](Z|±HH:MM)".
inline std::optional<Timestamp> parse_timestamp(std::string_view s)
{
    int Y, M, D, h, m, sec;
    if (!detail::parse_digits(s, 0, 4, Y) || s.size() < 20 || s[4] != '-' ||
        !detail::parse_digits(s, 5, 2, M) || s[7] != '-' ||
        !detail::parse_digits(s, 8, 2, D) || s[10] != 'T' ||
        !detail::parse_digits(s, 11, 2, h) || s[13] != ':' ||
        !detail::parse_digits(s, 14, 2, m) || s[16] != ':' ||
        !detail::parse_digits(s, 17, 2, sec))
        return std::nullopt;
    if (M < 1 || M > 12 || D < 1 || D > 31 || h > 23 || m > 59 || sec > 60)
        return std::nullopt;

    std::size_t pos = 19;
    int ms = 0;
    if (pos < s.size() && s[pos] == '.') {
        if (!detail::parse_digits(s, pos + 1, 3, ms))
            return std::nullopt;
        pos += 4;
    }
    if (pos >= s.size())
        return std::nullopt;

    std::string offset;
    int off_min = 0;
    if (s[pos] == 'Z') {
        offset = "Z";
        if (pos + 1 != s.size())
            return std::nullopt;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh, om;
        if (!detail::parse_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() ||
            s[pos + 3] != ':' || !detail::parse_digits(s, pos + 4, 2, om) ||
            pos + 6 != s.size())
            return std::nullopt;
        off_min = oh * 60 + om;
        if (s[pos] == '-')
            off_min = -off_min;
        offset = std::string(s.substr(pos, 6));
    } else {
        return std::nullopt;
    }

    std::int64_t days = detail::days_from_civil(Y, M, D);
    std::int64_t epoch_ms =
        ((days * 24 + h) * 60 + m - off_min) * 60000LL + sec * 1000LL + ms;
    return Timestamp{std::string(s), epoch_ms, offset};
}

using UriPair = std::pair<std::string, std::string>; // (type URI, value URI)

/// Clear-text EPCIS traceability event — the data owner's confidential record.
/// AssemblyEvent models the association event joining components to a product.
struct Event {
    EventType event_type = EventType::ObjectEvent;
    Timestamp event_time;
    std::optional<Timestamp> record_time;
    std::string event_time_zone_offset; // signed hh:mm, e.g. "+02:00"
    std::vector<std::string> epc_list;  // ObjectEvent
    std::vector<std::string> input_epcs;  // AssemblyEvent only
    std::vector<std::string> output_epcs; // AssemblyEvent only
    Action action = Action::OBSERVE;
    std::string biz_step;
    std::optional<std::string> disposition;
    std::optional<std::string> read_point;
    std::vector<UriPair> biz_transactions;
    std::vector<UriPair> sources;
    std::vector<UriPair> destinations;
    std::vector<std::pair<std::string, std::string>> extensions;

    bool operator==(const Event&) const = default;
};

struct ValidationReport {
    std::vector<std::pair<std::string, std::string>> errors;   // (field path, message)
    std::vector<std::pair<std::string, std::string>> warnings;

    bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const Event& e)
{
    ValidationReport r;
    auto err = [&r](std::string path, std::string msg) {
        r.errors.emplace_back(std::move(path), std::move(msg));
    };

    if (e.event_type == EventType::ObjectEvent) {
        if (e.epc_list.empty())
            err("epcList", "ObjectEvent requires a non-empty epcList");
        if (!e.input_epcs.empty() || !e.output_epcs.empty())
            err("inputEpcList", "ObjectEvent must not carry input/output EPC lists");
    } else {
        if (e.output_epcs.empty())
            err("outputEpcList", "AssemblyEvent requires non-empty outputEpcList");
    }

    if (e.event_time.text.empty())
        err("eventTime", "missing event time");
    else if (!e.event_time_zone_offset.empty() &&
             e.event_time.offset != e.event_time_zone_offset)
        err("eventTimeZoneOffset",
            "offset does not match the offset embedded in eventTime");

    if (e.biz_step.empty())
        err("bizStep", "missing bizStep");

    auto check_nonempty = [&err](const std::vector<std::string>& xs, const char* path) {
        for (const auto& x : xs)
            if (x.empty())
                err(path, "empty identifier");
    };
    check_nonempty(e.epc_list, "epcList");
    check_nonempty(e.input_epcs, "inputEpcList");
    check_nonempty(e.output_epcs, "outputEpcList");
    auto check_pairs = [&err](const std::vector<UriPair>& xs, const char* path) {
        for (const auto& [t, v] : xs)
            if (t.empty() || v.empty())
                err(path, "empty type or value");
    };
    check_pairs(e.biz_transactions, "bizTransactionList");
    check_pairs(e.sources, "sourceList");
    check_pairs(e.destinations, "destinationList");

    return r;
}

} // namespace epcdisc
