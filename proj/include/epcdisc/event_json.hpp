#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epcdisc/event.hpp"

namespace epcdisc {

using ordered_json = nlohmann::ordered_json;

struct JsonParseResult {
    std::vector<Event> events;
    std::optional<std::string> error; // field path + message

    bool ok() const { return !error.has_value(); }
};

inline ordered_json event_to_json(const Event& e)
{
    ordered_json j;
    j["eventType"] = to_string(e.event_type);
    j["eventTime"] = e.event_time.text;
    if (e.record_time)
        j["recordTime"] = e.record_time->text;
    if (!e.event_time_zone_offset.empty())
        j["eventTimeZoneOffset"] = e.event_time_zone_offset;
    if (e.event_type == EventType::ObjectEvent) {
        j["epcList"] = e.epc_list;
    } else {
        j["inputEpcList"] = e.input_epcs;
        j["outputEpcList"] = e.output_epcs;
    }
    j["action"] = to_string(e.action);
    j["bizStep"] = e.biz_step;
    if (e.disposition)
        j["disposition"] = *e.disposition;
    if (e.read_point)
        j["readPoint"] = *e.read_point;
    auto pairs = [](const std::vector<UriPair>& xs) {
        ordered_json arr = ordered_json::array();
        for (const auto& [t, v] : xs)
            arr.push_back({{"type", t}, {"value", v}});
        return arr;
    };
    if (!e.biz_transactions.empty())
        j["bizTransactionList"] = pairs(e.biz_transactions);
    if (!e.sources.empty())
        j["sourceList"] = pairs(e.sources);
    if (!e.destinations.empty())
        j["destinationList"] = pairs(e.destinations);
    if (!e.extensions.empty()) {
        ordered_json ext = ordered_json::array();
        for (const auto& [k, v] : e.extensions)
            ext.push_back({{"key", k}, {"value", v}});
        j["extensions"] = ext;
    }
    return j;
}

inline std::string serialize_event_json(const Event& e)
{
    return event_to_json(e).dump();
}

namespace detail {

inline std::optional<Event> event_from_json(const ordered_json& j, std::size_t index,
                                            std::string& err)
{
    auto path = [index](std::string_view field) {
        return "[" + std::to_string(index) + "]." + std::string(field);
    };
    auto need_string = [&](const char* field, std::string& out) {
        if (!j.contains(field) || !j[field].is_string()) {
            err = path(field) + ": expected string";
            return false;
        }
        out = j[field].get<std::string>();
        return true;
    };

    Event e;
    std::string s;
    if (!need_string("eventType", s))
        return std::nullopt;
    auto et = event_type_from_string(s);
    if (!et) {
        err = path("eventType") + ": unknown event type '" + s + "'";
        return std::nullopt;
    }
    e.event_type = *et;

    if (!need_string("eventTime", s))
        return std::nullopt;
    auto ts = parse_timestamp(s);
    if (!ts) {
        err = path("eventTime") + ": unparseable timestamp";
        return std::nullopt;
    }
    e.event_time = *ts;

    if (j.contains("recordTime")) {
        auto rt = j["recordTime"].is_string()
                      ? parse_timestamp(j["recordTime"].get<std::string>())
                      : std::nullopt;
        if (!rt) {
            err = path("recordTime") + ": unparseable timestamp";
            return std::nullopt;
        }
        e.record_time = *rt;
    }
    if (j.contains("eventTimeZoneOffset")) {
        if (!j["eventTimeZoneOffset"].is_string()) {
            err = path("eventTimeZoneOffset") + ": expected string";
            return std::nullopt;
        }
        e.event_time_zone_offset = j["eventTimeZoneOffset"].get<std::string>();
    }

    auto read_epcs = [&](const char* field, std::vector<std::string>& out) {
        if (!j.contains(field))
            return true;
        if (!j[field].is_array()) {
            err = path(field) + ": expected array";
            return false;
        }
        for (const auto& x : j[field]) {
            if (!x.is_string()) {
                err = path(field) + ": expected string elements";
                return false;
            }
            out.push_back(x.get<std::string>());
        }
        return true;
    };
    if (!read_epcs("epcList", e.epc_list) ||
        !read_epcs("inputEpcList", e.input_epcs) ||
        !read_epcs("outputEpcList", e.output_epcs))
        return std::nullopt;

    if (!need_string("action", s))
        return std::nullopt;
    auto a = action_from_string(s);
    if (!a) {
        err = path("action") + ": unknown action '" + s + "'";
        return std::nullopt;
    }
    e.action = *a;

    if (!need_string("bizStep", e.biz_step))
        return std::nullopt;
    if (j.contains("disposition")) {
        if (!need_string("disposition", s))
            return std::nullopt;
        e.disposition = s;
    }
    if (j.contains("readPoint")) {
        if (!need_string("readPoint", s))
            return std::nullopt;
        e.read_point = s;
    }

    auto read_pairs = [&](const char* field, std::vector<UriPair>& out) {
        if (!j.contains(field))
            return true;
        if (!j[field].is_array()) {
            err = path(field) + ": expected array";
            return false;
        }
        for (const auto& x : j[field]) {
            if (!x.is_object() || !x.contains("type") || !x.contains("value") ||
                !x["type"].is_string() || !x["value"].is_string()) {
                err = path(field) + ": expected {type, value} objects";
                return false;
            }
            out.emplace_back(x["type"].get<std::string>(),
                             x["value"].get<std::string>());
        }
        return true;
    };
    if (!read_pairs("bizTransactionList", e.biz_transactions) ||
        !read_pairs("sourceList", e.sources) ||
        !read_pairs("destinationList", e.destinations))
        return std::nullopt;

    if (j.contains("extensions")) {
        if (!j["extensions"].is_array()) {
            err = path("extensions") + ": expected array";
            return std::nullopt;
        }
        for (const auto& x : j["extensions"]) {
            if (!x.is_object() || !x.contains("key") || !x.contains("value")) {
                err = path("extensions") + ": expected {key, value} objects";
                return std::nullopt;
            }
            e.extensions.emplace_back(x["key"].get<std::string>(),
                                      x["value"].get<std::string>());
        }
    }
    return e;
}

} // namespace detail

/// Parses a JSON array of clear-text events (the JSON twin of the XML form).
inline JsonParseResult parse_event_json(std::string_view input)
{
    JsonParseResult result;
    ordered_json doc = ordered_json::parse(input, nullptr, false);
    if (doc.is_discarded()) {
        result.error = "malformed JSON document";
        return result;
    }
    if (!doc.is_array()) {
        result.error = "$: expected a JSON array of events";
        return result;
    }
    for (std::size_t i = 0; i < doc.size(); ++i) {
        std::string err;
        auto e = detail::event_from_json(doc[i], i, err);
        if (!e) {
            result.error = err;
            return result;
        }
        result.events.push_back(std::move(*e));
    }
    return result;
}

} // namespace epcdisc
