#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epcdisc/event.hpp"
#include "epcdisc/ni_uri.hpp"

namespace epcdisc {

/// How an attribute path is treated during sanitisation. Clear values are
/// copied verbatim, HashPlain values are hashed as-is (high entropy),
/// HashSalted values are hashed with the event's shared-secret salt (low
/// entropy, dictionary-attackable otherwise), Drop values never leave the
/// data owner.
enum class Classification { Clear, HashPlain, HashSalted, Drop };

enum class SaltSource { None, BizTransactionValue };

struct SanitiserConfig {
    std::string dead_drop_url = "https://discovery.epcat.de/dead_drop";
    SaltSource salt_source = SaltSource::BizTransactionValue;
    std::map<std::string, Classification> classification_overrides;
};

/// The attribute paths of Event, as used by classify and the event-id
/// canonicalisation.
inline const std::vector<std::string>& attribute_paths()
{
    static const std::vector<std::string> paths = {
        "eventType",
        "eventTime",
        "recordTime",
        "eventTimeZoneOffset",
        "epcList[*]",
        "inputEpcList[*]",
        "outputEpcList[*]",
        "action",
        "bizStep",
        "disposition",
        "readPoint",
        "bizTransactionList[*].type",
        "bizTransactionList[*].value",
        "sourceList[*].type",
        "sourceList[*].value",
        "destinationList[*].type",
        "destinationList[*].value",
        "extensions[*]",
    };
    return paths;
}

inline Classification classify(std::string_view path, const SanitiserConfig& cfg)
{
    const auto& known = attribute_paths();
    if (std::find(known.begin(), known.end(), path) == known.end())
        throw std::invalid_argument("classify: unknown attribute path '" +
                                    std::string(path) + "'");
    if (auto it = cfg.classification_overrides.find(std::string(path));
        it != cfg.classification_overrides.end())
        return it->second;

    if (path == "eventType" || path == "eventTime" || path == "action" ||
        path == "bizStep" || path == "bizTransactionList[*].type" ||
        path == "sourceList[*].type" || path == "destinationList[*].type")
        return Classification::Clear;
    if (path == "epcList[*]" || path == "inputEpcList[*]" ||
        path == "outputEpcList[*]" || path == "bizTransactionList[*].value")
        return Classification::HashPlain;
    if (path == "sourceList[*].value" || path == "destinationList[*].value")
        return Classification::HashSalted;
    return Classification::Drop;
}

/// Salt shared by matching events: the value of the first business
/// transaction after sorting pairs by (type, value). Shipping and receiving
/// legs of the same transaction carry the same reference and therefore
/// derive the same salt.
inline std::optional<std::string> derive_salt(const Event& e, const SanitiserConfig& cfg)
{
    if (cfg.salt_source == SaltSource::None || e.biz_transactions.empty())
        return std::nullopt;
    auto sorted = e.biz_transactions;
    std::sort(sorted.begin(), sorted.end());
    return sorted.front().second;
}

/// Canonical pre-hash string for the event id: every non-Drop attribute of
/// the clear-text event as "path=value", sorted by (path, value), joined
/// with '\n'. Equal events yield equal ids; any attribute change yields a
/// different id.
inline std::string event_id_prehash(const Event& e, const SanitiserConfig& cfg)
{
    std::vector<std::pair<std::string, std::string>> pairs;
    auto add = [&](const char* path, const std::string& value) {
        if (classify(path, cfg) != Classification::Drop)
            pairs.emplace_back(path, value);
    };

    add("eventType", to_string(e.event_type));
    add("eventTime", e.event_time.text);
    if (e.record_time)
        add("recordTime", e.record_time->text);
    if (!e.event_time_zone_offset.empty())
        add("eventTimeZoneOffset", e.event_time_zone_offset);
    for (const auto& epc : e.epc_list)
        add("epcList[*]", epc);
    for (const auto& epc : e.input_epcs)
        add("inputEpcList[*]", epc);
    for (const auto& epc : e.output_epcs)
        add("outputEpcList[*]", epc);
    add("action", to_string(e.action));
    add("bizStep", e.biz_step);
    if (e.disposition)
        add("disposition", *e.disposition);
    if (e.read_point)
        add("readPoint", *e.read_point);
    for (const auto& [t, v] : e.biz_transactions) {
        add("bizTransactionList[*].type", t);
        add("bizTransactionList[*].value", v);
    }
    for (const auto& [t, v] : e.sources) {
        add("sourceList[*].type", t);
        add("sourceList[*].value", v);
    }
    for (const auto& [t, v] : e.destinations) {
        add("destinationList[*].type", t);
        add("destinationList[*].value", v);
    }

    std::sort(pairs.begin(), pairs.end());
    std::string out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i)
            out += '\n';
        out += pairs[i].first;
        out += '=';
        out += pairs[i].second;
    }
    return out;
}

inline NiUri compute_event_id(const Event& e, const SanitiserConfig& cfg = {})
{
    if (!validate(e).ok())
        throw std::invalid_argument("compute_event_id: invalid event");
    NiUri id = ni_hash(event_id_prehash(e, cfg));
    id.query_suffix = "ver=CBV2.0";
    return id;
}

/// The public, minimised, hashed projection of an Event.
struct SanitisedEvent {
    std::string request_event_data_at;
    std::string event_type; // "ObjectEvent" | "AssemblyEvent"
    NiUri event_id;         // query_suffix "ver=CBV2.0"
    std::string event_time;
    std::string action;
    std::vector<NiUri> epc_list;
    std::vector<NiUri> input_epcs;
    std::vector<NiUri> output_epcs;
    std::string biz_step;
    std::vector<NiUri> source_list;      // query_suffix "type=<clear type URI>"
    std::vector<NiUri> destination_list; // likewise
    std::vector<NiUri> biz_transaction_list;

    bool operator==(const SanitisedEvent&) const = default;

    /// Every digest the event carries, event id excluded.
    std::vector<const NiUri*> all_identifier_digests() const
    {
        std::vector<const NiUri*> out;
        for (const auto* list : {&epc_list, &input_epcs, &output_epcs,
                                 &source_list, &destination_list,
                                 &biz_transaction_list})
            for (const auto& u : *list)
                out.push_back(&u);
        return out;
    }
};

struct SanitiseResult {
    SanitisedEvent event;
    std::vector<std::string> warnings;
};

inline SanitiseResult sanitise(const Event& e, const SanitiserConfig& cfg = {})
{
    if (!validate(e).ok())
        throw std::invalid_argument("sanitise: invalid event");

    SanitiseResult result;
    auto& out = result.event;
    auto salt = derive_salt(e, cfg);

    auto hash_value = [&](const std::string& value, const char* path) -> NiUri {
        auto cls = classify(path, cfg);
        if (cls == Classification::HashSalted) {
            if (salt)
                return salted_hash(value, *salt);
            // Commissioning events may predate any transaction; degrade to a
            // plain hash rather than failing the pipeline.
            result.warnings.push_back(std::string("no salt available; ") + path +
                                      " hashed without salt");
        }
        return ni_hash(value);
    };
    auto clear_or_empty = [&](const std::string& value, const char* path) {
        return classify(path, cfg) == Classification::Clear ? value : std::string();
    };

    out.request_event_data_at = cfg.dead_drop_url;
    out.event_type = to_string(e.event_type);
    out.event_id = compute_event_id(e, cfg);
    out.event_time = clear_or_empty(e.event_time.text, "eventTime");
    out.action = clear_or_empty(to_string(e.action), "action");
    out.biz_step = clear_or_empty(e.biz_step, "bizStep");
    for (const auto& epc : e.epc_list)
        out.epc_list.push_back(hash_value(epc, "epcList[*]"));
    for (const auto& epc : e.input_epcs)
        out.input_epcs.push_back(hash_value(epc, "inputEpcList[*]"));
    for (const auto& epc : e.output_epcs)
        out.output_epcs.push_back(hash_value(epc, "outputEpcList[*]"));

    auto hash_pairs = [&](const std::vector<UriPair>& xs, const char* value_path,
                          const char* type_path) {
        std::vector<NiUri> hashed;
        for (const auto& [type, value] : xs) {
            NiUri u = hash_value(value, value_path);
            if (classify(type_path, cfg) == Classification::Clear)
                u.query_suffix = "type=" + type;
            hashed.push_back(std::move(u));
        }
        return hashed;
    };
    out.source_list =
        hash_pairs(e.sources, "sourceList[*].value", "sourceList[*].type");
    out.destination_list = hash_pairs(e.destinations, "destinationList[*].value",
                                      "destinationList[*].type");
    out.biz_transaction_list =
        hash_pairs(e.biz_transactions, "bizTransactionList[*].value",
                   "bizTransactionList[*].type");
    return result;
}

// --- SanitisedEvent JSON (wire form) ---------------------

inline nlohmann::ordered_json sanitised_to_json(const SanitisedEvent& e)
{
    nlohmann::ordered_json j;
    auto render_list = [](const std::vector<NiUri>& xs) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& u : xs)
            arr.push_back(u.render());
        return arr;
    };
    j["request_event_data_at"] = e.request_event_data_at;
    j["eventType"] = e.event_type;
    j["eventId"] = e.event_id.render();
    j["eventTime"] = e.event_time;
    j["action"] = e.action;
    if (e.event_type == "AssemblyEvent") {
        j["inputEpcList"] = render_list(e.input_epcs);
        j["outputEpcList"] = render_list(e.output_epcs);
    } else {
        j["epcList"] = render_list(e.epc_list);
    }
    j["bizStep"] = e.biz_step;
    j["sourceList"] = render_list(e.source_list);
    j["destinationList"] = render_list(e.destination_list);
    j["bizTransactionList"] = render_list(e.biz_transaction_list);
    return j;
}

inline std::string serialize_sanitised(const SanitisedEvent& e)
{
    return sanitised_to_json(e).dump();
}

/// Parses and structurally validates a SanitisedEvent; on failure returns
/// the offending field path in `err`.
inline std::optional<SanitisedEvent> parse_sanitised(const nlohmann::json& j,
                                                     std::string& err)
{
    SanitisedEvent e;
    auto need_string = [&](const char* field, std::string& out) {
        if (!j.contains(field) || !j[field].is_string()) {
            err = std::string(field) + ": expected string";
            return false;
        }
        out = j[field].get<std::string>();
        return true;
    };
    auto read_ni_list = [&](const char* field, std::vector<NiUri>& out,
                            bool required) {
        if (!j.contains(field)) {
            if (required)
                err = std::string(field) + ": missing";
            return !required;
        }
        if (!j[field].is_array()) {
            err = std::string(field) + ": expected array";
            return false;
        }
        for (const auto& x : j[field]) {
            auto u = x.is_string() ? parse_ni_uri(x.get<std::string>())
                                   : std::nullopt;
            if (!u) {
                err = std::string(field) + ": expected ni URI";
                return false;
            }
            out.push_back(std::move(*u));
        }
        return true;
    };

    if (!need_string("request_event_data_at", e.request_event_data_at) ||
        !need_string("eventType", e.event_type) ||
        !need_string("eventTime", e.event_time) ||
        !need_string("action", e.action) || !need_string("bizStep", e.biz_step))
        return std::nullopt;
    if (e.event_type != "ObjectEvent" && e.event_type != "AssemblyEvent") {
        err = "eventType: unknown value '" + e.event_type + "'";
        return std::nullopt;
    }
    std::string id;
    if (!need_string("eventId", id))
        return std::nullopt;
    auto parsed_id = parse_ni_uri(id);
    if (!parsed_id) {
        err = "eventId: expected ni URI";
        return std::nullopt;
    }
    e.event_id = std::move(*parsed_id);

    bool assembly = e.event_type == "AssemblyEvent";
    if (!read_ni_list("epcList", e.epc_list, !assembly) ||
        !read_ni_list("inputEpcList", e.input_epcs, false) ||
        !read_ni_list("outputEpcList", e.output_epcs, assembly) ||
        !read_ni_list("sourceList", e.source_list, false) ||
        !read_ni_list("destinationList", e.destination_list, false) ||
        !read_ni_list("bizTransactionList", e.biz_transaction_list, false))
        return std::nullopt;
    return e;
}

inline std::optional<SanitisedEvent> parse_sanitised_text(std::string_view text,
                                                     std::string& err)
{
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        err = "malformed JSON";
        return std::nullopt;
    }
    return parse_sanitised(j, err);
}

} // namespace epcdisc
