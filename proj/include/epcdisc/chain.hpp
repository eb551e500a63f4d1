#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "epcdisc/store.hpp"

namespace epcdisc {

/// Business-step vocabulary for chain navigation. The fixtures mix URN and
/// URL vocabularies, so the mapping is configurable.
struct StepVocabulary {
    std::set<std::string> shipping = {
        "urn:epcglobal:cbv:bizstep:shipping",
        "https://ns.gs1.org/cbv/BizStep-departing",
        "https://ns.gs1.org/cbv/BizStep-shipping",
    };
    std::set<std::string> receiving = {
        "urn:epcglobal:cbv:bizstep:receiving",
        "https://ns.gs1.org/cbv/BizStep-accepting",
        "https://ns.gs1.org/cbv/BizStep-receiving",
    };
    std::set<std::string> commissioning = {
        "urn:epcglobal:cbv:bizstep:commissioning",
        "https://ns.gs1.org/cbv/BizStep-commissioning",
    };

    bool is_shipping(const std::string& step) const { return shipping.count(step) > 0; }
    bool is_receiving(const std::string& step) const { return receiving.count(step) > 0; }
    bool is_commissioning(const std::string& step) const
    {
        return commissioning.count(step) > 0;
    }
};

/// One verified possession change: a shipping event matched with its
/// receiving counterpart via shared party and transaction digests.
struct CustodyLink {
    NiUri ship_event_id;
    NiUri receive_event_id;
    std::string item_digest;
    std::string from_party_digest; // shared source digest
    std::string to_party_digest;   // shared destination digest
    std::optional<std::string> transaction_digest;

    bool operator==(const CustodyLink&) const = default;
};

struct ChainVerdict {
    enum class Status { Complete, Broken, Unknown };

    Status status = Status::Unknown;
    std::string item_digest;
    std::vector<CustodyLink> links;
    std::optional<std::string> gap;    // Broken: which ship/receive went unmatched
    std::optional<std::string> reason; // Unknown: why
    NiUri origin_event_id;
    NiUri terminal_event_id;
    // Which chain conditions held. Party continuity across hops is only
    // decidable when consecutive hops share a salt; absent otherwise.
    bool origin_found = false;
    bool all_changes_matched = false;
    std::optional<bool> party_continuity;
    std::map<std::string, ChainVerdict> component_verdicts;
};

/// Events in which the digest appears as an item identifier (epcList or the
/// assembly input/output lists), ascending event time.
inline std::vector<SanitisedEvent> fetch_history(const std::string& digest_hex,
                                                 const DiscoveryStore& store)
{
    std::vector<SanitisedEvent> out;
    for (auto& e : store.query_by_hash(digest_hex)) {
        bool as_item = false;
        for (const auto* list : {&e.epc_list, &e.input_epcs, &e.output_epcs})
            for (const auto& u : *list)
                as_item = as_item || u.digest_hex == digest_hex;
        if (as_item)
            out.push_back(std::move(e));
    }
    return out;
}

namespace detail {

// Digests shared by two ni-URI lists under equal type suffixes.
inline std::optional<std::string> shared_typed_digest(const std::vector<NiUri>& a,
                                                      const std::vector<NiUri>& b)
{
    for (const auto& x : a)
        for (const auto& y : b)
            if (x.digest_hex == y.digest_hex && x.query_suffix == y.query_suffix)
                return x.digest_hex;
    return std::nullopt;
}

inline std::optional<std::string> shared_digest(const std::vector<NiUri>& a,
                                                const std::vector<NiUri>& b)
{
    for (const auto& x : a)
        for (const auto& y : b)
            if (x.digest_hex == y.digest_hex)
                return x.digest_hex;
    return std::nullopt;
}

inline std::int64_t event_ms(const SanitisedEvent& e)
{
    auto ts = parse_timestamp(e.event_time);
    return ts ? ts->epoch_ms : 0;
}

} // namespace detail

struct MatchResult {
    std::vector<CustodyLink> links;
    std::vector<SanitisedEvent> unmatched; // ship or receive events left over
};

/// Pairs shipping with receiving events for one item. A pair links iff the
/// party digests match under equal type suffixes, transaction digests
/// intersect when both events carry transactions, and the receive is not
/// earlier than the ship. Greedy earliest-first, each event in at most one
/// link; candidates sharing a transaction digest win over ones that merely
/// match on parties.
inline MatchResult match_pairs(const std::vector<SanitisedEvent>& events,
                               const std::string& item_digest,
                               const StepVocabulary& vocab = {})
{
    std::vector<const SanitisedEvent*> ships, receives;
    for (const auto& e : events) {
        if (vocab.is_shipping(e.biz_step))
            ships.push_back(&e);
        else if (vocab.is_receiving(e.biz_step))
            receives.push_back(&e);
    }
    auto by_time = [](const SanitisedEvent* a, const SanitisedEvent* b) {
        auto ta = detail::event_ms(*a), tb = detail::event_ms(*b);
        if (ta != tb)
            return ta < tb;
        return a->event_id.digest_hex < b->event_id.digest_hex;
    };
    std::sort(ships.begin(), ships.end(), by_time);
    std::sort(receives.begin(), receives.end(), by_time);

    MatchResult result;
    std::set<const SanitisedEvent*> taken;
    for (const auto* s : ships) {
        const SanitisedEvent* best = nullptr;
        bool best_has_txn = false;
        std::optional<std::string> best_from, best_to, best_txn;
        for (const auto* r : receives) {
            if (taken.count(r) || detail::event_ms(*r) < detail::event_ms(*s))
                continue;
            auto from = detail::shared_typed_digest(s->source_list, r->source_list);
            auto to = detail::shared_typed_digest(s->destination_list,
                                                  r->destination_list);
            if (!from || !to)
                continue;
            std::optional<std::string> txn;
            bool both_have_txns = !s->biz_transaction_list.empty() &&
                                  !r->biz_transaction_list.empty();
            if (both_have_txns) {
                txn = detail::shared_digest(s->biz_transaction_list,
                                            r->biz_transaction_list);
                if (!txn)
                    continue;
            }
            bool has_txn = txn.has_value();
            if (!best || (has_txn && !best_has_txn)) {
                best = r;
                best_has_txn = has_txn;
                best_from = from;
                best_to = to;
                best_txn = txn;
                if (has_txn)
                    break; // earliest transaction-confirmed candidate
            }
        }
        if (best) {
            taken.insert(best);
            result.links.push_back(CustodyLink{s->event_id, best->event_id,
                                               item_digest, *best_from, *best_to,
                                               best_txn});
        } else {
            result.unmatched.push_back(*s);
        }
    }
    for (const auto* r : receives)
        if (!taken.count(r))
            result.unmatched.push_back(*r);
    return result;
}

namespace detail {

inline ChainVerdict verify_chain_impl(const std::string& digest_hex,
                                      const DiscoveryStore& store, bool recurse,
                                      const StepVocabulary& vocab,
                                      std::set<std::string>& visiting)
{
    ChainVerdict v;
    v.item_digest = digest_hex;
    auto history = fetch_history(digest_hex, store);
    if (history.empty()) {
        v.status = ChainVerdict::Status::Unknown;
        v.reason = "no events found for digest " + digest_hex;
        return v;
    }
    v.origin_event_id = history.front().event_id;
    v.terminal_event_id = history.back().event_id;

    const auto& earliest = history.front();
    v.origin_found = vocab.is_commissioning(earliest.biz_step) ||
                     earliest.event_type == "AssemblyEvent";

    auto matched = match_pairs(history, digest_hex, vocab);
    v.links = std::move(matched.links);
    v.all_changes_matched = matched.unmatched.empty();
    if (!v.all_changes_matched) {
        const auto& u = matched.unmatched.front();
        v.gap = std::string(vocab.is_shipping(u.biz_step) ? "shipping" : "receiving") +
                " event " + u.event_id.render() + " at " + u.event_time +
                " has no matching counterpart";
    } else if (!v.origin_found) {
        v.gap = "earliest event " + earliest.event_id.render() +
                " is not a commissioning or assembly event";
    }

    // Cross-hop continuity is only decidable when consecutive hops happen to
    // share a salt; different transactions mean different salts, so the same
    // party hashes to different digests. Report the check outcome when there
    // are at least two links, without letting it demote the verdict.
    if (v.links.size() >= 2) {
        bool held = true;
        for (std::size_t i = 0; i + 1 < v.links.size(); ++i)
            held = held &&
                   v.links[i].to_party_digest == v.links[i + 1].from_party_digest;
        v.party_continuity = held;
    }

    v.status = (v.origin_found && v.all_changes_matched)
                   ? ChainVerdict::Status::Complete
                   : ChainVerdict::Status::Broken;

    if (recurse) {
        // Descend into assembly inputs when the queried item is an assembly
        // output. Component verdicts are reported alongside, never demoting
        // the product verdict.
        std::set<std::string> inputs;
        for (const auto& e : history) {
            bool is_output = false;
            for (const auto& u : e.output_epcs)
                is_output = is_output || u.digest_hex == digest_hex;
            if (!is_output)
                continue;
            for (const auto& u : e.input_epcs)
                inputs.insert(u.digest_hex);
        }
        for (const auto& in : inputs) {
            if (visiting.count(in))
                continue; // cycle guard
            visiting.insert(in);
            v.component_verdicts.emplace(
                in, verify_chain_impl(in, store, recurse, vocab, visiting));
            visiting.erase(in);
        }
    }
    return v;
}

} // namespace detail

inline ChainVerdict verify_chain(const std::string& digest_hex,
                                 const DiscoveryStore& store, bool recurse = false,
                                 const StepVocabulary& vocab = {})
{
    if (!is_hex_digest(digest_hex))
        throw std::invalid_argument("verify_chain: malformed digest");
    std::set<std::string> visiting{digest_hex};
    return detail::verify_chain_impl(digest_hex, store, recurse, vocab, visiting);
}

inline nlohmann::ordered_json verdict_to_json(const ChainVerdict& v)
{
    nlohmann::ordered_json j;
    switch (v.status) {
    case ChainVerdict::Status::Complete: j["status"] = "complete"; break;
    case ChainVerdict::Status::Broken: j["status"] = "broken"; break;
    default: j["status"] = "unknown"; break;
    }
    j["itemDigest"] = v.item_digest;
    if (v.status == ChainVerdict::Status::Unknown) {
        if (v.reason)
            j["reason"] = *v.reason;
        return j;
    }
    j["originEventId"] = v.origin_event_id.render();
    j["terminalEventId"] = v.terminal_event_id.render();
    j["conditions"] = {{"originFound", v.origin_found},
                       {"allChangesMatched", v.all_changes_matched}};
    if (v.party_continuity)
        j["conditions"]["partyContinuity"] = *v.party_continuity;
    nlohmann::ordered_json links = nlohmann::ordered_json::array();
    for (const auto& l : v.links) {
        nlohmann::ordered_json lj;
        lj["shipEventId"] = l.ship_event_id.render();
        lj["receiveEventId"] = l.receive_event_id.render();
        lj["fromParty"] = l.from_party_digest;
        lj["toParty"] = l.to_party_digest;
        if (l.transaction_digest)
            lj["transaction"] = *l.transaction_digest;
        links.push_back(std::move(lj));
    }
    j["links"] = std::move(links);
    if (v.gap)
        j["gap"] = *v.gap;
    if (!v.component_verdicts.empty()) {
        nlohmann::ordered_json comps;
        for (const auto& [digest, verdict] : v.component_verdicts)
            comps[digest] = verdict_to_json(verdict);
        j["components"] = std::move(comps);
    }
    return j;
}

} // namespace epcdisc
