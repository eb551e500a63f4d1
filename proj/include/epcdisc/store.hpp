#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "epcdisc/event.hpp"
#include "epcdisc/sanitiser.hpp"

namespace epcdisc {

struct StoreError {
    enum class Kind { Malformed, Conflict, Io };
    Kind kind;
    std::string message;
};

/// Append-only store of sanitised events with lookup by digest. Submission
/// metadata (origin, received_at) never appears in query responses.
class DiscoveryStore {
public:
    struct PutResult {
        NiUri event_id;
        bool inserted = false; // false when the identical event was already stored
    };

    DiscoveryStore() = default;
    // Movable for value-style construction; the mutex itself is not moved, so
    // only move a store that no other thread is using.
    DiscoveryStore(DiscoveryStore&& other) noexcept
        : by_id_(std::move(other.by_id_)),
          by_digest_(std::move(other.by_digest_)),
          order_(std::move(other.order_))
    {
    }
    DiscoveryStore& operator=(DiscoveryStore&& other) noexcept
    {
        by_id_ = std::move(other.by_id_);
        by_digest_ = std::move(other.by_digest_);
        order_ = std::move(other.order_);
        return *this;
    }

    /// Idempotent on event id; a different event with the same id is a conflict.
    PutResult put(const SanitisedEvent& e, std::string origin = {})
    {
        std::string path;
        if (auto err = structural_check(e, path))
            throw std::invalid_argument("put: " + path + ": " + *err);

        std::unique_lock lock(mutex_);
        const std::string& id = e.event_id.digest_hex;
        if (auto it = by_id_.find(id); it != by_id_.end()) {
            if (it->second.event != e)
                throw std::runtime_error(
                    "put: event id conflict with different content: " + id);
            return {e.event_id, false};
        }
        Record rec{e, std::move(origin)};
        for (const auto* u : rec.event.all_identifier_digests())
            by_digest_[u->digest_hex].insert(id);
        by_id_.emplace(id, std::move(rec));
        order_.push_back(id);
        return {e.event_id, true};
    }

    /// All events whose identifier digests contain `digest_hex`, ascending by
    /// event time, ties broken by event id. Matching ignores query suffixes.
    std::vector<SanitisedEvent> query_by_hash(const std::string& digest_hex) const
    {
        if (!is_hex_digest(digest_hex))
            throw std::invalid_argument("query_by_hash: malformed digest");
        std::shared_lock lock(mutex_);
        std::vector<SanitisedEvent> out;
        auto it = by_digest_.find(digest_hex);
        if (it == by_digest_.end())
            return out;
        for (const auto& id : it->second)
            out.push_back(by_id_.at(id).event);
        std::sort(out.begin(), out.end(),
                  [](const SanitisedEvent& a, const SanitisedEvent& b) {
                      auto ta = sort_key(a), tb = sort_key(b);
                      if (ta != tb)
                          return ta < tb;
                      return a.event_id.digest_hex < b.event_id.digest_hex;
                  });
        return out;
    }

    std::size_t size() const
    {
        std::shared_lock lock(mutex_);
        return by_id_.size();
    }

    /// Writes the journal: one SanitisedEvent JSON record per line, in
    /// insertion order.
    void snapshot(std::ostream& os) const
    {
        std::shared_lock lock(mutex_);
        for (const auto& id : order_)
            os << serialize_sanitised(by_id_.at(id).event) << '\n';
    }

    void snapshot_file(const std::string& path) const
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("snapshot: cannot open " + path);
        snapshot(f);
    }

    /// Replaces store contents from an NDJSON journal. A corrupt line fails
    /// the whole restore with its line number.
    void restore(std::istream& is)
    {
        std::vector<SanitisedEvent> events;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty())
                continue;
            std::string err;
            auto e = parse_sanitised_text(line, err);
            if (!e)
                throw std::runtime_error("restore: line " +
                                         std::to_string(lineno) + ": " + err);
            events.push_back(std::move(*e));
        }
        std::unique_lock lock(mutex_);
        by_id_.clear();
        by_digest_.clear();
        order_.clear();
        lock.unlock();
        for (auto& e : events)
            put(e);
    }

    void restore_file(const std::string& path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("restore: cannot open " + path);
        restore(f);
    }

private:
    struct Record {
        SanitisedEvent event;
        std::string origin; // never exposed via queries
    };

    static std::int64_t sort_key(const SanitisedEvent& e)
    {
        auto ts = parse_timestamp(e.event_time);
        return ts ? ts->epoch_ms : 0;
    }

    static std::optional<std::string> structural_check(const SanitisedEvent& e,
                                                       std::string& path)
    {
        if (!is_hex_digest(e.event_id.digest_hex)) {
            path = "eventId";
            return "malformed digest";
        }
        auto check_list = [&](const std::vector<NiUri>& xs,
                              const char* field) -> std::optional<std::string> {
            for (const auto& u : xs)
                if (!is_hex_digest(u.digest_hex)) {
                    path = field;
                    return "malformed digest";
                }
            return std::nullopt;
        };
        if (auto r = check_list(e.epc_list, "epcList"))
            return r;
        if (auto r = check_list(e.input_epcs, "inputEpcList"))
            return r;
        if (auto r = check_list(e.output_epcs, "outputEpcList"))
            return r;
        if (auto r = check_list(e.source_list, "sourceList"))
            return r;
        if (auto r = check_list(e.destination_list, "destinationList"))
            return r;
        if (auto r = check_list(e.biz_transaction_list, "bizTransactionList"))
            return r;
        return std::nullopt;
    }

    mutable std::shared_mutex mutex_;
    std::map<std::string, Record> by_id_;
    std::map<std::string, std::set<std::string>> by_digest_;
    std::vector<std::string> order_;
};

} // namespace epcdisc
