#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epcdisc/event.hpp"
#include "epcdisc/sha256.hpp"
#include "epcdisc/signature.hpp"

namespace epcdisc {

/// Wall-clock instant for dead-drop expiry, wire form "YYYY-MM-DD HH:MM:SS"
/// interpreted as UTC (the request format carries no timezone).
struct WallTime {
    std::int64_t epoch_s = 0;
    std::string text;

    bool operator==(const WallTime&) const = default;
    auto operator<=>(const WallTime& o) const { return epoch_s <=> o.epoch_s; }
};

inline std::optional<WallTime> parse_wall_time(std::string_view s)
{
    int Y, M, D, h, m, sec;
    if (s.size() != 19 || s[10] != ' ')
        return std::nullopt;
    if (!detail::parse_digits(s, 0, 4, Y) || s[4] != '-' ||
        !detail::parse_digits(s, 5, 2, M) || s[7] != '-' ||
        !detail::parse_digits(s, 8, 2, D) ||
        !detail::parse_digits(s, 11, 2, h) || s[13] != ':' ||
        !detail::parse_digits(s, 14, 2, m) || s[16] != ':' ||
        !detail::parse_digits(s, 17, 2, sec))
        return std::nullopt;
    if (M < 1 || M > 12 || D < 1 || D > 31 || h > 23 || m > 59 || sec > 60)
        return std::nullopt;
    std::int64_t epoch =
        (detail::days_from_civil(Y, M, D) * 24 + h) * 3600LL + m * 60 + sec;
    return WallTime{epoch, std::string(s)};
}

enum class Protocol { POST, EMAIL, OTHER };

struct Recipient {
    std::string endpoint; // URL, mail address, phone number, ...
    Protocol protocol = Protocol::POST;
    std::string other_protocol; // set when protocol == OTHER

    bool operator==(const Recipient&) const = default;
};

inline std::string to_string(const Recipient& r)
{
    switch (r.protocol) {
    case Protocol::POST: return "POST";
    case Protocol::EMAIL: return "EMAIL";
    default: return r.other_protocol;
    }
}

/// A data access request as posted to the dead drop: the hashed identifier
/// being asked about, where to send the answer, optional credentials, and an
/// expiry after which the request vanishes.
struct AccessRequest {
    std::string requesting; // 64-hex digest of the target identifier
    Recipient recipient;
    std::optional<nlohmann::json> auth; // opaque credential object
    WallTime valid_until;

    bool operator==(const AccessRequest&) const = default;
};

inline nlohmann::ordered_json access_request_to_json(const AccessRequest& r)
{
    nlohmann::ordered_json j;
    j["requesting"] = r.requesting;
    j["recipient"] = {{"endpoint", r.recipient.endpoint},
                      {"protocol", to_string(r.recipient)}};
    if (r.auth)
        j["auth"] = *r.auth;
    j["valid_until"] = r.valid_until.text;
    return j;
}

inline std::optional<AccessRequest> parse_access_request(const nlohmann::json& j,
                                                         std::string& err)
{
    AccessRequest r;
    if (!j.contains("requesting") || !j["requesting"].is_string()) {
        err = "requesting: expected string";
        return std::nullopt;
    }
    r.requesting = j["requesting"].get<std::string>();
    if (!is_hex_digest(r.requesting)) {
        err = "requesting: expected 64-hex digest";
        return std::nullopt;
    }
    if (!j.contains("recipient") || !j["recipient"].is_object() ||
        !j["recipient"].contains("endpoint") ||
        !j["recipient"]["endpoint"].is_string() ||
        !j["recipient"].contains("protocol") ||
        !j["recipient"]["protocol"].is_string()) {
        err = "recipient: expected {endpoint, protocol}";
        return std::nullopt;
    }
    r.recipient.endpoint = j["recipient"]["endpoint"].get<std::string>();
    std::string proto = j["recipient"]["protocol"].get<std::string>();
    if (proto == "POST")
        r.recipient.protocol = Protocol::POST;
    else if (proto == "EMAIL")
        r.recipient.protocol = Protocol::EMAIL;
    else {
        r.recipient.protocol = Protocol::OTHER;
        r.recipient.other_protocol = proto;
    }
    if (j.contains("auth")) {
        if (!j["auth"].is_object()) {
            err = "auth: expected object";
            return std::nullopt;
        }
        r.auth = j["auth"];
    }
    if (!j.contains("valid_until") || !j["valid_until"].is_string()) {
        err = "valid_until: expected string";
        return std::nullopt;
    }
    auto t = parse_wall_time(j["valid_until"].get<std::string>());
    if (!t) {
        err = "valid_until: expected 'YYYY-MM-DD HH:MM:SS'";
        return std::nullopt;
    }
    r.valid_until = *t;
    return r;
}

/// Canonical bytes of a request: its JSON with auth.signature removed, keys
/// sorted, compact UTF-8. This is both what gets signed and what determines
/// the request id.
inline std::string canonical_request_bytes(const AccessRequest& r)
{
    nlohmann::json j = access_request_to_json(r); // plain json sorts keys
    if (j.contains("auth") && j["auth"].contains("signature"))
        j["auth"].erase("signature");
    return j.dump();
}

inline std::string request_id(const AccessRequest& r)
{
    return sha256_hex(canonical_request_bytes(r));
}

/// Attaches auth.signature (ed25519 over the canonical bytes) and
/// auth.public_key to the request.
inline void sign_request(AccessRequest& r, const SigningKey& key)
{
    if (!r.auth)
        r.auth = nlohmann::json::object();
    (*r.auth)["public_key"] = key.public_hex;
    (*r.auth).erase("signature");
    (*r.auth)["signature"] = sign_message(canonical_request_bytes(r), key.secret_hex);
}

struct AuthPolicy {
    enum class Mode { AcceptAll, DenyAll, SignatureAllowList };
    Mode mode = Mode::DenyAll;
    std::vector<std::string> allowed_public_keys; // hex

    static AuthPolicy accept_all() { return {Mode::AcceptAll, {}}; }
    static AuthPolicy deny_all() { return {Mode::DenyAll, {}}; }
    static AuthPolicy allow_keys(std::vector<std::string> keys)
    {
        return {Mode::SignatureAllowList, std::move(keys)};
    }
};

enum class AuthDecision { Granted, Denied };

/// Deterministic policy evaluation; malformed credentials are Denied, never
/// an exception.
inline AuthDecision evaluate_auth(const AccessRequest& r, const AuthPolicy& p) noexcept
{
    try {
        switch (p.mode) {
        case AuthPolicy::Mode::AcceptAll:
            return AuthDecision::Granted;
        case AuthPolicy::Mode::DenyAll:
            return AuthDecision::Denied;
        case AuthPolicy::Mode::SignatureAllowList: {
            if (!r.auth || !r.auth->contains("signature") ||
                !r.auth->contains("public_key") ||
                !(*r.auth)["signature"].is_string() ||
                !(*r.auth)["public_key"].is_string())
                return AuthDecision::Denied;
            std::string pub = (*r.auth)["public_key"].get<std::string>();
            bool listed = false;
            for (const auto& k : p.allowed_public_keys)
                listed = listed || k == pub;
            if (!listed)
                return AuthDecision::Denied;
            return verify_signature(canonical_request_bytes(r),
                                    (*r.auth)["signature"].get<std::string>(), pub)
                       ? AuthDecision::Granted
                       : AuthDecision::Denied;
        }
        }
    } catch (...) {
    }
    return AuthDecision::Denied;
}

/// The dead drop proper: requesters post, owners poll anonymously, unanswered
/// requests expire. The store keeps nothing about who polled and exposes no
/// origin metadata.
class DeadDrop {
public:
    struct PostError {
        std::string message;
    };

    /// Idempotent: request id is the digest of the canonical bytes.
    std::string post_request(const AccessRequest& r, WallTime now)
    {
        if (!is_hex_digest(r.requesting))
            throw std::invalid_argument("post_request: malformed digest");
        if (r.valid_until.epoch_s <= now.epoch_s)
            throw std::invalid_argument("post_request: expired on arrival");
        std::string id = request_id(r);
        std::lock_guard lock(mutex_);
        requests_.emplace(id, Stored{r, next_seq_++});
        return id;
    }

    /// Unexpired requests for a digest, oldest first. Expiry is enforced at
    /// read time; a sweep is not needed for correctness.
    std::vector<AccessRequest> poll_requests(const std::string& digest_hex,
                                             WallTime now) const
    {
        if (!is_hex_digest(digest_hex))
            throw std::invalid_argument("poll_requests: malformed digest");
        std::lock_guard lock(mutex_);
        std::vector<std::pair<std::uint64_t, const AccessRequest*>> hits;
        for (const auto& [id, stored] : requests_)
            if (stored.request.requesting == digest_hex &&
                stored.request.valid_until.epoch_s > now.epoch_s)
                hits.emplace_back(stored.seq, &stored.request);
        std::sort(hits.begin(), hits.end());
        std::vector<AccessRequest> out;
        for (const auto& [seq, req] : hits)
            out.push_back(*req);
        return out;
    }

    std::optional<AccessRequest> find(const std::string& id, WallTime now) const
    {
        std::lock_guard lock(mutex_);
        auto it = requests_.find(id);
        if (it == requests_.end() ||
            it->second.request.valid_until.epoch_s <= now.epoch_s)
            return std::nullopt;
        return it->second.request;
    }

    /// Permanently deletes expired requests; no tombstones remain.
    std::size_t expire_sweep(WallTime now)
    {
        std::lock_guard lock(mutex_);
        std::size_t removed = 0;
        for (auto it = requests_.begin(); it != requests_.end();) {
            if (it->second.request.valid_until.epoch_s <= now.epoch_s) {
                it = requests_.erase(it);
                ++removed;
            } else {
                ++it;
            }
        }
        return removed;
    }

    std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return requests_.size();
    }

private:
    struct Stored {
        AccessRequest request;
        std::uint64_t seq;
    };
    mutable std::mutex mutex_;
    std::map<std::string, Stored> requests_;
    std::uint64_t next_seq_ = 0;
};

// --- Owner-side delivery -------------------------------------------------

struct DeliveryResult {
    bool delivered = false;
    std::string detail;
};

/// Transport for non-POST protocols: (recipient, payload) -> result.
using Transport = std::function<DeliveryResult(const Recipient&, const std::string&)>;

} // namespace epcdisc
