#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "epcdisc/sha256.hpp"

namespace epcdisc {

/// RFC6920-style named-information URI restricted to sha-256 with a
/// lowercase hex digest, e.g. "ni:///sha-256;<64 hex>?type=...".
/// Rendered with three slashes; the parser also accepts the two-slash form.
struct NiUri {
    std::string digest_hex;                  // 64 lowercase hex chars
    std::optional<std::string> query_suffix; // without leading '?'

    std::string render() const
    {
        std::string s = "ni:///sha-256;" + digest_hex;
        if (query_suffix) {
            s += '?';
            s += *query_suffix;
        }
        return s;
    }

    bool operator==(const NiUri&) const = default;
};

inline std::optional<NiUri> parse_ni_uri(std::string_view s)
{
    std::string_view rest;
    if (s.starts_with("ni:///sha-256;"))
        rest = s.substr(14);
    else if (s.starts_with("ni://sha-256;"))
        rest = s.substr(13);
    else
        return std::nullopt;

    NiUri out;
    auto q = rest.find('?');
    if (q == std::string_view::npos) {
        out.digest_hex = std::string(rest);
    } else {
        out.digest_hex = std::string(rest.substr(0, q));
        auto suffix = rest.substr(q + 1);
        if (suffix.empty())
            return std::nullopt;
        out.query_suffix = std::string(suffix);
    }
    if (!is_hex_digest(out.digest_hex))
        return std::nullopt;
    return out;
}

/// Hash of the exact UTF-8 bytes of `value`, no salt, no query suffix.
inline NiUri ni_hash(std::string_view value)
{
    if (value.empty())
        throw std::invalid_argument("ni_hash: empty value");
    return NiUri{sha256_hex(value), std::nullopt};
}

/// Hash of value ++ salt. Matching events sanitised with the same salt
/// produce equal digests, which is what links the chain.
inline NiUri salted_hash(std::string_view value, std::string_view salt)
{
    if (value.empty())
        throw std::invalid_argument("salted_hash: empty value");
    if (salt.empty())
        throw std::invalid_argument("salted_hash: empty salt");
    std::string joined;
    joined.reserve(value.size() + salt.size());
    joined.append(value).append(salt);
    return NiUri{sha256_hex(joined), std::nullopt};
}

} // namespace epcdisc
