#pragma once

#include <stdexcept>
#include <string>

#include <httplib.h>

#include "epcdisc/dead_drop.hpp"

namespace epcdisc {

namespace detail {

// Splits "http://host:port/path" into (scheme://host:port, /path).
inline bool split_url(const std::string& url, std::string& base, std::string& path)
{
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        return false;
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        base = url;
        path = "/";
    } else {
        base = url.substr(0, path_start);
        path = url.substr(path_start);
    }
    return true;
}

} // namespace detail

/// Delivers clear-text payload to the requestor according to the protocol it
/// asked for. Runs entirely owner-side: the dead drop never sees payloads.
/// The caller is responsible for having evaluated authorisation first.
inline DeliveryResult respond(const AccessRequest& r, const std::string& payload_json,
                              AuthDecision decision, Transport transport = nullptr)
{
    if (decision != AuthDecision::Granted)
        throw std::logic_error("respond: refusing to deliver a non-granted request");

    if (r.recipient.protocol == Protocol::POST) {
        std::string base, path;
        if (!detail::split_url(r.recipient.endpoint, base, path))
            return {false, "malformed endpoint URL: " + r.recipient.endpoint};
        httplib::Client client(base);
        client.set_connection_timeout(5);
        auto res = client.Post(path, payload_json, "application/json");
        if (!res)
            return {false, "endpoint unreachable: " + base};
        if (res->status < 200 || res->status >= 300)
            return {false, "endpoint returned status " + std::to_string(res->status)};
        return {true, "delivered"};
    }

    if (!transport)
        return {false, "no transport configured for protocol " + to_string(r.recipient)};
    return transport(r.recipient, payload_json);
}

} // namespace epcdisc
