// Command-line front end for the anonymous traceability pipeline: sanitise
// clear-text events, upload and query sanitised ones, verify chains of
// custody, and drive both sides of the dead-drop exchange.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <queue>
#include <filesystem>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "epcdisc/chain.hpp"
#include "epcdisc/event_json.hpp"
#include "epcdisc/event_xml.hpp"
#include "epcdisc/respond.hpp"
#include "epcdisc/sanitiser.hpp"
#include "epcdisc/service.hpp"
#include "epcdisc/simulator.hpp"

namespace {

using namespace epcdisc;

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<Event> load_events(const std::string& path)
{
    std::string text = read_file(path);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '<') {
        auto r = parse_event_xml(text);
        if (!r.ok())
            throw std::runtime_error(path + ": " + r.error->message + " (line " +
                                     std::to_string(r.error->line) + ")");
        for (const auto& w : r.warnings)
            std::cerr << "warning: " << w << "\n";
        return r.events;
    }
    if (first != std::string::npos && text[first] == '{') {
        // NDJSON: one event object per line (the simulator's JSON output).
        std::vector<Event> events;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            auto r = parse_event_json("[" + line + "]");
            if (!r.ok())
                throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                         ": " + *r.error);
            events.push_back(std::move(r.events.at(0)));
        }
        return events;
    }
    auto r = parse_event_json(text);
    if (!r.ok())
        throw std::runtime_error(path + ": " + *r.error);
    return r.events;
}

httplib::Client make_client(const std::string& base_url)
{
    httplib::Client c(base_url);
    c.set_connection_timeout(5);
    return c;
}

SigningKey load_key(const std::string& path)
{
    auto j = nlohmann::json::parse(read_file(path));
    return SigningKey{j.at("secret").get<std::string>(),
                      j.at("public").get<std::string>()};
}

AuthPolicy load_policy(const std::string& arg)
{
    if (arg == "accept-all")
        return AuthPolicy::accept_all();
    if (arg == "deny-all")
        return AuthPolicy::deny_all();
    auto j = nlohmann::json::parse(read_file(arg));
    std::vector<std::string> keys;
    if (j.is_array())
        for (const auto& k : j)
            keys.push_back(k.get<std::string>());
    else if (j.contains("public"))
        keys.push_back(j["public"].get<std::string>());
    return AuthPolicy::allow_keys(std::move(keys));
}

// Pulls the transitive closure of an item's history from the service into a
// local store so the chain verifier can run against it.
void fetch_closure(const std::string& base_url, const std::string& digest,
                   DiscoveryStore& store)
{
    auto client = make_client(base_url);
    std::set<std::string> seen;
    std::queue<std::string> todo;
    todo.push(digest);
    while (!todo.empty()) {
        std::string d = todo.front();
        todo.pop();
        if (!seen.insert(d).second)
            continue;
        auto res = client.Get("/events?hash=" + d);
        if (!res || res->status != 200)
            throw std::runtime_error("query failed against " + base_url);
        auto arr = nlohmann::json::parse(res->body);
        for (const auto& ej : arr) {
            std::string err;
            auto e = parse_sanitised(ej, err);
            if (!e)
                throw std::runtime_error("bad event from service: " + err);
            store.put(*e);
            for (const auto* list : {&e->input_epcs, &e->output_epcs})
                for (const auto& u : *list)
                    todo.push(u.digest_hex);
        }
    }
}

int cmd_verify_exit(const ChainVerdict& v)
{
    switch (v.status) {
    case ChainVerdict::Status::Complete: return 0;
    case ChainVerdict::Status::Broken: return 2;
    default: return 3;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Anonymous supply-chain traceability toolkit"};
    app.require_subcommand(1);

    std::string base_url = "http://127.0.0.1:8080";

    // sanitise
    auto* sanitise_cmd = app.add_subcommand(
        "sanitise", "Sanitise clear-text events to NDJSON on stdout");
    std::string events_file, dead_drop_url = "https://discovery.epcat.de/dead_drop";
    bool no_salt = false;
    sanitise_cmd->add_option("events-file", events_file)->required();
    sanitise_cmd->add_option("--dead-drop-url", dead_drop_url);
    sanitise_cmd->add_flag("--no-salt", no_salt, "Hash party ids without salting");

    // upload
    auto* upload_cmd =
        app.add_subcommand("upload", "POST sanitised NDJSON to the discovery service");
    std::string sanitised_file;
    upload_cmd->add_option("sanitised-file", sanitised_file)->required();
    upload_cmd->add_option("--url", base_url);

    // query
    auto* query_cmd =
        app.add_subcommand("query", "Query the discovery service by EPC or digest");
    std::string q_epc, q_hash;
    query_cmd->add_option("--epc", q_epc, "Raw EPC, hashed locally before the query");
    query_cmd->add_option("--hash", q_hash, "64-hex digest");
    query_cmd->add_option("--url", base_url);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Verify a chain of custody");
    std::string v_epc, v_hash, v_journal;
    bool v_recurse = false;
    verify_cmd->add_option("--epc", v_epc);
    verify_cmd->add_option("--hash", v_hash);
    verify_cmd->add_flag("--recurse", v_recurse, "Also verify assembly components");
    verify_cmd->add_option("--journal", v_journal,
                           "Verify against a local NDJSON journal instead of the service");
    verify_cmd->add_option("--url", base_url);

    // request
    auto* request_cmd =
        app.add_subcommand("request", "Post a data access request to the dead drop");
    std::string r_hash, r_endpoint, r_protocol = "POST", r_valid_until, r_sign_key,
                r_auth_id;
    request_cmd->add_option("--hash", r_hash)->required();
    request_cmd->add_option("--endpoint", r_endpoint)->required();
    request_cmd->add_option("--protocol", r_protocol);
    request_cmd->add_option("--valid-until", r_valid_until, "YYYY-MM-DD HH:MM:SS UTC")
        ->required();
    request_cmd->add_option("--sign", r_sign_key, "Key file to sign the request with");
    request_cmd->add_option("--auth-id", r_auth_id);
    request_cmd->add_option("--url", base_url);

    // owner poll / owner respond
    auto* owner_cmd = app.add_subcommand("owner", "Data-owner side of the dead drop");
    owner_cmd->require_subcommand(1);
    auto* poll_cmd = owner_cmd->add_subcommand("poll", "Poll requests for a digest");
    std::string o_hash, o_policy = "deny-all";
    poll_cmd->add_option("--hash", o_hash)->required();
    poll_cmd->add_option("--policy", o_policy,
                         "accept-all, deny-all, or an allow-list key file");
    poll_cmd->add_option("--url", base_url);

    auto* respond_cmd =
        owner_cmd->add_subcommand("respond", "Deliver clear text for a granted request");
    std::string resp_hash, resp_request_id, resp_payload, resp_policy = "accept-all";
    respond_cmd->add_option("--hash", resp_hash)->required();
    respond_cmd->add_option("--request-id", resp_request_id)->required();
    respond_cmd->add_option("--payload", resp_payload, "JSON payload file")->required();
    respond_cmd->add_option("--policy", resp_policy);
    respond_cmd->add_option("--url", base_url);

    // simulate
    auto* simulate_cmd =
        app.add_subcommand("simulate", "Generate the six-actor example network");
    std::string sim_spec, sim_out = ".", sim_fault;
    simulate_cmd->add_option("--spec", sim_spec, "Network spec JSON file");
    simulate_cmd->add_option("--out", sim_out, "Output directory")->required();
    simulate_cmd->add_option("--fault", sim_fault,
                             "Inject a fault, e.g. drop-receive:0 or tamper-epc:2");

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the discovery service");
    ServiceConfig svc;
    std::string bind = "127.0.0.1:8080";
    serve_cmd->add_option("--bind", bind, "host:port");
    serve_cmd->add_option("--journal", svc.journal_path);
    serve_cmd->add_option("--sweep-interval", svc.sweep_interval_s);
    serve_cmd->add_option("--max-body", svc.max_body_bytes);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sanitise_cmd) {
            SanitiserConfig cfg;
            cfg.dead_drop_url = dead_drop_url;
            if (no_salt)
                cfg.salt_source = SaltSource::None;
            for (const auto& e : load_events(events_file)) {
                auto r = sanitise(e, cfg);
                for (const auto& w : r.warnings)
                    std::cerr << "warning: " << w << "\n";
                std::cout << serialize_sanitised(r.event) << "\n";
            }
            return 0;
        }

        if (*upload_cmd) {
            auto client = make_client(base_url);
            std::ifstream f(sanitised_file);
            if (!f)
                throw std::runtime_error("cannot open " + sanitised_file);
            std::string line;
            int n = 0;
            while (std::getline(f, line)) {
                if (line.empty())
                    continue;
                auto res = client.Post("/events", line, "application/json");
                if (!res || (res->status != 201 && res->status != 200))
                    throw std::runtime_error(
                        "upload failed: " +
                        (res ? res->body : "service unreachable"));
                ++n;
            }
            std::cerr << "uploaded " << n << " events\n";
            return 0;
        }

        if (*query_cmd) {
            if (q_epc.empty() == q_hash.empty())
                throw std::runtime_error("query: give exactly one of --epc, --hash");
            // Raw EPCs are hashed locally; only the digest goes over the wire.
            std::string digest = q_hash.empty() ? ni_hash(q_epc).digest_hex : q_hash;
            auto client = make_client(base_url);
            auto res = client.Get("/events?hash=" + digest);
            if (!res)
                throw std::runtime_error("service unreachable: " + base_url);
            std::cout << res->body << "\n";
            return res->status == 200 ? 0 : 1;
        }

        if (*verify_cmd) {
            if (v_epc.empty() == v_hash.empty())
                throw std::runtime_error("verify: give exactly one of --epc, --hash");
            std::string digest = v_hash.empty() ? ni_hash(v_epc).digest_hex : v_hash;
            DiscoveryStore store;
            if (!v_journal.empty())
                store.restore_file(v_journal);
            else
                fetch_closure(base_url, digest, store);
            auto verdict = verify_chain(digest, store, v_recurse);
            std::cout << verdict_to_json(verdict).dump(2) << "\n";
            return cmd_verify_exit(verdict);
        }

        if (*request_cmd) {
            AccessRequest r;
            r.requesting = r_hash;
            r.recipient.endpoint = r_endpoint;
            if (r_protocol == "POST")
                r.recipient.protocol = Protocol::POST;
            else if (r_protocol == "EMAIL")
                r.recipient.protocol = Protocol::EMAIL;
            else {
                r.recipient.protocol = Protocol::OTHER;
                r.recipient.other_protocol = r_protocol;
            }
            auto t = parse_wall_time(r_valid_until);
            if (!t)
                throw std::runtime_error("bad --valid-until, expected YYYY-MM-DD HH:MM:SS");
            r.valid_until = *t;
            if (!r_auth_id.empty())
                r.auth = nlohmann::json{{"id", r_auth_id}};
            if (!r_sign_key.empty())
                sign_request(r, load_key(r_sign_key));
            auto client = make_client(base_url);
            auto res = client.Post("/dead_drop", access_request_to_json(r).dump(),
                                   "application/json");
            if (!res)
                throw std::runtime_error("service unreachable: " + base_url);
            std::cout << res->body << "\n";
            return res->status == 201 ? 0 : 1;
        }

        if (*poll_cmd) {
            auto policy = load_policy(o_policy);
            auto client = make_client(base_url);
            auto res = client.Get("/dead_drop?hash=" + o_hash);
            if (!res || res->status != 200)
                throw std::runtime_error("poll failed");
            auto arr = nlohmann::json::parse(res->body);
            nlohmann::ordered_json out = nlohmann::ordered_json::array();
            for (const auto& rj : arr) {
                std::string err;
                auto r = parse_access_request(rj, err);
                if (!r)
                    continue;
                nlohmann::ordered_json item;
                item["requestId"] = request_id(*r);
                item["request"] = access_request_to_json(*r);
                item["decision"] = evaluate_auth(*r, policy) == AuthDecision::Granted
                                       ? "granted"
                                       : "denied";
                out.push_back(std::move(item));
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*respond_cmd) {
            auto policy = load_policy(resp_policy);
            auto client = make_client(base_url);
            auto res = client.Get("/dead_drop?hash=" + resp_hash);
            if (!res || res->status != 200)
                throw std::runtime_error("poll failed");
            auto arr = nlohmann::json::parse(res->body);
            for (const auto& rj : arr) {
                std::string err;
                auto r = parse_access_request(rj, err);
                if (!r || request_id(*r) != resp_request_id)
                    continue;
                auto decision = evaluate_auth(*r, policy);
                if (decision != AuthDecision::Granted) {
                    std::cerr << "request denied by policy; not responding\n";
                    return 1;
                }
                auto result = respond(*r, read_file(resp_payload), decision);
                std::cout << nlohmann::json{{"delivered", result.delivered},
                                            {"detail", result.detail}}
                                 .dump()
                          << "\n";
                return result.delivered ? 0 : 1;
            }
            throw std::runtime_error("request id not found: " + resp_request_id);
        }

        if (*simulate_cmd) {
            NetworkSpec spec;
            if (!sim_spec.empty()) {
                auto j = nlohmann::json::parse(read_file(sim_spec));
                if (j.contains("seed"))
                    spec.seed = j["seed"].get<std::uint64_t>();
                if (j.contains("productCount"))
                    spec.product_count = j["productCount"].get<int>();
                if (j.contains("componentsPerProduct"))
                    spec.components_per_product = j["componentsPerProduct"].get<int>();
                if (j.contains("includeReturnLeg"))
                    spec.include_return_leg = j["includeReturnLeg"].get<bool>();
                if (j.contains("actors")) {
                    spec.actors.clear();
                    for (const auto& a : j["actors"])
                        spec.actors.emplace_back(a["name"].get<std::string>(),
                                                 a["party"].get<std::string>());
                }
            }
            auto events = generate(spec);
            if (!sim_fault.empty()) {
                auto colon = sim_fault.find(':');
                if (colon == std::string::npos)
                    throw std::runtime_error("bad --fault, expected kind:index");
                std::string kind = sim_fault.substr(0, colon);
                std::size_t idx = std::stoul(sim_fault.substr(colon + 1));
                FaultKind fk;
                if (kind == "drop-ship")
                    fk = FaultKind::DropShip;
                else if (kind == "drop-receive")
                    fk = FaultKind::DropReceive;
                else if (kind == "tamper-epc")
                    fk = FaultKind::TamperEpc;
                else
                    throw std::runtime_error("unknown fault kind: " + kind);
                events = inject_fault(std::move(events), fk, idx);
            }
            std::filesystem::create_directories(sim_out);
            std::ofstream xml(sim_out + "/events.xml", std::ios::binary);
            if (!xml)
                throw std::runtime_error("cannot write " + sim_out + "/events.xml");
            xml << serialize_events_xml(events);
            std::ofstream nd(sim_out + "/events.ndjson", std::ios::binary);
            if (!nd)
                throw std::runtime_error("cannot write " + sim_out + "/events.ndjson");
            for (const auto& e : events)
                nd << event_to_json(e).dump() << "\n";
            std::cerr << "wrote " << events.size() << " events to " << sim_out << "\n";
            return 0;
        }

        if (*serve_cmd) {
            auto colon = bind.rfind(':');
            if (colon != std::string::npos) {
                svc.bind_address = bind.substr(0, colon);
                svc.port = std::stoi(bind.substr(colon + 1));
            }
            DiscoveryService service(svc);
            std::cerr << "listening on " << svc.bind_address << ":" << svc.port << "\n";
            return service.run() ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
