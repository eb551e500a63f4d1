#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include <httplib.h>

#include "epcdisc/event_xml.hpp"
#include "epcdisc/service.hpp"

#include "fixtures.hpp"

using namespace epcdisc;

namespace {

struct TestService {
    DiscoveryService service;
    int port;
    httplib::Client client;

    explicit TestService(ServiceConfig cfg = {}, DiscoveryService::Clock clock = system_wall_time)
        : service(std::move(cfg), std::move(clock)),
          port(service.start_async()),
          client("127.0.0.1", port)
    {
    }
    ~TestService() { service.stop(); }
};

std::string sanitised_fixture_json()
{
    return serialize_sanitised(
        sanitise(parse_event_xml(fixtures::kShippingXml).events.at(0)).event);
}

} // namespace

TEST_CASE("POST /events stores and is idempotent")
{
    TestService ts;
    auto body = sanitised_fixture_json();
    auto r1 = ts.client.Post("/events", body, "application/json");
    REQUIRE(r1);
    CHECK(r1->status == 201);
    auto id1 = nlohmann::json::parse(r1->body)["eventId"].get<std::string>();

    auto r2 = ts.client.Post("/events", body, "application/json");
    REQUIRE(r2);
    CHECK(r2->status == 200);
    CHECK(nlohmann::json::parse(r2->body)["eventId"] == id1);
    CHECK(ts.service.store().size() == 1);
}

TEST_CASE("POST /events rejects raw identifiers and garbage")
{
    TestService ts;
    auto r = ts.client.Post("/events", "not json", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);

    // a raw (unhashed) EPC in epcList fails the ni URI validation
    auto j = nlohmann::json::parse(sanitised_fixture_json());
    j["epcList"] = {fixtures::kSsccEpc};
    r = ts.client.Post("/events", j.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    CHECK(r->body.find("epcList") != std::string::npos);
}

TEST_CASE("GET /events returns matches, empty array for unknown digests")
{
    TestService ts;
    ts.client.Post("/events", sanitised_fixture_json(), "application/json");

    auto r = ts.client.Get("/events?hash=" + fixtures::kSsccDigest);
    REQUIRE(r);
    CHECK(r->status == 200);
    auto arr = nlohmann::json::parse(r->body);
    REQUIRE(arr.size() == 1);
    CHECK(arr[0]["bizStep"] == "urn:epcglobal:cbv:bizstep:shipping");

    // unknown digest: 200 with [], never 404
    r = ts.client.Get("/events?hash=" + std::string(64, 'a'));
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(nlohmann::json::parse(r->body).empty());

    // uppercase hex is accepted and lowercased
    std::string upper = fixtures::kSsccDigest;
    for (auto& c : upper)
        c = static_cast<char>(std::toupper(c));
    r = ts.client.Get("/events?hash=" + upper);
    REQUIRE(r);
    CHECK(nlohmann::json::parse(r->body).size() == 1);

    // malformed hash
    r = ts.client.Get("/events?hash=xyz");
    REQUIRE(r);
    CHECK(r->status == 400);
}

TEST_CASE("responses carry no submitter identity")
{
    TestService ts;
    ts.client.Post("/events", sanitised_fixture_json(), "application/json");
    auto r = ts.client.Get("/events?hash=" + fixtures::kSsccDigest);
    REQUIRE(r);
    CHECK(r->body.find("origin") == std::string::npos);
    CHECK(r->body.find("received_at") == std::string::npos);
    CHECK(r->body.find("remote") == std::string::npos);
}

TEST_CASE("restart from journal preserves query responses byte-identically")
{
    auto journal = std::filesystem::temp_directory_path() / "epcdisc_journal_test.ndjson";
    std::filesystem::remove(journal);
    ServiceConfig cfg;
    cfg.journal_path = journal.string();

    std::string before;
    {
        TestService ts(cfg);
        ts.client.Post("/events", sanitised_fixture_json(), "application/json");
        auto r = ts.client.Get("/events?hash=" + fixtures::kSsccDigest);
        REQUIRE(r);
        before = r->body;
    }
    {
        TestService ts(cfg); // restarts from the journal
        CHECK(ts.service.store().size() == 1);
        auto r = ts.client.Get("/events?hash=" + fixtures::kSsccDigest);
        REQUIRE(r);
        CHECK(r->body == before);
    }
    std::filesystem::remove(journal);
}

TEST_CASE("dead drop endpoints")
{
    // injectable clock so expiry is deterministic
    WallTime now = *parse_wall_time("2021-07-30 12:00:00");
    TestService ts(ServiceConfig{}, [&now] { return now; });

    auto r = ts.client.Post("/dead_drop", fixtures::kAccessRequestJson,
                            "application/json");
    REQUIRE(r);
    CHECK(r->status == 201);
    auto id = nlohmann::json::parse(r->body)["requestId"].get<std::string>();
    CHECK(is_hex_digest(id));

    auto g = ts.client.Get("/dead_drop?hash=" + fixtures::kAccessRequestDigest);
    REQUIRE(g);
    CHECK(g->status == 200);
    auto arr = nlohmann::json::parse(g->body);
    REQUIRE(arr.size() == 1);
    CHECK(arr[0]["requesting"] == fixtures::kAccessRequestDigest);
    CHECK(arr[0]["auth"]["id"] == "Sebastian");

    SUBCASE("expired requests vanish from polls without a sweep")
    {
        now = *parse_wall_time("2021-07-30 13:32:44");
        auto g2 = ts.client.Get("/dead_drop?hash=" + fixtures::kAccessRequestDigest);
        REQUIRE(g2);
        CHECK(nlohmann::json::parse(g2->body).empty());
    }
    SUBCASE("posting an already-expired request is a 400")
    {
        now = *parse_wall_time("2021-08-01 00:00:00");
        auto r2 = ts.client.Post("/dead_drop", fixtures::kAccessRequestJson,
                                 "application/json");
        REQUIRE(r2);
        CHECK(r2->status == 400);
    }
    SUBCASE("malformed request body is a 400")
    {
        auto r2 = ts.client.Post("/dead_drop", R"({"requesting":"short"})",
                                 "application/json");
        REQUIRE(r2);
        CHECK(r2->status == 400);
    }
}

TEST_CASE("service config bounds")
{
    ServiceConfig cfg;
    cfg.sweep_interval_s = 0;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
    cfg.sweep_interval_s = 60;
    cfg.max_body_bytes = 1024;
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
}
