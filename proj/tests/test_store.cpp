#include <doctest.h>

#include <sstream>

#include "epcdisc/event_xml.hpp"
#include "epcdisc/simulator.hpp"
#include "epcdisc/store.hpp"

#include "fixtures.hpp"

using namespace epcdisc;

namespace {

SanitisedEvent fixture_event(const std::string& xml)
{
    return sanitise(parse_event_xml(xml).events.at(0)).event;
}

void fill_from_simulator(DiscoveryStore& store,
                         std::vector<SanitisedEvent>* out = nullptr)
{
    for (const auto& e : generate(NetworkSpec{})) {
        auto s = sanitise(e).event;
        store.put(s);
        if (out)
            out->push_back(s);
    }
}

} // namespace

TEST_CASE("put is idempotent on event id")
{
    DiscoveryStore store;
    auto e = fixture_event(fixtures::kShippingXml);
    auto r1 = store.put(e);
    auto r2 = store.put(e);
    CHECK(r1.inserted);
    CHECK(!r2.inserted);
    CHECK(r1.event_id == r2.event_id);
    CHECK(store.size() == 1);
}

TEST_CASE("conflicting content under the same id is rejected")
{
    DiscoveryStore store;
    auto e = fixture_event(fixtures::kShippingXml);
    store.put(e);
    auto evil = e;
    evil.biz_step = "urn:epcglobal:cbv:bizstep:receiving";
    CHECK_THROWS_AS(store.put(evil), std::runtime_error);
}

TEST_CASE("malformed digests are rejected with a field path")
{
    DiscoveryStore store;
    auto e = fixture_event(fixtures::kShippingXml);
    e.epc_list[0].digest_hex = "nothex";
    try {
        store.put(e);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& ex) {
        CHECK(std::string(ex.what()).find("epcList") != std::string::npos);
    }
}

TEST_CASE("query over the shipping/receiving pair returns shipping first")
{
    DiscoveryStore store;
    store.put(fixture_event(fixtures::kReceivingXml));
    store.put(fixture_event(fixtures::kShippingXml));
    auto hits = store.query_by_hash(fixtures::kSsccDigest);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].biz_step == "urn:epcglobal:cbv:bizstep:shipping");
    CHECK(hits[1].biz_step == "urn:epcglobal:cbv:bizstep:receiving");
    // party and transaction digests also resolve to both events
    CHECK(store.query_by_hash(fixtures::kSourcePartyDigest).size() == 2);
    CHECK(store.query_by_hash(fixtures::kTransactionDigest).size() == 2);
}

TEST_CASE("unseen digest queries come back empty")
{
    DiscoveryStore store;
    store.put(fixture_event(fixtures::kShippingXml));
    CHECK(store.query_by_hash(std::string(64, 'a')).empty());
    CHECK_THROWS_AS(store.query_by_hash("zz"), std::invalid_argument);
}

TEST_CASE("query completeness and soundness over the simulator dataset")
{
    std::vector<SanitisedEvent> all;
    DiscoveryStore store;
    fill_from_simulator(store, &all);
    CHECK(store.size() == all.size());
    CHECK(store.size() == 11); // 2x3 component events + assembly + 2 + 2
    for (const auto& e : all) {
        for (const auto* u : e.all_identifier_digests()) {
            auto hits = store.query_by_hash(u->digest_hex);
            bool found = false;
            for (const auto& h : hits)
                found = found || h.event_id == e.event_id;
            CHECK(found);
            // soundness: every hit really contains the digest
            for (const auto& h : hits) {
                bool contains = false;
                for (const auto* hu : h.all_identifier_digests())
                    contains = contains || hu->digest_hex == u->digest_hex;
                CHECK(contains);
            }
        }
    }
}

TEST_CASE("snapshot/restore reproduces all query results")
{
    std::vector<SanitisedEvent> all;
    DiscoveryStore store;
    fill_from_simulator(store, &all);
    std::stringstream journal;
    store.snapshot(journal);

    DiscoveryStore restored;
    restored.restore(journal);
    CHECK(restored.size() == store.size());
    for (const auto& e : all)
        for (const auto* u : e.all_identifier_digests())
            CHECK(restored.query_by_hash(u->digest_hex) ==
                  store.query_by_hash(u->digest_hex));
}

TEST_CASE("empty store round-trips")
{
    DiscoveryStore store;
    std::stringstream journal;
    store.snapshot(journal);
    DiscoveryStore restored;
    restored.restore(journal);
    CHECK(restored.size() == 0);
}

TEST_CASE("corrupt journal line fails with its line number")
{
    DiscoveryStore store;
    fill_from_simulator(store);
    std::stringstream journal;
    store.snapshot(journal);
    std::string text = journal.str();
    text = text.substr(0, text.size() / 2); // truncate mid-record

    DiscoveryStore restored;
    std::istringstream in(text);
    try {
        restored.restore(in);
        FAIL("expected restore failure");
    } catch (const std::runtime_error& ex) {
        CHECK(std::string(ex.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("journal lines carry no origin or received_at")
{
    DiscoveryStore store;
    store.put(fixture_event(fixtures::kShippingXml), "submitter-42");
    std::stringstream journal;
    store.snapshot(journal);
    CHECK(journal.str().find("submitter-42") == std::string::npos);
    CHECK(journal.str().find("origin") == std::string::npos);
    CHECK(journal.str().find("received_at") == std::string::npos);
}
