#include <doctest.h>

#include "epcdisc/event_json.hpp"
#include "epcdisc/event_xml.hpp"

#include "fixtures.hpp"
#include "generators.hpp"

using namespace epcdisc;

TEST_CASE("shipping event fixture parses field-for-field")
{
    auto r = parse_event_xml(fixtures::kShippingXml);
    REQUIRE(r.ok());
    REQUIRE(r.events.size() == 1);
    const Event& e = r.events[0];
    CHECK(e.event_type == EventType::ObjectEvent);
    CHECK(e.event_time.text == "2021-04-28T00:00:00.000+02:00");
    CHECK(e.event_time.offset == "+02:00");
    CHECK(e.event_time_zone_offset == "+02:00");
    REQUIRE(e.epc_list.size() == 1);
    CHECK(e.epc_list[0] == fixtures::kSsccEpc);
    CHECK(e.action == Action::OBSERVE);
    CHECK(e.biz_step == "urn:epcglobal:cbv:bizstep:shipping");
    CHECK(e.disposition == "urn:epcglobal:cbv:disp:in_transit");
    CHECK(e.read_point == "urn:epc:id:sgln:4023333.00002.0");
    REQUIRE(e.biz_transactions.size() == 1);
    CHECK(e.biz_transactions[0] ==
          UriPair{"urn:epcglobal:cbv:btt:po", fixtures::kPoValue});
    REQUIRE(e.sources.size() == 1);
    // whitespace around wrapped values is trimmed
    CHECK(e.sources[0] ==
          UriPair{"urn:epcglobal:cbv:sdt:possessing_party", fixtures::kSourceParty});
    REQUIRE(e.destinations.size() == 1);
    CHECK(e.destinations[0] ==
          UriPair{"urn:epcglobal:cbv:sdt:possessing_party", fixtures::kDestParty});
    CHECK(validate(e).ok());
}

TEST_CASE("empty EventList yields no events")
{
    auto r = parse_event_xml("<EventList/>");
    REQUIRE(r.ok());
    CHECK(r.events.empty());
}

TEST_CASE("events inside a full EPCIS document, in document order")
{
    std::string doc = "<epcis:EPCISDocument><EPCISBody><EventList>" +
                      fixtures::kShippingXml + fixtures::kReceivingXml +
                      "</EventList></EPCISBody></epcis:EPCISDocument>";
    auto r = parse_event_xml(doc);
    REQUIRE(r.ok());
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].biz_step == "urn:epcglobal:cbv:bizstep:shipping");
    CHECK(r.events[1].biz_step == "urn:epcglobal:cbv:bizstep:receiving");
}

TEST_CASE("unknown event elements are skipped with a warning")
{
    std::string doc = "<EventList><TransformationEvent><x>1</x></TransformationEvent>" +
                      fixtures::kShippingXml + "</EventList>";
    auto r = parse_event_xml(doc);
    REQUIRE(r.ok());
    CHECK(r.events.size() == 1);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("TransformationEvent") != std::string::npos);
}

TEST_CASE("malformed XML reports line and column")
{
    auto r = parse_event_xml("<ObjectEvent>\n  <eventTime>oops</wrong>\n");
    REQUIRE(!r.ok());
    CHECK(r.error->line == 2);
    CHECK(!r.error->message.empty());
}

TEST_CASE("unknown elements become extensions")
{
    std::string doc = "<ObjectEvent><eventTime>2022-03-04T11:00:30.000+01:00</eventTime>"
                      "<epcList><epc>urn:x:1</epc></epcList><action>OBSERVE</action>"
                      "<bizStep>urn:x:step</bizStep>"
                      "<example:myField1>2</example:myField1></ObjectEvent>";
    auto r = parse_event_xml(doc);
    REQUIRE(r.ok());
    REQUIRE(r.events.size() == 1);
    REQUIRE(r.events[0].extensions.size() == 1);
    CHECK(r.events[0].extensions[0] ==
          std::pair<std::string, std::string>{"example:myField1", "2"});
}

TEST_CASE("parser totality: arbitrary bytes never abort")
{
    gen::Rng rng(99);
    for (int round = 0; round < 500; ++round) {
        std::string junk;
        int n = rng.range(0, 120);
        for (int i = 0; i < n; ++i)
            junk.push_back(static_cast<char>(rng.range(0, 255)));
        auto r = parse_event_xml(junk); // must return, not crash
        (void)r;
    }
    // truncations of a valid document
    for (std::size_t cut = 0; cut < fixtures::kShippingXml.size(); cut += 7) {
        auto r = parse_event_xml(fixtures::kShippingXml.substr(0, cut));
        (void)r;
    }
}

TEST_CASE("JSON round-trip: parse(serialize(e)) == e")
{
    gen::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        Event e = rng.event();
        std::string doc = "[" + serialize_event_json(e) + "]";
        auto r = parse_event_json(doc);
        REQUIRE(r.ok());
        REQUIRE(r.events.size() == 1);
        CHECK(r.events[0] == e);
    }
}

TEST_CASE("empty JSON array parses to no events")
{
    auto r = parse_event_json("[]");
    REQUIRE(r.ok());
    CHECK(r.events.empty());
}

TEST_CASE("JSON schema violations name the field path")
{
    auto r = parse_event_json(R"([{"eventType":"ObjectEvent","eventTime":42}])");
    REQUIRE(!r.ok());
    CHECK(r.error->find("eventTime") != std::string::npos);

    r = parse_event_json(R"([{"eventType":"TransformationEvent"}])");
    REQUIRE(!r.ok());
    CHECK(r.error->find("eventType") != std::string::npos);
}

TEST_CASE("XML and JSON twins agree")
{
    auto x = parse_event_xml(fixtures::kShippingXml);
    REQUIRE(x.ok());
    std::string doc = "[" + serialize_event_json(x.events[0]) + "]";
    auto j = parse_event_json(doc);
    REQUIRE(j.ok());
    CHECK(j.events[0] == x.events[0]);
}

TEST_CASE("validate flags the documented edge cases")
{
    auto base = parse_event_xml(fixtures::kShippingXml).events[0];

    SUBCASE("fixture event is clean") { CHECK(validate(base).ok()); }

    SUBCASE("ObjectEvent with empty epcList")
    {
        Event e = base;
        e.epc_list.clear();
        auto rep = validate(e);
        REQUIRE(rep.errors.size() == 1);
        CHECK(rep.errors[0].first == "epcList");
    }

    SUBCASE("offset mismatch between eventTime and eventTimeZoneOffset")
    {
        Event e = base;
        e.event_time_zone_offset = "+01:00";
        auto rep = validate(e);
        REQUIRE(rep.errors.size() == 1);
        CHECK(rep.errors[0].first == "eventTimeZoneOffset");
    }

    SUBCASE("AssemblyEvent needs outputs")
    {
        Event e;
        e.event_type = EventType::AssemblyEvent;
        e.event_time = *parse_timestamp("2022-01-01T00:00:00.000+01:00");
        e.biz_step = "urn:epcglobal:cbv:bizstep:assembling";
        CHECK(!validate(e).ok());
        e.output_epcs.push_back("urn:epc:id:sgtin:1.2.3");
        CHECK(validate(e).ok());
    }

    SUBCASE("empty identifier strings")
    {
        Event e = base;
        e.sources[0].second = "";
        CHECK(!validate(e).ok());
    }
}

TEST_CASE("timestamp parsing")
{
    auto t = parse_timestamp("2021-04-28T00:00:00.000+02:00");
    REQUIRE(t);
    CHECK(t->offset == "+02:00");
    auto u = parse_timestamp("2021-04-27T22:00:00.000Z");
    REQUIRE(u);
    CHECK(t->epoch_ms == u->epoch_ms);
    CHECK(!parse_timestamp("2021-04-28"));
    CHECK(!parse_timestamp("2021-04-28T00:00:00.000"));
    CHECK(!parse_timestamp("yesterday"));
}

TEST_CASE("XML serialisation round-trips through the parser")
{
    gen::Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        Event e = rng.event();
        auto r = parse_event_xml(serialize_events_xml({e}));
        REQUIRE(r.ok());
        REQUIRE(r.events.size() == 1);
        CHECK(r.events[0] == e);
    }
}
