// Hand-rolled random generators for property-style tests.
#pragma once

#include <random>
#include <string>

#include "epcdisc/event.hpp"

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : rng_(seed) {}

    int range(int lo, int hi) // inclusive
    {
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }

    bool chance(double p) { return std::uniform_real_distribution<>(0, 1)(rng_) < p; }

    std::string digits(int n)
    {
        std::string s;
        for (int i = 0; i < n; ++i)
            s.push_back(static_cast<char>('0' + range(0, 9)));
        return s;
    }

    std::string epc() { return "urn:epc:id:sgtin:07777" + digits(2) + ".0" + digits(5) + "." + digits(8); }
    std::string party() { return "urn:epc:id:pgln:" + digits(7) + "." + digits(5); }
    std::string transaction() { return "urn:epc:id:gdti:" + digits(7) + ".00002.PO-" + digits(6); }

    epcdisc::Event event()
    {
        using namespace epcdisc;
        Event e;
        bool assembly = chance(0.2);
        e.event_type = assembly ? EventType::AssemblyEvent : EventType::ObjectEvent;
        char buf[48];
        std::snprintf(buf, sizeof buf, "2022-%02d-%02dT%02d:%02d:%02d.%03d+01:00",
                      range(1, 12), range(1, 28), range(0, 23), range(0, 59),
                      range(0, 59), range(0, 999));
        e.event_time = *parse_timestamp(buf);
        e.event_time_zone_offset = "+01:00";
        if (chance(0.5))
            e.record_time = e.event_time;
        if (assembly) {
            int n = range(1, 3);
            for (int i = 0; i < n; ++i)
                e.input_epcs.push_back(epc());
            e.output_epcs.push_back(epc());
        } else {
            int n = range(1, 3);
            for (int i = 0; i < n; ++i)
                e.epc_list.push_back(epc());
        }
        e.action = static_cast<Action>(range(0, 2));
        e.biz_step = chance(0.5) ? "urn:epcglobal:cbv:bizstep:shipping"
                                 : "urn:epcglobal:cbv:bizstep:receiving";
        if (chance(0.5))
            e.disposition = "urn:epcglobal:cbv:disp:in_transit";
        if (chance(0.5))
            e.read_point = "urn:epc:id:sgln:" + digits(7) + ".00002.0";
        if (chance(0.8))
            e.biz_transactions.push_back({"urn:epcglobal:cbv:btt:po", transaction()});
        if (chance(0.9)) {
            e.sources.push_back({"urn:epcglobal:cbv:sdt:possessing_party", party()});
            e.destinations.push_back({"urn:epcglobal:cbv:sdt:possessing_party", party()});
        }
        if (chance(0.3))
            e.extensions.push_back({"example:myField1", digits(4)});
        return e;
    }

    std::mt19937_64& raw() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace gen
