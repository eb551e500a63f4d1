#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "epcdisc/event.hpp"

namespace epcdisc {

/// The six-actor electronics network: components from two suppliers are
/// assembled by a manufacturer, sold through a retailer and finally returned
/// to a reseller for recycling.
struct NetworkSpec {
    std::uint64_t seed = 1;
    std::vector<std::pair<std::string, std::string>> actors = {
        {"Supplier A", "urn:epc:id:pgln:4012345.00001"},
        {"Supplier B", "urn:epc:id:pgln:4012345.00002"},
        {"Manufacturer C", "urn:epc:id:pgln:4012345.00003"},
        {"Retailer D", "urn:epc:id:pgln:4012345.00004"},
        {"Retailer E", "urn:epc:id:pgln:4012345.00005"},
        {"Reseller F", "urn:epc:id:pgln:4012345.00006"},
    };
    int product_count = 1;
    int components_per_product = 2;
    bool include_return_leg = true;
};

namespace detail {

class EventFactory {
public:
    explicit EventFactory(std::uint64_t seed) : rng_(seed) {}

    std::string serial(int digits = 10)
    {
        std::string s;
        s.push_back(static_cast<char>('1' + rng_() % 9)); // no leading zero
        for (int i = 1; i < digits; ++i)
            s.push_back(static_cast<char>('0' + rng_() % 10));
        return s;
    }

    // Strictly increasing hourly clock; all events use the same +01:00 zone.
    Timestamp next_time()
    {
        std::int64_t h = hours_++;
        int day = static_cast<int>(h / 24) + 1, hour = static_cast<int>(h % 24);
        char buf[40];
        std::snprintf(buf, sizeof buf, "2022-%02d-%02dT%02d:00:00.000+01:00",
                      day / 28 + 1, day % 28 + 1, hour);
        auto ts = parse_timestamp(buf);
        if (!ts)
            throw std::logic_error("simulator clock produced a bad timestamp");
        return *ts;
    }

private:
    std::mt19937_64 rng_;
    std::int64_t hours_ = 0;
};

} // namespace detail

/// Same seed, byte-identical output; timestamps strictly increase along each
/// item's lifecycle; every ship/receive pair shares one transaction value,
/// which is the shared-secret salt that links the chain.
inline std::vector<Event> generate(const NetworkSpec& spec)
{
    if (spec.actors.size() < 6)
        throw std::invalid_argument("generate: need the six network actors");
    if (spec.product_count < 0 || spec.components_per_product < 1)
        throw std::invalid_argument("generate: invalid counts");

    detail::EventFactory f(spec.seed);
    const std::string& supplier_a = spec.actors[0].second;
    const std::string& supplier_b = spec.actors[1].second;
    const std::string& manufacturer = spec.actors[2].second;
    const std::string& retailer_d = spec.actors[3].second;
    const std::string& retailer_e = spec.actors[4].second;
    const std::string& reseller = spec.actors[5].second;
    const std::string party_type = "urn:epcglobal:cbv:sdt:possessing_party";
    const std::string txn_type = "urn:epcglobal:cbv:btt:po";

    std::vector<Event> out;

    auto commission = [&](const std::string& epc, const std::string& location) {
        Event e;
        e.event_type = EventType::ObjectEvent;
        e.event_time = f.next_time();
        e.event_time_zone_offset = e.event_time.offset;
        e.epc_list = {epc};
        e.action = Action::ADD;
        e.biz_step = "urn:epcglobal:cbv:bizstep:commissioning";
        e.disposition = "urn:epcglobal:cbv:disp:active";
        e.read_point = location;
        out.push_back(std::move(e));
    };
    auto ship_receive = [&](const std::string& epc, const std::string& from,
                            const std::string& to) {
        std::string txn = "urn:epc:id:gdti:4012345.00002.PO-" + f.serial(6);
        for (bool shipping : {true, false}) {
            Event e;
            e.event_type = EventType::ObjectEvent;
            e.event_time = f.next_time();
            e.event_time_zone_offset = e.event_time.offset;
            e.epc_list = {epc};
            e.action = Action::OBSERVE;
            e.biz_step = shipping ? "urn:epcglobal:cbv:bizstep:shipping"
                                  : "urn:epcglobal:cbv:bizstep:receiving";
            e.disposition = shipping ? "urn:epcglobal:cbv:disp:in_transit"
                                     : "urn:epcglobal:cbv:disp:in_progress";
            e.biz_transactions = {{txn_type, txn}};
            e.sources = {{party_type, from}};
            e.destinations = {{party_type, to}};
            out.push_back(std::move(e));
        }
    };

    for (int p = 0; p < spec.product_count; ++p) {
        std::vector<std::string> component_epcs;
        for (int c = 0; c < spec.components_per_product; ++c) {
            const std::string& supplier = c % 2 == 0 ? supplier_a : supplier_b;
            std::string epc = "urn:epc:id:sgtin:4012345.011111." + f.serial();
            component_epcs.push_back(epc);
            commission(epc, supplier);
            ship_receive(epc, supplier, manufacturer);
        }

        std::string product_epc = "urn:epc:id:sgtin:4012345.022222." + f.serial();
        Event assembly;
        assembly.event_type = EventType::AssemblyEvent;
        assembly.event_time = f.next_time();
        assembly.event_time_zone_offset = assembly.event_time.offset;
        assembly.input_epcs = component_epcs;
        assembly.output_epcs = {product_epc};
        assembly.action = Action::ADD;
        assembly.biz_step = "urn:epcglobal:cbv:bizstep:assembling";
        assembly.read_point = manufacturer;
        out.push_back(std::move(assembly));

        const std::string& retailer = p % 2 == 0 ? retailer_d : retailer_e;
        ship_receive(product_epc, manufacturer, retailer);
        if (spec.include_return_leg)
            ship_receive(product_epc, retailer, reseller);
    }
    return out;
}

enum class FaultKind { DropReceive, DropShip, TamperEpc };

/// Perturbs a generated dataset for the Broken-verdict tests. `target` is
/// the ordinal among the events matching the fault kind (0 = first shipping
/// event for DropShip, and so on).
inline std::vector<Event> inject_fault(std::vector<Event> events, FaultKind kind,
                                       std::size_t target)
{
    auto matches = [&](const Event& e) {
        switch (kind) {
        case FaultKind::DropShip:
            return e.biz_step == "urn:epcglobal:cbv:bizstep:shipping";
        case FaultKind::DropReceive:
            return e.biz_step == "urn:epcglobal:cbv:bizstep:receiving";
        default:
            return !e.epc_list.empty() || !e.output_epcs.empty();
        }
    };
    std::size_t seen = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!matches(events[i]))
            continue;
        if (seen++ != target)
            continue;
        if (kind == FaultKind::TamperEpc) {
            auto& epc = events[i].epc_list.empty() ? events[i].output_epcs.front()
                                                   : events[i].epc_list.front();
            epc.back() = epc.back() == '0' ? '1' : '0';
        } else {
            events.erase(events.begin() + static_cast<std::ptrdiff_t>(i));
        }
        return events;
    }
    throw std::out_of_range("inject_fault: no matching target at index " +
                            std::to_string(target));
}

/// Number of events matching a fault kind, for exhaustive fault sweeps.
inline std::size_t count_fault_targets(const std::vector<Event>& events, FaultKind kind)
{
    std::size_t n = 0;
    for (const auto& e : events) {
        if (kind == FaultKind::DropShip)
            n += e.biz_step == "urn:epcglobal:cbv:bizstep:shipping";
        else if (kind == FaultKind::DropReceive)
            n += e.biz_step == "urn:epcglobal:cbv:bizstep:receiving";
        else
            n += !e.epc_list.empty() || !e.output_epcs.empty();
    }
    return n;
}

} // namespace epcdisc
