#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epcdisc/event.hpp"

namespace epcdisc {

struct ParseError {
    int line = 0;
    int column = 0;
    std::string message;
};

struct XmlParseResult {
    std::vector<Event> events;
    std::vector<std::string> warnings;
    std::optional<ParseError> error; // set iff parsing failed

    bool ok() const { return !error.has_value(); }
};

namespace xml {

struct Node {
    std::string name; // qualified name as written
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<std::unique_ptr<Node>> children;
    std::string text; // concatenated character data, entity-decoded

    const Node* child(std::string_view local) const
    {
        for (const auto& c : children)
            if (c->local_name() == local)
                return c.get();
        return nullptr;
    }

    std::string_view local_name() const
    {
        auto pos = name.rfind(':');
        return pos == std::string::npos ? std::string_view(name)
                                        : std::string_view(name).substr(pos + 1);
    }
};

inline std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

/// Minimal non-validating parser for the EPCIS fixture subset: elements,
/// attributes, character data, comments, processing instructions, CDATA and
/// the five predefined entities. Total on arbitrary bytes: returns a tree or
/// an error with line/column, never aborts.
class Parser {
public:
    explicit Parser(std::string_view input) : in_(input) {}

    // Returns all top-level elements (the fixtures sometimes hold a bare
    // event element with no document root).
    std::optional<ParseError> parse(std::vector<std::unique_ptr<Node>>& roots)
    {
        while (true) {
            skip_misc();
            if (pos_ >= in_.size())
                break;
            if (in_[pos_] != '<')
                return fail("unexpected character data outside any element");
            auto node = parse_element();
            if (!node)
                return error_;
            roots.push_back(std::move(node));
        }
        if (roots.empty() && error_)
            return error_;
        return std::nullopt;
    }

private:
    std::string_view in_;
    std::size_t pos_ = 0;
    std::optional<ParseError> error_;

    std::optional<ParseError> fail(std::string msg)
    {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < in_.size(); ++i) {
            if (in_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        error_ = ParseError{line, col, std::move(msg)};
        return error_;
    }

    void skip_ws()
    {
        while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_])))
            ++pos_;
    }

    bool skip_prefix(std::string_view p)
    {
        if (in_.substr(pos_).starts_with(p)) {
            pos_ += p.size();
            return true;
        }
        return false;
    }

    // Skips whitespace, comments, PIs and the XML declaration between elements.
    void skip_misc()
    {
        while (true) {
            skip_ws();
            if (skip_prefix("<!--")) {
                auto end = in_.find("-->", pos_);
                pos_ = end == std::string_view::npos ? in_.size() : end + 3;
            } else if (skip_prefix("<?")) {
                auto end = in_.find("?>", pos_);
                pos_ = end == std::string_view::npos ? in_.size() : end + 2;
            } else if (skip_prefix("<!DOCTYPE")) {
                auto end = in_.find('>', pos_);
                pos_ = end == std::string_view::npos ? in_.size() : end + 1;
            } else {
                return;
            }
        }
    }

    static bool is_name_char(char c)
    {
        return std::isalnum(static_cast<unsigned char>(c)) || c == ':' ||
               c == '_' || c == '-' || c == '.';
    }

    std::string parse_name()
    {
        std::size_t b = pos_;
        while (pos_ < in_.size() && is_name_char(in_[pos_]))
            ++pos_;
        return std::string(in_.substr(b, pos_ - b));
    }

    bool decode_text(std::string_view raw, std::string& out)
    {
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos)
                return false;
            auto ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp")
                out.push_back('&');
            else if (ent == "lt")
                out.push_back('<');
            else if (ent == "gt")
                out.push_back('>');
            else if (ent == "quot")
                out.push_back('"');
            else if (ent == "apos")
                out.push_back('\'');
            else if (ent.starts_with("#")) {
                int code = 0;
                bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
                for (std::size_t k = hex ? 2 : 1; k < ent.size(); ++k) {
                    char c = ent[k];
                    int d;
                    if (c >= '0' && c <= '9')
                        d = c - '0';
                    else if (hex && c >= 'a' && c <= 'f')
                        d = c - 'a' + 10;
                    else if (hex && c >= 'A' && c <= 'F')
                        d = c - 'A' + 10;
                    else
                        return false;
                    code = code * (hex ? 16 : 10) + d;
                    if (code > 0x10FFFF)
                        return false;
                }
                // UTF-8 encode
                if (code < 0x80)
                    out.push_back(static_cast<char>(code));
                else if (code < 0x800) {
                    out.push_back(static_cast<char>(0xC0 | (code >> 6)));
                    out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
                } else if (code < 0x10000) {
                    out.push_back(static_cast<char>(0xE0 | (code >> 12)));
                    out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
                } else {
                    out.push_back(static_cast<char>(0xF0 | (code >> 18)));
                    out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
                }
            } else
                return false;
            i = semi;
        }
        return true;
    }

    std::unique_ptr<Node> parse_element()
    {
        if (pos_ >= in_.size() || in_[pos_] != '<') {
            fail("expected '<'");
            return nullptr;
        }
        ++pos_;
        auto node = std::make_unique<Node>();
        node->name = parse_name();
        if (node->name.empty()) {
            fail("expected element name");
            return nullptr;
        }

        // attributes
        while (true) {
            skip_ws();
            if (pos_ >= in_.size()) {
                fail("unterminated start tag");
                return nullptr;
            }
            if (skip_prefix("/>"))
                return node;
            if (skip_prefix(">"))
                break;
            std::string aname = parse_name();
            if (aname.empty()) {
                fail("expected attribute name");
                return nullptr;
            }
            skip_ws();
            if (!skip_prefix("=")) {
                fail("expected '=' after attribute name");
                return nullptr;
            }
            skip_ws();
            if (pos_ >= in_.size() || (in_[pos_] != '"' && in_[pos_] != '\'')) {
                fail("expected quoted attribute value");
                return nullptr;
            }
            char quote = in_[pos_++];
            auto end = in_.find(quote, pos_);
            if (end == std::string_view::npos) {
                fail("unterminated attribute value");
                return nullptr;
            }
            std::string aval;
            if (!decode_text(in_.substr(pos_, end - pos_), aval)) {
                fail("bad entity reference in attribute value");
                return nullptr;
            }
            pos_ = end + 1;
            node->attrs.emplace_back(std::move(aname), std::move(aval));
        }

        // content
        while (true) {
            if (pos_ >= in_.size()) {
                fail("unexpected end of input inside <" + node->name + ">");
                return nullptr;
            }
            if (skip_prefix("</")) {
                std::string cname = parse_name();
                skip_ws();
                if (!skip_prefix(">")) {
                    fail("malformed end tag");
                    return nullptr;
                }
                if (cname != node->name) {
                    fail("mismatched end tag </" + cname + "> for <" + node->name + ">");
                    return nullptr;
                }
                return node;
            }
            if (skip_prefix("<!--")) {
                auto end = in_.find("-->", pos_);
                if (end == std::string_view::npos) {
                    fail("unterminated comment");
                    return nullptr;
                }
                pos_ = end + 3;
                continue;
            }
            if (skip_prefix("<![CDATA[")) {
                auto end = in_.find("]]>", pos_);
                if (end == std::string_view::npos) {
                    fail("unterminated CDATA section");
                    return nullptr;
                }
                node->text.append(in_.substr(pos_, end - pos_));
                pos_ = end + 3;
                continue;
            }
            if (skip_prefix("<?")) {
                auto end = in_.find("?>", pos_);
                if (end == std::string_view::npos) {
                    fail("unterminated processing instruction");
                    return nullptr;
                }
                pos_ = end + 2;
                continue;
            }
            if (in_[pos_] == '<') {
                auto child = parse_element();
                if (!child)
                    return nullptr;
                node->children.push_back(std::move(child));
                continue;
            }
            auto end = in_.find('<', pos_);
            if (end == std::string_view::npos)
                end = in_.size();
            if (!decode_text(in_.substr(pos_, end - pos_), node->text)) {
                fail("bad entity reference");
                return nullptr;
            }
            pos_ = end;
        }
    }
};

} // namespace xml

namespace detail {

inline void collect_event_nodes(const xml::Node& n, std::vector<const xml::Node*>& out,
                                std::vector<std::string>& warnings)
{
    auto local = n.local_name();
    if (local == "ObjectEvent" || local == "AssemblyEvent") {
        out.push_back(&n);
        return;
    }
    // Unknown event elements directly under an EventList are skipped with a
    // warning rather than failing the whole document.
    if (local == "EventList") {
        for (const auto& c : n.children) {
            auto cl = c->local_name();
            if (cl == "ObjectEvent" || cl == "AssemblyEvent")
                out.push_back(c.get());
            else
                warnings.push_back("skipped unknown event element <" +
                                   c->name + ">");
        }
        return;
    }
    for (const auto& c : n.children)
        collect_event_nodes(*c, out, warnings);
}

inline std::vector<UriPair> parse_pair_list(const xml::Node& list,
                                            std::string_view item_name)
{
    std::vector<UriPair> out;
    for (const auto& c : list.children) {
        if (c->local_name() != item_name)
            continue;
        std::string type;
        for (const auto& [k, v] : c->attrs)
            if (k == "type")
                type = v;
        out.emplace_back(std::move(type), xml::trim(c->text));
    }
    return out;
}

inline std::optional<Event> event_from_node(const xml::Node& n,
                                            std::vector<std::string>& warnings,
                                            std::string& err)
{
    Event e;
    e.event_type = n.local_name() == "AssemblyEvent" ? EventType::AssemblyEvent
                                                     : EventType::ObjectEvent;
    auto parse_epc_list = [](const xml::Node& list) {
        std::vector<std::string> out;
        for (const auto& c : list.children)
            if (c->local_name() == "epc")
                out.push_back(xml::trim(c->text));
        return out;
    };

    // Walks children in document order; the EPCIS 1.2 <extension> wrapper
    // around sourceList/destinationList is descended into transparently.
    auto handle_children = [&](const xml::Node& parent, auto&& self) -> bool {
        for (const auto& c : parent.children) {
            auto name = c->local_name();
            std::string text = xml::trim(c->text);
            if (name == "eventTime") {
                auto ts = parse_timestamp(text);
                if (!ts) {
                    err = "eventTime: unparseable timestamp '" + text + "'";
                    return false;
                }
                e.event_time = *ts;
            } else if (name == "recordTime") {
                auto ts = parse_timestamp(text);
                if (!ts) {
                    err = "recordTime: unparseable timestamp '" + text + "'";
                    return false;
                }
                e.record_time = *ts;
            } else if (name == "eventTimeZoneOffset") {
                e.event_time_zone_offset = text;
            } else if (name == "epcList") {
                e.epc_list = parse_epc_list(*c);
            } else if (name == "inputEPCList" || name == "inputEpcList") {
                e.input_epcs = parse_epc_list(*c);
            } else if (name == "outputEPCList" || name == "outputEpcList") {
                e.output_epcs = parse_epc_list(*c);
            } else if (name == "action") {
                auto a = action_from_string(text);
                if (!a) {
                    err = "action: unknown value '" + text + "'";
                    return false;
                }
                e.action = *a;
            } else if (name == "bizStep") {
                e.biz_step = text;
            } else if (name == "disposition") {
                e.disposition = text;
            } else if (name == "readPoint") {
                const auto* id = c->child("id");
                e.read_point = id ? xml::trim(id->text) : text;
            } else if (name == "bizTransactionList") {
                e.biz_transactions = parse_pair_list(*c, "bizTransaction");
            } else if (name == "sourceList") {
                e.sources = parse_pair_list(*c, "source");
            } else if (name == "destinationList") {
                e.destinations = parse_pair_list(*c, "destination");
            } else if (name == "extension" || name == "baseExtension") {
                if (!self(*c, self))
                    return false;
            } else {
                // Vendor fields are preserved so the sanitiser can drop them
                // explicitly.
                e.extensions.emplace_back(c->name, text);
            }
        }
        return true;
    };
    if (!handle_children(n, handle_children))
        return std::nullopt;
    (void)warnings;
    return e;
}

} // namespace detail

namespace xml {

inline std::string escape(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace xml

/// Writes one event in the EPCIS 1.2 fixture subset, with the <extension>
/// wrapper around sourceList/destinationList.
inline std::string event_to_xml(const Event& e, int indent = 4)
{
    std::string pad(indent, ' ');
    std::string p2 = pad + "  ", p3 = pad + "    ", p4 = pad + "      ";
    std::string out;
    const char* tag =
        e.event_type == EventType::AssemblyEvent ? "AssemblyEvent" : "ObjectEvent";
    out += pad + "<" + tag + ">\n";
    out += p2 + "<eventTime>" + xml::escape(e.event_time.text) + "</eventTime>\n";
    if (e.record_time)
        out += p2 + "<recordTime>" + xml::escape(e.record_time->text) +
               "</recordTime>\n";
    if (!e.event_time_zone_offset.empty())
        out += p2 + "<eventTimeZoneOffset>" + xml::escape(e.event_time_zone_offset) +
               "</eventTimeZoneOffset>\n";
    auto epcs = [&](const char* list_tag, const std::vector<std::string>& xs) {
        if (xs.empty())
            return;
        out += p2 + "<" + std::string(list_tag) + ">\n";
        for (const auto& epc : xs)
            out += p3 + "<epc>" + xml::escape(epc) + "</epc>\n";
        out += p2 + "</" + std::string(list_tag) + ">\n";
    };
    epcs("epcList", e.epc_list);
    epcs("inputEPCList", e.input_epcs);
    epcs("outputEPCList", e.output_epcs);
    out += p2 + "<action>" + to_string(e.action) + "</action>\n";
    out += p2 + "<bizStep>" + xml::escape(e.biz_step) + "</bizStep>\n";
    if (e.disposition)
        out += p2 + "<disposition>" + xml::escape(*e.disposition) +
               "</disposition>\n";
    if (e.read_point)
        out += p2 + "<readPoint>\n" + p3 + "<id>" + xml::escape(*e.read_point) +
               "</id>\n" + p2 + "</readPoint>\n";
    if (!e.biz_transactions.empty()) {
        out += p2 + "<bizTransactionList>\n";
        for (const auto& [t, v] : e.biz_transactions)
            out += p3 + "<bizTransaction type=\"" + xml::escape(t) + "\">" +
                   xml::escape(v) + "</bizTransaction>\n";
        out += p2 + "</bizTransactionList>\n";
    }
    if (!e.sources.empty() || !e.destinations.empty()) {
        out += p2 + "<extension>\n";
        if (!e.sources.empty()) {
            out += p3 + "<sourceList>\n";
            for (const auto& [t, v] : e.sources)
                out += p4 + "<source type=\"" + xml::escape(t) + "\">" +
                       xml::escape(v) + "</source>\n";
            out += p3 + "</sourceList>\n";
        }
        if (!e.destinations.empty()) {
            out += p3 + "<destinationList>\n";
            for (const auto& [t, v] : e.destinations)
                out += p4 + "<destination type=\"" + xml::escape(t) + "\">" +
                       xml::escape(v) + "</destination>\n";
            out += p3 + "</destinationList>\n";
        }
        out += p2 + "</extension>\n";
    }
    for (const auto& [k, v] : e.extensions)
        out += p2 + "<" + k + ">" + xml::escape(v) + "</" + k + ">\n";
    out += pad + "</" + tag + ">\n";
    return out;
}

inline std::string serialize_events_xml(const std::vector<Event>& events)
{
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                      "<epcis:EPCISDocument xmlns:epcis=\"urn:epcglobal:epcis:xsd:1\" "
                      "schemaVersion=\"1.2\">\n  <EPCISBody>\n    <EventList>\n";
    for (const auto& e : events)
        out += event_to_xml(e, 6);
    out += "    </EventList>\n  </EPCISBody>\n</epcis:EPCISDocument>\n";
    return out;
}

/// Parses zero or more ObjectEvent/AssemblyEvent elements from an EPCIS 1.2
/// subset document, in document order. Never throws on arbitrary bytes.
inline XmlParseResult parse_event_xml(std::string_view input)
{
    XmlParseResult result;
    std::vector<std::unique_ptr<xml::Node>> roots;
    xml::Parser parser(input);
    if (auto err = parser.parse(roots)) {
        result.error = *err;
        return result;
    }

    std::vector<const xml::Node*> event_nodes;
    for (const auto& r : roots)
        detail::collect_event_nodes(*r, event_nodes, result.warnings);

    for (const auto* n : event_nodes) {
        std::string err;
        auto e = detail::event_from_node(*n, result.warnings, err);
        if (!e) {
            result.error = ParseError{0, 0, err};
            return result;
        }
        result.events.push_back(std::move(*e));
    }
    return result;
}

} // namespace epcdisc
