#include "fwp/formats.hpp"

#include <sstream>

#include "text_util.hpp"
#include "xml_util.hpp"

namespace fwp {

using detail::parse_uint;
using detail::split;
using detail::trim;

namespace {

uint32_t parse_dotted_quad(const std::string& text) {
    auto parts = split(text, '.');
    if (parts.size() != 4) throw ParseError("bad IP value \"" + text + "\"");
    uint32_t v = 0;
    for (const auto& part : parts) {
        auto octet = parse_uint(part);
        if (!octet || *octet > 255) throw ParseError("bad IP value \"" + text + "\"");
        v = (v << 8) | static_cast<uint32_t>(*octet);
    }
    return v;
}

std::string dotted_quad(uint32_t v) {
    std::ostringstream os;
    os << (v >> 24) << '.' << ((v >> 16) & 0xFF) << '.' << ((v >> 8) & 0xFF) << '.'
       << (v & 0xFF);
    return os.str();
}

// span [base, base + 2^(width-k) - 1] for a /k prefix; host bits must be clear
ValueSpan prefix_span(uint32_t base, unsigned k, unsigned width, const std::string& text) {
    if (k > width) throw ParseError("prefix length out of range in \"" + text + "\"");
    uint64_t size = uint64_t{1} << (width - k);
    if (base % size != 0) throw ParseError("host bits set in prefix \"" + text + "\"");
    return {base, static_cast<uint32_t>(base + size - 1)};
}

bool all_stars(const std::vector<std::string>& parts) {
    for (const auto& p : parts)
        if (p != "*") return false;
    return true;
}

}  // namespace

uint32_t parse_ip_value(const std::string& raw, const Domain& domain) {
    std::string text = trim(raw);
    if (domain.ip_bits == 32) return parse_dotted_quad(text);
    auto n = parse_uint(text);
    if (!n) throw ParseError("bad IP value \"" + text + "\"");
    if (*n > domain.ip_max()) throw ParseError("IP value outside domain: " + text);
    return static_cast<uint32_t>(*n);
}

std::string format_ip_value(uint32_t v, const Domain& domain) {
    return domain.ip_bits == 32 ? dotted_quad(v) : std::to_string(v);
}

ValueSpan parse_ip_pattern(const std::string& raw, const Domain& domain) {
    std::string text = trim(raw);
    if (text.empty()) throw ParseError("empty IP pattern");
    if (text == "ANY") return span_full(domain.ip_max());

    const unsigned width = static_cast<unsigned>(domain.ip_bits);

    if (auto slash = text.find('/'); slash != std::string::npos) {
        auto k = parse_uint(text.substr(slash + 1));
        if (!k || *k > 32) throw ParseError("bad prefix length in \"" + text + "\"");
        uint32_t base = parse_ip_value(text.substr(0, slash), domain);
        return prefix_span(base, static_cast<unsigned>(*k), width, text);
    }

    if (text.find('*') != std::string::npos) {
        // octet wildcards only have meaning on full-width addresses
        if (domain.ip_bits != 32)
            throw ParseError("octet wildcard requires 32-bit addresses: \"" + text + "\"");
        auto parts = split(text, '.');
        if (parts.size() <= 4 && all_stars(parts)) return span_full(domain.ip_max());
        if (parts.size() != 4) throw ParseError("bad IP pattern \"" + text + "\"");
        uint32_t base = 0;
        unsigned fixed = 0;
        bool starred = false;
        for (const auto& part : parts) {
            if (part == "*") {
                starred = true;
                base <<= 8;
                continue;
            }
            if (starred)
                throw ParseError("unsupported wildcard form \"" + text +
                                 "\" (wildcards must trail)");
            auto octet = parse_uint(part);
            if (!octet || *octet > 255) throw ParseError("bad IP pattern \"" + text + "\"");
            base = (base << 8) | static_cast<uint32_t>(*octet);
            ++fixed;
        }
        return prefix_span(base, fixed * 8, 32, text);
    }

    if (auto dash = text.find('-'); dash != std::string::npos) {
        uint32_t lo = parse_ip_value(text.substr(0, dash), domain);
        uint32_t hi = parse_ip_value(text.substr(dash + 1), domain);
        if (lo > hi) throw ParseError("inverted IP range \"" + text + "\"");
        return {lo, hi};
    }

    return span_exact(parse_ip_value(text, domain));
}

ValueSpan parse_port_pattern(const std::string& raw, const Domain& domain) {
    std::string text = trim(raw);
    if (text.empty()) throw ParseError("empty port pattern");
    if (text == "ANY") return span_full(domain.port_max());
    auto parse_one = [&](std::string_view part) -> uint32_t {
        auto n = parse_uint(part);
        if (!n) throw ParseError("bad port pattern \"" + text + "\"");
        if (*n > domain.port_max())
            throw ParseError("port outside domain: " + std::string(part));
        return static_cast<uint32_t>(*n);
    };
    if (auto dash = text.find('-'); dash != std::string::npos) {
        uint32_t lo = parse_one(text.substr(0, dash));
        uint32_t hi = parse_one(text.substr(dash + 1));
        if (lo > hi) throw ParseError("inverted port range \"" + text + "\"");
        return {lo, hi};
    }
    return span_exact(parse_one(text));
}

namespace {

// full -> ANY, point -> value, aligned power-of-two -> prefix, else lo-hi
std::string format_span(ValueSpan s, unsigned width, bool dq) {
    auto value = [&](uint32_t v) { return dq ? dotted_quad(v) : std::to_string(v); };
    uint32_t bound = width >= 32 ? 0xFFFFFFFFu : (uint32_t{1} << width) - 1;
    if (s.is_full(bound)) return "ANY";
    if (s.lo == s.hi) return value(s.lo);
    uint64_t size = s.size();
    if ((size & (size - 1)) == 0 && s.lo % size == 0) {
        unsigned host = 0;
        while ((uint64_t{1} << host) < size) ++host;
        return value(s.lo) + '/' + std::to_string(width - host);
    }
    return value(s.lo) + '-' + value(s.hi);
}

}  // namespace

std::string format_ip_pattern(ValueSpan s, const Domain& domain) {
    return format_span(s, static_cast<unsigned>(domain.ip_bits), domain.ip_bits == 32);
}

std::string format_port_pattern(ValueSpan s, const Domain& domain) {
    uint32_t bound = domain.port_max();
    if (s.is_full(bound)) return "ANY";
    if (s.lo == s.hi) return std::to_string(s.lo);
    return std::to_string(s.lo) + '-' + std::to_string(s.hi);
}

Rule parse_rule_line(const std::string& text, int index, const Domain& domain) {
    auto fields = split(text, ',');
    if (fields.size() != 7)
        throw ParseError("expected 7 comma-separated fields, got " +
                         std::to_string(fields.size()));
    for (auto& f : fields) f = trim(f);

    Rule r;
    r.index = index;
    if (fields[0] == "ANY") {
        r.protocol = proto_any();
    } else if (domain.protocol_index(fields[0])) {
        r.protocol = proto(fields[0]);
    } else {
        throw ParseError("protocol not in domain: \"" + fields[0] + "\"");
    }
    auto dir = direction_from_token(fields[1]);
    if (!dir) throw ParseError("unknown direction \"" + fields[1] + "\"");
    r.direction = *dir;
    r.src_ip = parse_ip_pattern(fields[2], domain);
    r.src_port = parse_port_pattern(fields[3], domain);
    r.dst_ip = parse_ip_pattern(fields[4], domain);
    r.dst_port = parse_port_pattern(fields[5], domain);
    auto act = action_from_token(fields[6]);
    if (!act) throw ParseError("unknown action token \"" + fields[6] + "\"");
    r.action = *act;

    try {
        validate_rule(r, domain);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return r;
}

Policy parse_policy_file(const std::string& text, Action default_action,
                         const Domain& domain) {
    domain.validate();
    Policy p;
    p.default_action = default_action;
    p.domain = domain;
    int line_no = 0;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        try {
            p.rules.push_back(parse_rule_line(t, p.size() + 1, domain));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return p;
}

// --------------------------------------------------------------------------
// XML
// --------------------------------------------------------------------------

namespace {

Domain domain_from_policy_attrs(const std::map<std::string, std::string>& attrs) {
    Domain d;
    if (auto it = attrs.find("ip-bits"); it != attrs.end()) {
        auto v = parse_uint(it->second);
        if (!v) throw ParseError("XML: bad ip-bits value \"" + it->second + "\"");
        d.ip_bits = static_cast<int>(*v);
    }
    if (auto it = attrs.find("port-bits"); it != attrs.end()) {
        auto v = parse_uint(it->second);
        if (!v) throw ParseError("XML: bad port-bits value \"" + it->second + "\"");
        d.port_bits = static_cast<int>(*v);
    }
    if (auto it = attrs.find("protocols"); it != attrs.end()) {
        d.protocols.clear();
        for (auto& tok : split(it->second, ',')) {
            std::string t = trim(tok);
            if (!t.empty()) d.protocols.push_back(t);
        }
    }
    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("XML: ") + e.what());
    }
    return d;
}

}  // namespace

Policy parse_xml_policy(const std::string& text) {
    auto root = detail::read_xml_root(text, "policy");
    auto attrs =
        detail::attributes(root, {"default", "ip-bits", "port-bits", "protocols"}, "policy");
    auto def = action_from_token(detail::require_attr(attrs, "default", "policy"));
    if (!def) throw ParseError("XML: unknown action token in default attribute");

    Policy p;
    p.default_action = *def;
    p.domain = domain_from_policy_attrs(attrs);

    for (const auto& [key, node] : root) {
        if (key == "<xmlattr>") continue;
        if (key == "framework") continue;  // parsed by the framework loader
        if (key != "rule") throw ParseError("XML: unexpected element <" + key + ">");
        auto ra = detail::attributes(
            node, {"proto", "dir", "src-ip", "src-port", "dst-ip", "dst-port", "action"},
            "rule");
        std::ostringstream line;
        line << detail::require_attr(ra, "proto", "rule") << ", "
             << detail::require_attr(ra, "dir", "rule") << ", "
             << detail::require_attr(ra, "src-ip", "rule") << ", "
             << detail::require_attr(ra, "src-port", "rule") << ", "
             << detail::require_attr(ra, "dst-ip", "rule") << ", "
             << detail::require_attr(ra, "dst-port", "rule") << ", "
             << detail::require_attr(ra, "action", "rule");
        try {
            p.rules.push_back(parse_rule_line(line.str(), p.size() + 1, p.domain));
        } catch (const ParseError& e) {
            throw ParseError("XML: rule " + std::to_string(p.size() + 1) + ": " + e.what());
        }
    }
    return p;
}

// --------------------------------------------------------------------------
// Serialization
// --------------------------------------------------------------------------

namespace {

std::string rule_csv(const Rule& r, const Domain& d) {
    std::ostringstream os;
    os << (r.protocol.any() ? "ANY" : *r.protocol.token) << ", " << to_token(r.direction)
       << ", " << format_ip_pattern(r.src_ip, d) << ", " << format_port_pattern(r.src_port, d)
       << ", " << format_ip_pattern(r.dst_ip, d) << ", " << format_port_pattern(r.dst_port, d)
       << ", " << to_token(r.action);
    return os.str();
}

std::string protocols_csv(const Domain& d) {
    std::string out;
    for (const auto& p : d.protocols) {
        if (!out.empty()) out += ',';
        out += p;
    }
    return out;
}

}  // namespace

std::string serialize_policy(const Policy& p, PolicyFormat format) {
    std::ostringstream os;
    if (format == PolicyFormat::Csv) {
        os << "# policy: " << p.rules.size() << " rules, default "
           << to_token(p.default_action) << "\n";
        os << "# domain: ip-bits=" << p.domain.ip_bits << " port-bits=" << p.domain.port_bits
           << " protocols=" << protocols_csv(p.domain) << "\n";
        for (const Rule& r : p.rules) os << rule_csv(r, p.domain) << "\n";
        return os.str();
    }
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<policy default=\"" << to_token(p.default_action) << "\" ip-bits=\""
       << p.domain.ip_bits << "\" port-bits=\"" << p.domain.port_bits << "\" protocols=\""
       << detail::xml_escape(protocols_csv(p.domain)) << "\"";
    if (p.rules.empty()) {
        os << "/>\n";
        return os.str();
    }
    os << ">\n";
    for (const Rule& r : p.rules) {
        os << "  <rule proto=\""
           << detail::xml_escape(r.protocol.any() ? "ANY" : *r.protocol.token) << "\" dir=\""
           << to_token(r.direction) << "\" src-ip=\"" << format_ip_pattern(r.src_ip, p.domain)
           << "\" src-port=\"" << format_port_pattern(r.src_port, p.domain) << "\" dst-ip=\""
           << format_ip_pattern(r.dst_ip, p.domain) << "\" dst-port=\""
           << format_port_pattern(r.dst_port, p.domain) << "\" action=\""
           << to_token(r.action) << "\"/>\n";
    }
    os << "</policy>\n";
    return os.str();
}

// --------------------------------------------------------------------------
// Packets
// --------------------------------------------------------------------------

PacketHeader parse_packet(const std::string& text, const Domain& domain) {
    std::istringstream is(text);
    std::vector<std::string> tok;
    std::string t;
    while (is >> t) tok.push_back(t);
    if (tok.size() != 4)
        throw ParseError("expected \"PROTO DIR SRC:SPT DST:DPT\", got " +
                         std::to_string(tok.size()) + " fields");

    PacketHeader p;
    if (!domain.protocol_index(tok[0]))
        throw ParseError("protocol not in domain: \"" + tok[0] + "\"");
    p.protocol = tok[0];
    auto dir = direction_from_token(tok[1]);
    if (!dir) throw ParseError("unknown direction \"" + tok[1] + "\"");
    p.direction = *dir;

    auto endpoint = [&](const std::string& s, uint32_t& ip, uint32_t& port) {
        auto colon = s.rfind(':');
        if (colon == std::string::npos)
            throw ParseError("endpoint missing port: \"" + s + "\"");
        ip = parse_ip_value(s.substr(0, colon), domain);
        auto pn = parse_uint(s.substr(colon + 1));
        if (!pn) throw ParseError("bad port in \"" + s + "\"");
        if (*pn > domain.port_max())
            throw ParseError("port outside domain: " + std::to_string(*pn));
        port = static_cast<uint32_t>(*pn);
    };
    endpoint(tok[2], p.src_ip, p.src_port);
    endpoint(tok[3], p.dst_ip, p.dst_port);
    if (p.protocol == "ICMP") {
        p.src_port = 0;
        p.dst_port = 0;
    }
    return p;
}

std::string format_packet(const PacketHeader& p, const Domain& domain) {
    std::ostringstream os;
    os << p.protocol << ' ' << to_token(p.direction) << ' '
       << format_ip_value(p.src_ip, domain) << ':' << p.src_port << ' '
       << format_ip_value(p.dst_ip, domain) << ':' << p.dst_port;
    return os.str();
}

}  // namespace fwp
