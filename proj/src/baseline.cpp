#include "fwp/baseline.hpp"

#include <algorithm>
#include <sstream>

#include "fwp/formats.hpp"
#include "text_util.hpp"
#include "xml_util.hpp"

namespace fwp {

namespace {

constexpr ValueSpan kPrivateA{0x0A000000u, 0x0AFFFFFFu};  // 10.0.0.0/8
constexpr ValueSpan kPrivateB{0xAC100000u, 0xAC1FFFFFu};  // 172.16.0.0/12
constexpr ValueSpan kPrivateC{0xC0A80000u, 0xC0A8FFFFu};  // 192.168.0.0/16
constexpr ValueSpan kLoopback{0x7F000000u, 0x7FFFFFFFu};  // 127.0.0.0/8
constexpr ValueSpan kUnspecified{0u, 0u};                 // 0.0.0.0
constexpr ValueSpan kBroadcast{0xFFFFFFFFu, 0xFFFFFFFFu};

bool spans_overlap(ValueSpan a, ValueSpan b) { return a.lo <= b.hi && b.lo <= a.hi; }

}  // namespace

void FrameworkConfig::validate() const {
    for (size_t i = 0; i < internal_ranges.size(); ++i) {
        for (size_t j = i + 1; j < internal_ranges.size(); ++j) {
            if (spans_overlap(internal_ranges[i], internal_ranges[j]))
                throw std::invalid_argument("framework: internal ranges overlap");
        }
    }
    for (const DmzServer& s : dmz_servers) {
        if (s.protocol.empty())
            throw std::invalid_argument("framework: server without protocol");
        if (s.port > 0xFFFF) throw std::invalid_argument("framework: server port too large");
        if (s.protocol == "ICMP" && s.port != 0)
            throw std::invalid_argument("framework: ICMP service cannot carry a port");
        for (const ValueSpan& r : internal_ranges) {
            if (r.contains(s.ip))
                throw std::invalid_argument(
                    "framework: DMZ server inside an internal range");
        }
    }
}

BaselineResult generate_baseline(const FrameworkConfig& config) {
    config.validate();

    Domain domain;  // full 32/16 width
    for (const DmzServer& s : config.dmz_servers) {
        if (!domain.protocol_index(s.protocol)) domain.protocols.push_back(s.protocol);
    }

    BaselineResult result;
    std::vector<Rule>& rules = result.policy.rules;
    result.policy.default_action = config.default_action;
    result.policy.domain = domain;

    const ValueSpan any_ip = span_full(domain.ip_max());
    const ValueSpan any_port = span_full(domain.port_max());
    const ValueSpan snmp_ports{161, 162};

    auto add = [&](ProtoPattern proto, Direction dir, ValueSpan sip, ValueSpan spt,
                   ValueSpan dip, ValueSpan dpt, Action act) -> int {
        Rule r{static_cast<int>(rules.size()) + 1, std::move(proto), dir,
               sip,  spt,  dip,  dpt,  act};
        rules.push_back(std::move(r));
        return rules.back().index;
    };
    auto entry = [&](std::string requirement, std::vector<int> idx, std::string note = "") {
        result.mapping.push_back({std::move(requirement), std::move(idx), std::move(note)});
    };

    // ACCEPT block: declared services and management exemptions come first so
    // the DENY sequence below cannot shadow them.
    {
        std::vector<int> idx;
        for (const DmzServer& s : config.dmz_servers) {
            ValueSpan svc_port = s.protocol == "ICMP" ? any_port : span_exact(s.port);
            idx.push_back(add(proto(s.protocol), Direction::Input, any_ip, any_port,
                              span_exact(s.ip), svc_port, Action::Accept));
        }
        entry("allow inbound traffic to each declared DMZ service", idx,
              config.dmz_servers.empty() ? "no servers declared" : "");
    }
    std::vector<int> fw_accepts;
    for (uint32_t fw : config.firewall_addrs) {
        for (const ValueSpan& m : config.management_hosts) {
            fw_accepts.push_back(add(proto_any(), Direction::Input, m, any_port,
                                     span_exact(fw), any_port, Action::Accept));
        }
    }
    std::vector<int> snmp_accepts;
    for (const ValueSpan& m : config.management_hosts) {
        snmp_accepts.push_back(add(proto("UDP"), Direction::Input, m, any_port, any_ip,
                                   snmp_ports, Action::Accept));
    }

    // DENY sequence
    entry("block all inbound ICMP traffic",
          {add(proto("ICMP"), Direction::Input, any_ip, any_port, any_ip, any_port,
               Action::Deny)});

    entry("block inbound traffic sourced from private class A/B/C ranges",
          {add(proto_any(), Direction::Input, kPrivateA, any_port, any_ip, any_port,
               Action::Deny),
           add(proto_any(), Direction::Input, kPrivateB, any_port, any_ip, any_port,
               Action::Deny),
           add(proto_any(), Direction::Input, kPrivateC, any_port, any_ip, any_port,
               Action::Deny)});

    {
        std::vector<int> idx = fw_accepts;
        for (uint32_t fw : config.firewall_addrs) {
            idx.push_back(add(proto_any(), Direction::Input, any_ip, any_port,
                              span_exact(fw), any_port, Action::Deny));
        }
        entry("block inbound traffic targeting the firewall addresses from unmanaged sources",
              idx,
              config.firewall_addrs.empty()
                  ? "no firewall addresses declared"
                  : "management sources are exempted by the preceding ACCEPT rules");
    }

    {
        std::vector<int> idx;
        for (const ValueSpan& r : config.internal_ranges) {
            idx.push_back(add(proto_any(), Direction::Input, r, any_port, any_ip, any_port,
                              Action::Deny));
        }
        entry("block inbound traffic claiming an internal range as its source (spoofing)",
              idx, config.internal_ranges.empty() ? "no internal ranges declared" : "");
    }

    {
        std::vector<int> idx = snmp_accepts;
        idx.push_back(add(proto("UDP"), Direction::Input, any_ip, any_port, any_ip,
                          snmp_ports, Action::Deny));
        entry("block inbound SNMP (UDP 161-162) from unmanaged sources", idx,
              config.management_hosts.empty()
                  ? "no management hosts declared; all SNMP blocked"
                  : "management sources are exempted by the preceding ACCEPT rules");
    }

    entry("block loopback addresses as source or target, both directions",
          {add(proto_any(), Direction::Input, kLoopback, any_port, any_ip, any_port,
               Action::Deny),
           add(proto_any(), Direction::Input, any_ip, any_port, kLoopback, any_port,
               Action::Deny),
           add(proto_any(), Direction::Output, kLoopback, any_port, any_ip, any_port,
               Action::Deny),
           add(proto_any(), Direction::Output, any_ip, any_port, kLoopback, any_port,
               Action::Deny)});

    entry("block the unspecified address 0.0.0.0 as source or target, both directions",
          {add(proto_any(), Direction::Input, kUnspecified, any_port, any_ip, any_port,
               Action::Deny),
           add(proto_any(), Direction::Input, any_ip, any_port, kUnspecified, any_port,
               Action::Deny),
           add(proto_any(), Direction::Output, kUnspecified, any_port, any_ip, any_port,
               Action::Deny),
           add(proto_any(), Direction::Output, any_ip, any_port, kUnspecified, any_port,
               Action::Deny)});

    {
        std::vector<int> idx;
        idx.push_back(add(proto_any(), Direction::Input, any_ip, any_port, kBroadcast,
                          any_port, Action::Deny));
        idx.push_back(add(proto_any(), Direction::Output, any_ip, any_port, kBroadcast,
                          any_port, Action::Deny));
        for (const ValueSpan& r : config.internal_ranges) {
            ValueSpan directed = span_exact(r.hi);  // directed-broadcast address
            idx.push_back(add(proto_any(), Direction::Input, any_ip, any_port, directed,
                              any_port, Action::Deny));
            idx.push_back(add(proto_any(), Direction::Output, any_ip, any_port, directed,
                              any_port, Action::Deny));
        }
        entry("block traffic addressed to broadcast destinations", idx);
    }

    entry("block inbound source-routed packets", {},
          "not expressible in the 5-tuple model; enforce at the packet layer");

    result.policy.validate();
    return result;
}

std::string_view to_token(ZoneKind z) {
    switch (z) {
        case ZoneKind::External: return "EXTERNAL";
        case ZoneKind::Dmz: return "DMZ";
        case ZoneKind::Internal: return "INTERNAL";
        case ZoneKind::Firewall: return "FIREWALL";
    }
    return "?";
}

std::optional<ZoneKind> zone_from_token(std::string_view t) {
    if (t == "EXTERNAL") return ZoneKind::External;
    if (t == "DMZ") return ZoneKind::Dmz;
    if (t == "INTERNAL") return ZoneKind::Internal;
    if (t == "FIREWALL") return ZoneKind::Firewall;
    return std::nullopt;
}

std::vector<TopologyViolation> validate_topology(const Topology& t) {
    std::vector<TopologyViolation> out;
    auto kind_of = [&](const std::string& name) {
        auto it = t.zones.find(name);
        if (it == t.zones.end())
            throw std::invalid_argument("topology: link references undeclared zone " + name);
        return it->second;
    };
    for (const auto& [a, b] : t.links) {
        ZoneKind ka = kind_of(a);
        ZoneKind kb = kind_of(b);
        auto pair_is = [&](ZoneKind x, ZoneKind y) {
            return (ka == x && kb == y) || (ka == y && kb == x);
        };
        if (pair_is(ZoneKind::External, ZoneKind::Internal))
            out.push_back({a, b, "external segment linked directly to the internal network"});
        if (pair_is(ZoneKind::Dmz, ZoneKind::Internal))
            out.push_back({a, b, "DMZ linked directly to the internal network"});
        if (pair_is(ZoneKind::External, ZoneKind::Dmz))
            out.push_back({a, b, "external segment linked directly to the DMZ"});
    }
    return out;
}

FrameworkFile parse_framework_xml(const std::string& text) {
    auto root = detail::read_xml_root(text, "policy");
    auto attrs =
        detail::attributes(root, {"default", "ip-bits", "port-bits", "protocols"}, "policy");
    auto def = action_from_token(detail::require_attr(attrs, "default", "policy"));
    if (!def) throw ParseError("XML: unknown action token in default attribute");

    // baseline rules talk about real addresses; only the full widths make sense
    Domain domain;
    if (auto it = attrs.find("ip-bits"); it != attrs.end() && it->second != "32")
        throw ParseError("framework requires ip-bits=32");
    if (auto it = attrs.find("port-bits"); it != attrs.end() && it->second != "16")
        throw ParseError("framework requires port-bits=16");

    FrameworkFile file;
    file.config.default_action = *def;

    const detail::pt::ptree* framework = nullptr;
    for (const auto& [key, node] : root) {
        if (key == "framework") {
            if (framework) throw ParseError("XML: multiple <framework> sections");
            framework = &node;
        }
    }
    if (!framework) throw ParseError("XML: missing <framework> section");

    for (const auto& [key, node] : *framework) {
        if (key == "<xmlattr>") throw ParseError("XML: <framework> takes no attributes");
        if (key == "internal") {
            auto a = detail::attributes(node, {"range"}, "internal");
            file.config.internal_ranges.push_back(
                parse_ip_pattern(detail::require_attr(a, "range", "internal"), domain));
        } else if (key == "firewall") {
            auto a = detail::attributes(node, {"addr"}, "firewall");
            file.config.firewall_addrs.push_back(
                parse_ip_value(detail::require_attr(a, "addr", "firewall"), domain));
        } else if (key == "server") {
            auto a = detail::attributes(node, {"ip", "port", "proto"}, "server");
            DmzServer s;
            s.ip = parse_ip_value(detail::require_attr(a, "ip", "server"), domain);
            auto port = detail::parse_uint(detail::require_attr(a, "port", "server"));
            if (!port || *port > 0xFFFF) throw ParseError("XML: bad server port");
            s.port = static_cast<uint32_t>(*port);
            s.protocol = detail::require_attr(a, "proto", "server");
            file.config.dmz_servers.push_back(std::move(s));
        } else if (key == "management") {
            auto a = detail::attributes(node, {"range"}, "management");
            file.config.management_hosts.push_back(
                parse_ip_pattern(detail::require_attr(a, "range", "management"), domain));
        } else if (key == "node") {
            auto a = detail::attributes(node, {"name", "zone"}, "node");
            std::string name = detail::require_attr(a, "name", "node");
            auto zone = zone_from_token(detail::require_attr(a, "zone", "node"));
            if (!zone) throw ParseError("XML: unknown zone kind on node " + name);
            if (!file.topology.zones.emplace(name, *zone).second)
                throw ParseError("XML: duplicate node " + name);
        } else if (key == "link") {
            auto a = detail::attributes(node, {"a", "b"}, "link");
            file.topology.links.emplace_back(detail::require_attr(a, "a", "link"),
                                             detail::require_attr(a, "b", "link"));
        } else {
            throw ParseError("XML: unexpected element <" + key + "> in <framework>");
        }
    }
    for (const auto& [a, b] : file.topology.links) {
        if (!file.topology.zones.count(a) || !file.topology.zones.count(b))
            throw ParseError("XML: link references undeclared node " + a + "-" + b);
    }
    try {
        file.config.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return file;
}

std::string baseline_mapping_text(const BaselineResult& r) {
    std::ostringstream os;
    os << "requirement map (" << r.policy.size() << " rules generated):\n";
    for (const auto& e : r.mapping) {
        os << "  " << e.requirement << " -> ";
        if (e.rules.empty()) {
            os << "no rules";
        } else {
            os << "rules";
            for (int i : e.rules) os << ' ' << i;
        }
        if (!e.note.empty()) os << " [" << e.note << "]";
        os << "\n";
    }
    return os.str();
}

std::string topology_report_text(const std::vector<TopologyViolation>& violations) {
    std::ostringstream os;
    os << violations.size() << " topology violations\n";
    for (const auto& v : violations)
        os << "  " << v.a << " -- " << v.b << ": " << v.why << "\n";
    return os.str();
}

}  // namespace fwp
