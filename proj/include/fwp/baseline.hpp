#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fwp/model.hpp"

namespace fwp {

struct DmzServer {
    uint32_t ip = 0;
    uint32_t port = 0;
    std::string protocol;

    bool operator==(const DmzServer&) const = default;
};

// What the protected framework looks like: which ranges are internal, where
// the firewalls sit, which DMZ services must stay reachable, and who may
// manage the firewalls.
struct FrameworkConfig {
    std::vector<ValueSpan> internal_ranges;
    std::vector<uint32_t> firewall_addrs;
    std::vector<DmzServer> dmz_servers;
    std::vector<ValueSpan> management_hosts;
    Action default_action = Action::Deny;

    void validate() const;  // throws std::invalid_argument
};

enum class ZoneKind { External, Dmz, Internal, Firewall };

std::string_view to_token(ZoneKind z);
std::optional<ZoneKind> zone_from_token(std::string_view t);

struct Topology {
    std::map<std::string, ZoneKind> zones;
    std::vector<std::pair<std::string, std::string>> links;  // undirected
};

// One blocking requirement and the generated rules that realize it; an empty
// rule list with a note marks a requirement the 5-tuple model cannot express.
struct BaselineEntry {
    std::string requirement;
    std::vector<int> rules;
    std::string note;
};

struct BaselineResult {
    Policy policy;
    std::vector<BaselineEntry> mapping;
};

// Builds the baseline blocking policy: ACCEPT rules for the declared DMZ
// services and management exemptions first, then the DENY sequence (inbound
// ICMP, private-class sources, firewall targets, spoofed internal sources,
// SNMP, loopback, 0.0.0.0, broadcast destinations), closed by the configured
// default.
BaselineResult generate_baseline(const FrameworkConfig& config);

struct TopologyViolation {
    std::string a;
    std::string b;
    std::string why;
};

// The DMZ must not touch the internal network directly, and the external
// side must reach DMZ/internal only through a firewall node.
std::vector<TopologyViolation> validate_topology(const Topology& t);

// Framework config file: the XML policy schema with a <framework> child
// carrying <internal range=>, <firewall addr=>, <server ip= port= proto=>,
// <management range=>, <node name= zone=> and <link a= b=> elements.
struct FrameworkFile {
    FrameworkConfig config;
    Topology topology;
};

FrameworkFile parse_framework_xml(const std::string& text);

std::string baseline_mapping_text(const BaselineResult& r);
std::string topology_report_text(const std::vector<TopologyViolation>& violations);

}  // namespace fwp
