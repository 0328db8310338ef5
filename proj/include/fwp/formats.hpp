#pragma once

#include <string>

#include "fwp/model.hpp"

namespace fwp {

enum class PolicyFormat { Csv, Xml };

// CSV rule line: PROTOCOL, DIRECTION, SRC_IP, SRC_PORT, DST_IP, DST_PORT, ACTION.
// Patterns are normalized on parse (exact -> point span, ANY -> full width,
// CIDR/wildcard -> aligned span).
Rule parse_rule_line(const std::string& text, int index, const Domain& domain);

// Multi-line CSV; blank lines and '#' comments skipped; errors carry the
// 1-based line number.
Policy parse_policy_file(const std::string& text, Action default_action,
                         const Domain& domain);

// <policy default=".." ip-bits=".." port-bits=".." protocols="A,B,..">
//   <rule proto=".." dir=".." src-ip=".." src-port=".." dst-ip=".." dst-port=".." action=".."/>
// </policy>
// Element order defines priority. Domain attributes default to 32/16/TCP,UDP,ICMP.
Policy parse_xml_policy(const std::string& text);

// Canonical text; parse(serialize(p)) is rule-for-rule identical to p and
// serializing twice yields identical bytes.
std::string serialize_policy(const Policy& p, PolicyFormat format);

// "PROTO DIR SRC:SPT DST:DPT"; ICMP ports are normalized to 0.
PacketHeader parse_packet(const std::string& text, const Domain& domain);
std::string format_packet(const PacketHeader& p, const Domain& domain);

// Pattern text <-> span. IP patterns at ip_bits=32 use dotted quads
// (10.0.0.3, 10.0.0.0/8, 10.*.*.*, a-b, ANY); narrower domains use plain
// integers (7, 4/2, 1-6, ANY). Ports are integers, lo-hi, or ANY.
ValueSpan parse_ip_pattern(const std::string& text, const Domain& domain);
ValueSpan parse_port_pattern(const std::string& text, const Domain& domain);
std::string format_ip_pattern(ValueSpan s, const Domain& domain);
std::string format_port_pattern(ValueSpan s, const Domain& domain);

// Exact IP value (no pattern forms).
uint32_t parse_ip_value(const std::string& text, const Domain& domain);
std::string format_ip_value(uint32_t v, const Domain& domain);

}  // namespace fwp
