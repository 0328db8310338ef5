#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fwp {

// Raised for malformed textual input (policy files, logs, packets, configs).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when two values built over different domains (or dimension kinds)
// are combined.
class DomainMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when an enumeration would exceed its configured cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Action { Accept, Deny, Drop };
enum class Direction { Input, Output };

// ACCEPT permits; DENY and DROP are distinct tokens but both non-permit.
inline bool is_permit(Action a) { return a == Action::Accept; }

std::string_view to_token(Action a);
std::string_view to_token(Direction d);
std::optional<Action> action_from_token(std::string_view t);
std::optional<Direction> direction_from_token(std::string_view t);

using u128 = unsigned __int128;

std::string u128_to_string(u128 v);

// The finite header space every policy is defined over: IP addresses are
// ip_bits wide, ports port_bits wide, and the protocol dimension holds the
// listed tokens. Defaults model real IPv4/TCP-style traffic; tests shrink the
// widths so whole policies can be enumerated.
struct Domain {
    int ip_bits = 32;    // 1..=32
    int port_bits = 16;  // 1..=16
    std::vector<std::string> protocols = {"TCP", "UDP", "ICMP"};

    uint32_t ip_max() const {
        return ip_bits >= 32 ? 0xFFFFFFFFu : (uint32_t{1} << ip_bits) - 1;
    }
    uint32_t port_max() const { return (uint32_t{1} << port_bits) - 1; }

    std::optional<uint32_t> protocol_index(std::string_view token) const;

    // Tuple count without the direction coordinate:
    // |protocols| * 2^(2*ip_bits) * 2^(2*port_bits).
    u128 header_count() const;
    // Full packet count, both directions.
    u128 packet_count() const { return header_count() * 2; }

    void validate() const;  // throws std::invalid_argument

    bool operator==(const Domain&) const = default;
};

// One inclusive interval of values; the normalized form of every rule
// pattern (exact value, CIDR prefix, lo-hi range, or ANY = full width).
struct ValueSpan {
    uint32_t lo = 0;
    uint32_t hi = 0;

    bool contains(uint32_t v) const { return lo <= v && v <= hi; }
    uint64_t size() const { return uint64_t{hi} - lo + 1; }
    bool is_full(uint32_t bound) const { return lo == 0 && hi == bound; }

    bool operator==(const ValueSpan&) const = default;
};

inline ValueSpan span_exact(uint32_t v) { return {v, v}; }
inline ValueSpan span_full(uint32_t bound) { return {0, bound}; }

// Protocol pattern: a single domain token, or ANY.
struct ProtoPattern {
    std::optional<std::string> token;  // nullopt = ANY

    bool any() const { return !token.has_value(); }
    bool matches(std::string_view t) const { return any() || *token == t; }

    bool operator==(const ProtoPattern&) const = default;
};

inline ProtoPattern proto_any() { return {}; }
inline ProtoPattern proto(std::string token) { return {std::move(token)}; }

// One concrete packet header. ICMP packets carry dummy ports 0; parsers and
// log conversion normalize that before matching.
struct PacketHeader {
    std::string protocol;
    Direction direction = Direction::Input;
    uint32_t src_ip = 0;
    uint32_t src_port = 0;
    uint32_t dst_ip = 0;
    uint32_t dst_port = 0;

    bool operator==(const PacketHeader&) const = default;
};

// One ordered policy entry: <protocol, direction, source ip/port,
// target ip/port, action>, priority given by index (1-based, lower wins).
struct Rule {
    int index = 0;
    ProtoPattern protocol;
    Direction direction = Direction::Input;
    ValueSpan src_ip;
    ValueSpan src_port;
    ValueSpan dst_ip;
    ValueSpan dst_port;
    Action action = Action::Deny;

    bool matches(const PacketHeader& p) const {
        return protocol.matches(p.protocol) && direction == p.direction &&
               src_ip.contains(p.src_ip) && src_port.contains(p.src_port) &&
               dst_ip.contains(p.dst_ip) && dst_port.contains(p.dst_port);
    }

    // The 6-tuple identity used by update deduplication: everything except
    // priority index and action.
    bool same_match_tuple(const Rule& o) const {
        return protocol == o.protocol && direction == o.direction &&
               src_ip == o.src_ip && src_port == o.src_port &&
               dst_ip == o.dst_ip && dst_port == o.dst_port;
    }

    bool operator==(const Rule&) const = default;
};

// Ordered rule list + default action over a domain. Rule indices are 1..n in
// list order.
struct Policy {
    std::vector<Rule> rules;
    Action default_action = Action::Deny;
    Domain domain;

    int size() const { return static_cast<int>(rules.size()); }
    const Rule& rule(int index) const { return rules.at(static_cast<size_t>(index) - 1); }

    // Reassigns indices 1..n in list order.
    void renumber();
    // Checks index density and that every pattern lies inside the domain.
    void validate() const;  // throws std::invalid_argument

    bool operator==(const Policy&) const = default;
};

Policy make_policy(std::vector<Rule> rules, Action default_action, Domain domain);

// Validates one rule against a domain (span bounds, protocol token known,
// ICMP port constraint). Throws std::invalid_argument.
void validate_rule(const Rule& r, const Domain& d);

// Checks a concrete packet against a domain.
bool in_domain(const PacketHeader& p, const Domain& d);

}  // namespace fwp
