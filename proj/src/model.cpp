#include "fwp/model.hpp"

#include <algorithm>
#include <set>

namespace fwp {

std::string_view to_token(Action a) {
    switch (a) {
        case Action::Accept: return "ACCEPT";
        case Action::Deny: return "DENY";
        case Action::Drop: return "DROP";
    }
    return "?";
}

std::string_view to_token(Direction d) {
    return d == Direction::Input ? "INPUT" : "OUTPUT";
}

std::optional<Action> action_from_token(std::string_view t) {
    if (t == "ACCEPT") return Action::Accept;
    if (t == "DENY") return Action::Deny;
    if (t == "DROP") return Action::Drop;
    return std::nullopt;
}

std::optional<Direction> direction_from_token(std::string_view t) {
    if (t == "INPUT") return Direction::Input;
    if (t == "OUTPUT") return Direction::Output;
    return std::nullopt;
}

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

std::optional<uint32_t> Domain::protocol_index(std::string_view token) const {
    for (size_t i = 0; i < protocols.size(); ++i) {
        if (protocols[i] == token) return static_cast<uint32_t>(i);
    }
    return std::nullopt;
}

u128 Domain::header_count() const {
    u128 ips = u128{1} << ip_bits;
    u128 ports = u128{1} << port_bits;
    return u128{protocols.size()} * ips * ips * ports * ports;
}

void Domain::validate() const {
    if (ip_bits < 1 || ip_bits > 32)
        throw std::invalid_argument("domain: ip_bits must be in 1..32");
    if (port_bits < 1 || port_bits > 16)
        throw std::invalid_argument("domain: port_bits must be in 1..16");
    if (protocols.empty())
        throw std::invalid_argument("domain: protocol list must not be empty");
    std::set<std::string> seen;
    for (const auto& p : protocols) {
        if (p.empty()) throw std::invalid_argument("domain: empty protocol token");
        if (!seen.insert(p).second)
            throw std::invalid_argument("domain: duplicate protocol token " + p);
    }
}

void Policy::renumber() {
    int i = 1;
    for (auto& r : rules) r.index = i++;
}

void Policy::validate() const {
    domain.validate();
    int expect = 1;
    for (const auto& r : rules) {
        if (r.index != expect)
            throw std::invalid_argument("policy: rule indices must be dense 1..n");
        validate_rule(r, domain);
        ++expect;
    }
}

Policy make_policy(std::vector<Rule> rules, Action default_action, Domain domain) {
    Policy p{std::move(rules), default_action, std::move(domain)};
    p.renumber();
    p.validate();
    return p;
}

void validate_rule(const Rule& r, const Domain& d) {
    if (!r.protocol.any() && !d.protocol_index(*r.protocol.token))
        throw std::invalid_argument("rule " + std::to_string(r.index) +
                                    ": protocol not in domain: " + *r.protocol.token);
    auto check_span = [&](const ValueSpan& s, uint32_t bound, const char* what) {
        if (s.lo > s.hi || s.hi > bound)
            throw std::invalid_argument("rule " + std::to_string(r.index) + ": " + what +
                                        " outside domain");
    };
    check_span(r.src_ip, d.ip_max(), "source IP");
    check_span(r.dst_ip, d.ip_max(), "target IP");
    check_span(r.src_port, d.port_max(), "source port");
    check_span(r.dst_port, d.port_max(), "target port");
    // ICMP carries no ports; patterns must be ANY or the dummy value 0.
    if (!r.protocol.any() && *r.protocol.token == "ICMP") {
        for (const ValueSpan* s : {&r.src_port, &r.dst_port}) {
            bool ok = s->is_full(d.port_max()) || (s->lo == 0 && s->hi == 0);
            if (!ok)
                throw std::invalid_argument("rule " + std::to_string(r.index) +
                                            ": ICMP port pattern must be ANY or 0");
        }
    }
}

bool in_domain(const PacketHeader& p, const Domain& d) {
    return d.protocol_index(p.protocol).has_value() && p.src_ip <= d.ip_max() &&
           p.dst_ip <= d.ip_max() && p.src_port <= d.port_max() &&
           p.dst_port <= d.port_max();
}

}  // namespace fwp
