// Test-side oracles: an independent first-match evaluator, dense decision
// tables over enumerable domains, and seeded random generators. Nothing here
// touches the header-space algebra or the portion engine it is used to check;
// matching is done with raw field compares only.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fwp/model.hpp"

namespace oracle {

struct Match {
    fwp::Action action = fwp::Action::Deny;
    std::optional<int> rule;

    bool operator==(const Match&) const = default;
};

inline bool rule_matches(const fwp::Rule& r, const fwp::PacketHeader& p) {
    if (r.direction != p.direction) return false;
    if (r.protocol.token && *r.protocol.token != p.protocol) return false;
    return p.src_ip >= r.src_ip.lo && p.src_ip <= r.src_ip.hi &&
           p.src_port >= r.src_port.lo && p.src_port <= r.src_port.hi &&
           p.dst_ip >= r.dst_ip.lo && p.dst_ip <= r.dst_ip.hi &&
           p.dst_port >= r.dst_port.lo && p.dst_port <= r.dst_port.hi;
}

inline Match first_match(const fwp::Policy& pol, const fwp::PacketHeader& p) {
    for (const auto& r : pol.rules) {
        if (rule_matches(r, p)) return {r.action, r.index};
    }
    return {pol.default_action, std::nullopt};
}

// ---------------------------------------------------------------------------
// Dense decision tables. Packets are mapped to ordinals in the fixed layout
// (direction, protocol, src_ip, src_port, dst_ip, dst_port), row-major.
// ---------------------------------------------------------------------------

struct Packer {
    uint64_t nproto, nip, nport;

    explicit Packer(const fwp::Domain& d)
        : nproto(d.protocols.size()),
          nip(uint64_t{1} << d.ip_bits),
          nport(uint64_t{1} << d.port_bits) {}

    uint64_t total() const { return 2 * nproto * nip * nip * nport * nport; }

    uint64_t ordinal(unsigned dir, uint64_t proto, uint64_t sip, uint64_t spt,
                     uint64_t dip, uint64_t dpt) const {
        return ((((dir * nproto + proto) * nip + sip) * nport + spt) * nip + dip) * nport +
               dpt;
    }

    fwp::PacketHeader packet(const fwp::Domain& d, uint64_t ord) const {
        fwp::PacketHeader p;
        p.dst_port = static_cast<uint32_t>(ord % nport);
        ord /= nport;
        p.dst_ip = static_cast<uint32_t>(ord % nip);
        ord /= nip;
        p.src_port = static_cast<uint32_t>(ord % nport);
        ord /= nport;
        p.src_ip = static_cast<uint32_t>(ord % nip);
        ord /= nip;
        p.protocol = d.protocols[static_cast<size_t>(ord % nproto)];
        ord /= nproto;
        p.direction = ord == 0 ? fwp::Direction::Input : fwp::Direction::Output;
        return p;
    }
};

// cell encoding: -1 = untouched (default action, no rule); otherwise
// rule_index * 4 + action code
inline int32_t encode_cell(int rule_index, fwp::Action a) {
    return rule_index * 4 + static_cast<int32_t>(a);
}

inline Match decode_cell(int32_t cell, const fwp::Policy& pol) {
    if (cell < 0) return {pol.default_action, std::nullopt};
    return {static_cast<fwp::Action>(cell & 3), cell >> 2};
}

// Linear first-match for the whole domain at once: rules are painted in
// priority order and the first writer wins, which is exactly the lowest-index
// match for every packet.
inline void fill_decision_table(const fwp::Policy& pol, std::vector<int32_t>& table) {
    Packer pk(pol.domain);
    table.assign(pk.total(), -1);
    for (const auto& r : pol.rules) {
        const int32_t code = encode_cell(r.index, r.action);
        unsigned dir = r.direction == fwp::Direction::Input ? 0 : 1;
        uint64_t plo = 0, phi = pk.nproto - 1;
        if (r.protocol.token) {
            plo = phi = *pol.domain.protocol_index(*r.protocol.token);
        }
        for (uint64_t proto = plo; proto <= phi; ++proto) {
            for (uint64_t sip = r.src_ip.lo; sip <= r.src_ip.hi; ++sip) {
                for (uint64_t spt = r.src_port.lo; spt <= r.src_port.hi; ++spt) {
                    uint64_t base = (((dir * pk.nproto + proto) * pk.nip + sip) * pk.nport +
                                     spt) * pk.nip;
                    for (uint64_t dip = r.dst_ip.lo; dip <= r.dst_ip.hi; ++dip) {
                        uint64_t row = (base + dip) * pk.nport;
                        for (uint64_t dpt = r.dst_port.lo; dpt <= r.dst_port.hi; ++dpt) {
                            int32_t& cell = table[row + dpt];
                            if (cell < 0) cell = code;
                        }
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Seeded generators
// ---------------------------------------------------------------------------

inline uint32_t uniform(std::mt19937& g, uint32_t lo, uint32_t hi) {
    return std::uniform_int_distribution<uint32_t>(lo, hi)(g);
}

inline fwp::ValueSpan random_span(std::mt19937& g, uint32_t bound) {
    switch (uniform(g, 0, 3)) {
        case 0: return fwp::span_full(bound);
        case 1: {
            uint32_t v = uniform(g, 0, bound);
            return {v, v};
        }
        default: {
            uint32_t a = uniform(g, 0, bound);
            uint32_t b = uniform(g, 0, bound);
            return {std::min(a, b), std::max(a, b)};
        }
    }
}

inline fwp::Rule random_rule(std::mt19937& g, const fwp::Domain& d, int index) {
    fwp::Rule r;
    r.index = index;
    if (uniform(g, 0, 3) == 0) {
        r.protocol = fwp::proto_any();
    } else {
        r.protocol = fwp::proto(d.protocols[uniform(g, 0, static_cast<uint32_t>(d.protocols.size() - 1))]);
    }
    r.direction = uniform(g, 0, 1) == 0 ? fwp::Direction::Input : fwp::Direction::Output;
    r.src_ip = random_span(g, d.ip_max());
    r.src_port = random_span(g, d.port_max());
    r.dst_ip = random_span(g, d.ip_max());
    r.dst_port = random_span(g, d.port_max());
    if (r.protocol.token && *r.protocol.token == "ICMP") {
        // ICMP rules may only constrain ports to ANY or the dummy value 0
        r.src_port = uniform(g, 0, 1) ? fwp::span_full(d.port_max()) : fwp::span_exact(0);
        r.dst_port = uniform(g, 0, 1) ? fwp::span_full(d.port_max()) : fwp::span_exact(0);
    }
    static const fwp::Action acts[] = {fwp::Action::Accept, fwp::Action::Deny,
                                       fwp::Action::Drop};
    r.action = acts[uniform(g, 0, 2)];
    return r;
}

inline fwp::Policy random_policy(std::mt19937& g, const fwp::Domain& d, int max_rules) {
    fwp::Policy p;
    p.domain = d;
    static const fwp::Action acts[] = {fwp::Action::Accept, fwp::Action::Deny,
                                       fwp::Action::Drop};
    p.default_action = acts[uniform(g, 0, 2)];
    int n = static_cast<int>(uniform(g, 0, static_cast<uint32_t>(max_rules)));
    for (int i = 1; i <= n; ++i) p.rules.push_back(random_rule(g, d, i));
    return p;
}

inline fwp::PacketHeader random_packet(std::mt19937& g, const fwp::Domain& d) {
    fwp::PacketHeader p;
    p.protocol = d.protocols[uniform(g, 0, static_cast<uint32_t>(d.protocols.size() - 1))];
    p.direction = uniform(g, 0, 1) == 0 ? fwp::Direction::Input : fwp::Direction::Output;
    p.src_ip = uniform(g, 0, d.ip_max());
    p.src_port = uniform(g, 0, d.port_max());
    p.dst_ip = uniform(g, 0, d.ip_max());
    p.dst_port = uniform(g, 0, d.port_max());
    return p;
}

// Small domains used across the test suites.
inline fwp::Domain tiny_domain(int ip_bits, int port_bits,
                               std::vector<std::string> protocols = {"TCP", "UDP"}) {
    fwp::Domain d;
    d.ip_bits = ip_bits;
    d.port_bits = port_bits;
    d.protocols = std::move(protocols);
    return d;
}

}  // namespace oracle
