#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fwp/model.hpp"

namespace fwp {

// ---------------------------------------------------------------------------
// IntervalSet: sorted, pairwise-disjoint, non-adjacent inclusive intervals
// over uint32_t. This canonical form is maintained by every operation, so
// structural equality is set equality.
// ---------------------------------------------------------------------------

struct Interval {
    uint32_t lo = 0;
    uint32_t hi = 0;
    bool operator==(const Interval&) const = default;
};

class IntervalSet {
public:
    IntervalSet() = default;

    static IntervalSet single(uint32_t lo, uint32_t hi);
    static IntervalSet point(uint32_t v) { return single(v, v); }
    static IntervalSet full(uint32_t bound) { return single(0, bound); }
    // Normalizes arbitrary input (sorts, merges overlaps and adjacency).
    static IntervalSet of(std::vector<Interval> ivs);

    bool empty() const { return ivs_.empty(); }
    bool contains(uint32_t v) const;
    uint64_t count() const;
    const std::vector<Interval>& intervals() const { return ivs_; }
    uint32_t min() const { return ivs_.front().lo; }
    uint32_t max() const { return ivs_.back().hi; }

    bool subset_of(const IntervalSet& o) const;  // improper
    IntervalSet complement(uint32_t bound) const;

    bool operator==(const IntervalSet&) const = default;

    friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
    friend IntervalSet unite(const IntervalSet& a, const IntervalSet& b);
    friend IntervalSet subtract(const IntervalSet& a, const IntervalSet& b);
    friend bool disjoint(const IntervalSet& a, const IntervalSet& b);

private:
    std::vector<Interval> ivs_;
};

// ---------------------------------------------------------------------------
// DimSet: one dimension's value set, tagged with what the dimension holds so
// protocol sets and numeric intervals cannot be compared by accident.
// Protocol sets store indices into Domain::protocols.
// ---------------------------------------------------------------------------

enum class DimKind { Protocols, Intervals };

struct DimSet {
    DimKind kind = DimKind::Intervals;
    IntervalSet set;

    bool empty() const { return set.empty(); }
    uint64_t count() const { return set.count(); }
    bool operator==(const DimSet&) const = default;
};

DimSet intersect(const DimSet& a, const DimSet& b);
DimSet subtract(const DimSet& a, const DimSet& b);

// Exactly one of these holds for any pair of non-empty same-kind sets.
// SUBSET and SUPERSET are proper.
enum class FieldRelation { Equal, Subset, Superset, Partial, Disjoint };

std::string_view to_token(FieldRelation r);
FieldRelation field_relation(const DimSet& a, const DimSet& b);

// ---------------------------------------------------------------------------
// Box: the product of one value set per dimension plus a direction mask. The
// paper treats direction as part of the address space, so boxes carry it as a
// sixth two-valued dimension.
// ---------------------------------------------------------------------------

using DirMask = uint8_t;
inline constexpr DirMask kDirInput = 1;
inline constexpr DirMask kDirOutput = 2;
inline constexpr DirMask kDirBoth = kDirInput | kDirOutput;

inline DirMask dir_mask(Direction d) {
    return d == Direction::Input ? kDirInput : kDirOutput;
}
inline int dir_count(DirMask m) { return ((m & 1) != 0) + ((m & 2) != 0); }

// A packet resolved against a domain: protocol as index, ready for box tests.
struct PacketKey {
    uint32_t proto = 0;
    DirMask dir = kDirInput;
    uint32_t src_ip = 0;
    uint32_t src_port = 0;
    uint32_t dst_ip = 0;
    uint32_t dst_port = 0;
};

PacketKey resolve(const PacketHeader& p, const Domain& d);  // throws DomainMismatch

struct Box {
    DimSet protocol{DimKind::Protocols, {}};
    DimSet src_ip;
    DimSet src_port;
    DimSet dst_ip;
    DimSet dst_port;
    DirMask direction = kDirBoth;

    bool has_empty_dim() const {
        return direction == 0 || protocol.empty() || src_ip.empty() ||
               src_port.empty() || dst_ip.empty() || dst_port.empty();
    }
    u128 count() const;
    bool contains(const PacketKey& k) const;

    bool operator==(const Box&) const = default;
};

// Both empty (no overlap anywhere) and valued results are meaningful; an
// intersection with any empty dimension is reported via has_empty_dim().
Box box_intersect(const Box& a, const Box& b);
// Difference as disjoint boxes, carved dimension by dimension in the fixed
// order protocol, src_ip, src_port, dst_ip, dst_port, direction.
std::vector<Box> box_subtract(const Box& a, const Box& b);
bool box_disjoint(const Box& a, const Box& b);

// ---------------------------------------------------------------------------
// HeaderSpace: a region of packet-header space as pairwise-disjoint boxes
// over one domain. The empty list is the empty space.
// ---------------------------------------------------------------------------

class HeaderSpace {
public:
    explicit HeaderSpace(Domain d) : domain_(std::move(d)) {}

    static HeaderSpace empty(const Domain& d) { return HeaderSpace(d); }
    static HeaderSpace full(const Domain& d);
    static HeaderSpace of_box(const Domain& d, Box b);

    const Domain& domain() const { return domain_; }
    const std::vector<Box>& boxes() const { return boxes_; }
    bool is_empty() const { return boxes_.empty(); }
    u128 count() const;
    bool contains(const PacketHeader& p) const;
    bool contains(const PacketKey& k) const;

private:
    friend HeaderSpace intersect(const HeaderSpace& a, const HeaderSpace& b);
    friend HeaderSpace subtract(const HeaderSpace& a, const HeaderSpace& b);
    friend HeaderSpace unite(const HeaderSpace& a, const HeaderSpace& b);
    friend HeaderSpace space_of_rule(const Rule& r, const Domain& d);

    Domain domain_;
    std::vector<Box> boxes_;
};

// The address space a rule covers: one box, ANY fields spanning the full
// dimension.
HeaderSpace space_of_rule(const Rule& r, const Domain& d);

HeaderSpace intersect(const HeaderSpace& a, const HeaderSpace& b);
HeaderSpace subtract(const HeaderSpace& a, const HeaderSpace& b);
HeaderSpace unite(const HeaderSpace& a, const HeaderSpace& b);
bool space_subset(const HeaderSpace& a, const HeaderSpace& b);
bool space_equal(const HeaderSpace& a, const HeaderSpace& b);

// ---------------------------------------------------------------------------
// Enumeration. Order is deterministic: boxes in list order; within a box,
// direction (INPUT first), protocol, src_ip, src_port, dst_ip, dst_port,
// each ascending. Refuses domains whose total packet count exceeds the cap.
// ---------------------------------------------------------------------------

inline constexpr u128 kDefaultEnumCap = u128{1} << 24;

void for_each_packet(const HeaderSpace& s,
                     const std::function<void(const PacketHeader&)>& fn,
                     u128 cap = kDefaultEnumCap);
std::vector<PacketHeader> enumerate_packets(const HeaderSpace& s,
                                            u128 cap = kDefaultEnumCap);

// Rendering helpers shared by the portion/relation reports.
std::string format_dim(const DimSet& s, const Domain& d, bool ip_dim);
std::string format_box(const Box& b, const Domain& d);

}  // namespace fwp
