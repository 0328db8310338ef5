#include "fwp/space.hpp"

#include <algorithm>
#include <sstream>

namespace fwp {

// --------------------------------------------------------------------------
// IntervalSet
// --------------------------------------------------------------------------

IntervalSet IntervalSet::single(uint32_t lo, uint32_t hi) {
    IntervalSet s;
    if (lo <= hi) s.ivs_.push_back({lo, hi});
    return s;
}

IntervalSet IntervalSet::of(std::vector<Interval> ivs) {
    std::erase_if(ivs, [](const Interval& iv) { return iv.lo > iv.hi; });
    std::sort(ivs.begin(), ivs.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    IntervalSet s;
    for (const Interval& iv : ivs) {
        if (!s.ivs_.empty()) {
            Interval& last = s.ivs_.back();
            // merge overlap and adjacency (hi+1 == lo)
            if (iv.lo <= last.hi || (last.hi != UINT32_MAX && iv.lo == last.hi + 1)) {
                last.hi = std::max(last.hi, iv.hi);
                continue;
            }
        }
        s.ivs_.push_back(iv);
    }
    return s;
}

bool IntervalSet::contains(uint32_t v) const {
    auto it = std::upper_bound(ivs_.begin(), ivs_.end(), v,
                               [](uint32_t x, const Interval& iv) { return x < iv.lo; });
    return it != ivs_.begin() && std::prev(it)->hi >= v;
}

uint64_t IntervalSet::count() const {
    uint64_t n = 0;
    for (const Interval& iv : ivs_) n += uint64_t{iv.hi} - iv.lo + 1;
    return n;
}

bool IntervalSet::subset_of(const IntervalSet& o) const {
    // canonical form: each of our intervals must fit inside a single one of o's
    size_t j = 0;
    for (const Interval& iv : ivs_) {
        while (j < o.ivs_.size() && o.ivs_[j].hi < iv.lo) ++j;
        if (j == o.ivs_.size() || o.ivs_[j].lo > iv.lo || o.ivs_[j].hi < iv.hi)
            return false;
    }
    return true;
}

IntervalSet IntervalSet::complement(uint32_t bound) const {
    return subtract(full(bound), *this);
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet out;
    size_t i = 0, j = 0;
    while (i < a.ivs_.size() && j < b.ivs_.size()) {
        const Interval& x = a.ivs_[i];
        const Interval& y = b.ivs_[j];
        uint32_t lo = std::max(x.lo, y.lo);
        uint32_t hi = std::min(x.hi, y.hi);
        if (lo <= hi) out.ivs_.push_back({lo, hi});
        // pieces from distinct source intervals stay disjoint and non-adjacent
        if (x.hi < y.hi)
            ++i;
        else
            ++j;
    }
    return out;
}

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> all = a.ivs_;
    all.insert(all.end(), b.ivs_.begin(), b.ivs_.end());
    return IntervalSet::of(std::move(all));
}

IntervalSet subtract(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet out;
    size_t j = 0;
    for (const Interval& iv : a.ivs_) {
        uint32_t cur = iv.lo;
        bool consumed = false;
        while (j < b.ivs_.size() && b.ivs_[j].hi < cur) ++j;
        for (size_t k = j; k < b.ivs_.size() && b.ivs_[k].lo <= iv.hi; ++k) {
            const Interval& cut = b.ivs_[k];
            if (cut.hi < cur) continue;
            if (cut.lo > cur) out.ivs_.push_back({cur, cut.lo - 1});
            if (cut.hi >= iv.hi) {
                consumed = true;
                break;
            }
            cur = cut.hi + 1;
        }
        if (!consumed && cur <= iv.hi) out.ivs_.push_back({cur, iv.hi});
    }
    return out;
}

bool disjoint(const IntervalSet& a, const IntervalSet& b) {
    size_t i = 0, j = 0;
    while (i < a.ivs_.size() && j < b.ivs_.size()) {
        const Interval& x = a.ivs_[i];
        const Interval& y = b.ivs_[j];
        if (x.hi < y.lo)
            ++i;
        else if (y.hi < x.lo)
            ++j;
        else
            return false;
    }
    return true;
}

// --------------------------------------------------------------------------
// DimSet
// --------------------------------------------------------------------------

static void check_kind(const DimSet& a, const DimSet& b) {
    if (a.kind != b.kind)
        throw DomainMismatch("dimension kind mismatch (protocol set vs interval set)");
}

DimSet intersect(const DimSet& a, const DimSet& b) {
    check_kind(a, b);
    return {a.kind, intersect(a.set, b.set)};
}

DimSet subtract(const DimSet& a, const DimSet& b) {
    check_kind(a, b);
    return {a.kind, subtract(a.set, b.set)};
}

std::string_view to_token(FieldRelation r) {
    switch (r) {
        case FieldRelation::Equal: return "EQUAL";
        case FieldRelation::Subset: return "SUBSET";
        case FieldRelation::Superset: return "SUPERSET";
        case FieldRelation::Partial: return "PARTIAL";
        case FieldRelation::Disjoint: return "DISJOINT";
    }
    return "?";
}

FieldRelation field_relation(const DimSet& a, const DimSet& b) {
    check_kind(a, b);
    if (a.set == b.set) return FieldRelation::Equal;
    if (a.set.subset_of(b.set)) return FieldRelation::Subset;
    if (b.set.subset_of(a.set)) return FieldRelation::Superset;
    if (disjoint(a.set, b.set)) return FieldRelation::Disjoint;
    return FieldRelation::Partial;
}

// --------------------------------------------------------------------------
// Box
// --------------------------------------------------------------------------

PacketKey resolve(const PacketHeader& p, const Domain& d) {
    auto idx = d.protocol_index(p.protocol);
    if (!idx) throw DomainMismatch("protocol not in domain: " + p.protocol);
    if (p.src_ip > d.ip_max() || p.dst_ip > d.ip_max())
        throw DomainMismatch("IP value outside domain");
    if (p.src_port > d.port_max() || p.dst_port > d.port_max())
        throw DomainMismatch("port value outside domain");
    return {*idx,     dir_mask(p.direction), p.src_ip,
            p.src_port, p.dst_ip,            p.dst_port};
}

u128 Box::count() const {
    return u128{protocol.count()} * src_ip.count() * src_port.count() *
           dst_ip.count() * dst_port.count() * static_cast<unsigned>(dir_count(direction));
}

bool Box::contains(const PacketKey& k) const {
    return (direction & k.dir) != 0 && protocol.set.contains(k.proto) &&
           src_ip.set.contains(k.src_ip) && src_port.set.contains(k.src_port) &&
           dst_ip.set.contains(k.dst_ip) && dst_port.set.contains(k.dst_port);
}

namespace {
constexpr DimSet Box::* kBoxDims[] = {&Box::protocol, &Box::src_ip, &Box::src_port,
                                      &Box::dst_ip, &Box::dst_port};
}

Box box_intersect(const Box& a, const Box& b) {
    Box out = a;
    for (auto dim : kBoxDims) out.*dim = intersect(a.*dim, b.*dim);
    out.direction = a.direction & b.direction;
    return out;
}

bool box_disjoint(const Box& a, const Box& b) {
    if ((a.direction & b.direction) == 0) return true;
    for (auto dim : kBoxDims) {
        if (disjoint((a.*dim).set, (b.*dim).set)) return true;
    }
    return false;
}

std::vector<Box> box_subtract(const Box& a, const Box& b) {
    if (box_disjoint(a, b)) return {a};
    std::vector<Box> out;
    Box rest = a;
    for (auto dim : kBoxDims) {
        DimSet outside = subtract(rest.*dim, b.*dim);
        if (!outside.empty()) {
            Box piece = rest;
            piece.*dim = std::move(outside);
            out.push_back(std::move(piece));
        }
        rest.*dim = intersect(rest.*dim, b.*dim);
    }
    DirMask outside_dir = rest.direction & static_cast<DirMask>(~b.direction);
    if (outside_dir != 0) {
        Box piece = rest;
        piece.direction = outside_dir;
        out.push_back(std::move(piece));
    }
    // what is left of `rest` is a ∩ b and is dropped
    return out;
}

// --------------------------------------------------------------------------
// HeaderSpace
// --------------------------------------------------------------------------

HeaderSpace HeaderSpace::full(const Domain& d) {
    Box b;
    b.protocol = {DimKind::Protocols,
                  IntervalSet::full(static_cast<uint32_t>(d.protocols.size() - 1))};
    b.src_ip = {DimKind::Intervals, IntervalSet::full(d.ip_max())};
    b.src_port = {DimKind::Intervals, IntervalSet::full(d.port_max())};
    b.dst_ip = {DimKind::Intervals, IntervalSet::full(d.ip_max())};
    b.dst_port = {DimKind::Intervals, IntervalSet::full(d.port_max())};
    b.direction = kDirBoth;
    return of_box(d, std::move(b));
}

HeaderSpace HeaderSpace::of_box(const Domain& d, Box b) {
    HeaderSpace s(d);
    if (!b.has_empty_dim()) s.boxes_.push_back(std::move(b));
    return s;
}

u128 HeaderSpace::count() const {
    u128 n = 0;
    for (const Box& b : boxes_) n += b.count();
    return n;
}

bool HeaderSpace::contains(const PacketKey& k) const {
    for (const Box& b : boxes_) {
        if (b.contains(k)) return true;
    }
    return false;
}

bool HeaderSpace::contains(const PacketHeader& p) const {
    return contains(resolve(p, domain_));
}

HeaderSpace space_of_rule(const Rule& r, const Domain& d) {
    validate_rule(r, d);
    Box b;
    if (r.protocol.any()) {
        b.protocol = {DimKind::Protocols,
                      IntervalSet::full(static_cast<uint32_t>(d.protocols.size() - 1))};
    } else {
        b.protocol = {DimKind::Protocols, IntervalSet::point(*d.protocol_index(*r.protocol.token))};
    }
    b.src_ip = {DimKind::Intervals, IntervalSet::single(r.src_ip.lo, r.src_ip.hi)};
    b.src_port = {DimKind::Intervals, IntervalSet::single(r.src_port.lo, r.src_port.hi)};
    b.dst_ip = {DimKind::Intervals, IntervalSet::single(r.dst_ip.lo, r.dst_ip.hi)};
    b.dst_port = {DimKind::Intervals, IntervalSet::single(r.dst_port.lo, r.dst_port.hi)};
    b.direction = dir_mask(r.direction);
    return HeaderSpace::of_box(d, std::move(b));
}

static void check_domain(const HeaderSpace& a, const HeaderSpace& b) {
    if (!(a.domain() == b.domain()))
        throw DomainMismatch("header spaces belong to different domains");
}

HeaderSpace intersect(const HeaderSpace& a, const HeaderSpace& b) {
    check_domain(a, b);
    HeaderSpace out(a.domain());
    for (const Box& x : a.boxes_) {
        for (const Box& y : b.boxes_) {
            Box z = box_intersect(x, y);
            if (!z.has_empty_dim()) out.boxes_.push_back(std::move(z));
        }
    }
    return out;
}

HeaderSpace subtract(const HeaderSpace& a, const HeaderSpace& b) {
    check_domain(a, b);
    HeaderSpace out(a.domain());
    for (const Box& x : a.boxes_) {
        std::vector<Box> pieces{x};
        for (const Box& y : b.boxes_) {
            std::vector<Box> next;
            for (const Box& p : pieces) {
                auto sub = box_subtract(p, y);
                next.insert(next.end(), std::make_move_iterator(sub.begin()),
                            std::make_move_iterator(sub.end()));
            }
            pieces = std::move(next);
            if (pieces.empty()) break;
        }
        out.boxes_.insert(out.boxes_.end(), std::make_move_iterator(pieces.begin()),
                          std::make_move_iterator(pieces.end()));
    }
    return out;
}

HeaderSpace unite(const HeaderSpace& a, const HeaderSpace& b) {
    check_domain(a, b);
    HeaderSpace out = a;
    HeaderSpace extra = subtract(b, a);
    out.boxes_.insert(out.boxes_.end(), std::make_move_iterator(extra.boxes_.begin()),
                      std::make_move_iterator(extra.boxes_.end()));
    return out;
}

bool space_subset(const HeaderSpace& a, const HeaderSpace& b) {
    return subtract(a, b).is_empty();
}

bool space_equal(const HeaderSpace& a, const HeaderSpace& b) {
    return space_subset(a, b) && space_subset(b, a);
}

// --------------------------------------------------------------------------
// Enumeration
// --------------------------------------------------------------------------

template <typename F>
static void for_values(const IntervalSet& s, F&& f) {
    for (const Interval& iv : s.intervals()) {
        for (uint32_t v = iv.lo;; ++v) {
            f(v);
            if (v == iv.hi) break;  // avoids wraparound at UINT32_MAX
        }
    }
}

void for_each_packet(const HeaderSpace& s,
                     const std::function<void(const PacketHeader&)>& fn, u128 cap) {
    const Domain& d = s.domain();
    if (d.packet_count() > cap)
        throw CapExceeded("domain packet count exceeds enumeration cap");
    PacketHeader p;
    for (const Box& b : s.boxes()) {
        for (DirMask dm : {kDirInput, kDirOutput}) {
            if ((b.direction & dm) == 0) continue;
            p.direction = dm == kDirInput ? Direction::Input : Direction::Output;
            for_values(b.protocol.set, [&](uint32_t proto) {
                p.protocol = d.protocols[proto];
                for_values(b.src_ip.set, [&](uint32_t sip) {
                    p.src_ip = sip;
                    for_values(b.src_port.set, [&](uint32_t spt) {
                        p.src_port = spt;
                        for_values(b.dst_ip.set, [&](uint32_t dip) {
                            p.dst_ip = dip;
                            for_values(b.dst_port.set, [&](uint32_t dpt) {
                                p.dst_port = dpt;
                                fn(p);
                            });
                        });
                    });
                });
            });
        }
    }
}

std::vector<PacketHeader> enumerate_packets(const HeaderSpace& s, u128 cap) {
    std::vector<PacketHeader> out;
    for_each_packet(s, [&](const PacketHeader& p) { out.push_back(p); }, cap);
    return out;
}

// --------------------------------------------------------------------------
// Rendering
// --------------------------------------------------------------------------

static std::string dotted(uint32_t v) {
    std::ostringstream os;
    os << (v >> 24) << '.' << ((v >> 16) & 0xFF) << '.' << ((v >> 8) & 0xFF) << '.'
       << (v & 0xFF);
    return os.str();
}

std::string format_dim(const DimSet& s, const Domain& d, bool ip_dim) {
    if (s.kind == DimKind::Protocols) {
        if (s.set == IntervalSet::full(static_cast<uint32_t>(d.protocols.size() - 1)))
            return "*";
        std::string out;
        for (const Interval& iv : s.set.intervals()) {
            for (uint32_t i = iv.lo;; ++i) {
                if (!out.empty()) out += ',';
                out += d.protocols[i];
                if (i == iv.hi) break;
            }
        }
        return out;
    }
    uint32_t bound = ip_dim ? d.ip_max() : d.port_max();
    if (s.set == IntervalSet::full(bound)) return "*";
    bool dq = ip_dim && d.ip_bits == 32;
    std::string out;
    for (const Interval& iv : s.set.intervals()) {
        if (!out.empty()) out += ',';
        std::string lo = dq ? dotted(iv.lo) : std::to_string(iv.lo);
        if (iv.lo == iv.hi) {
            out += lo;
        } else {
            out += lo + '-' + (dq ? dotted(iv.hi) : std::to_string(iv.hi));
        }
    }
    return out;
}

std::string format_box(const Box& b, const Domain& d) {
    std::ostringstream os;
    os << "dir=" << (b.direction == kDirBoth ? "*" : b.direction == kDirInput ? "INPUT" : "OUTPUT")
       << " proto=" << format_dim(b.protocol, d, false) << " src="
       << format_dim(b.src_ip, d, true) << ':' << format_dim(b.src_port, d, false)
       << " dst=" << format_dim(b.dst_ip, d, true) << ':'
       << format_dim(b.dst_port, d, false);
    return os.str();
}

}  // namespace fwp
