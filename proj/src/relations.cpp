#include "fwp/relations.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace fwp {

std::string_view to_token(RelationClass c) {
    switch (c) {
        case RelationClass::CompletelyMatched: return "COMPLETELY_MATCHED";
        case RelationClass::AlmostMatch: return "ALMOST_MATCH";
        case RelationClass::Interrelated: return "INTERRELATED";
        case RelationClass::IncompletelyMatch: return "INCOMPLETELY_MATCH";
        case RelationClass::CompletelyDisjoint: return "COMPLETELY_DISJOINT";
    }
    return "?";
}

std::string to_string(const FieldRelations& f) {
    std::ostringstream os;
    os << "proto=" << to_token(f.protocol) << " dir=" << to_token(f.direction)
       << " src_ip=" << to_token(f.src_ip) << " src_port=" << to_token(f.src_port)
       << " dst_ip=" << to_token(f.dst_ip) << " dst_port=" << to_token(f.dst_port);
    return os.str();
}

RelationClass classify_fields(const FieldRelations& f) {
    const FieldRelation all[] = {f.protocol, f.direction, f.src_ip,
                                 f.src_port, f.dst_ip,    f.dst_port};
    bool any_disjoint = false, any_partial = false, any_subset = false,
         any_superset = false, all_equal = true;
    for (FieldRelation r : all) {
        any_disjoint |= r == FieldRelation::Disjoint;
        any_partial |= r == FieldRelation::Partial;
        any_subset |= r == FieldRelation::Subset;
        any_superset |= r == FieldRelation::Superset;
        all_equal &= r == FieldRelation::Equal;
    }
    if (any_disjoint) return RelationClass::CompletelyDisjoint;
    if (all_equal) return RelationClass::CompletelyMatched;
    if (any_partial) return RelationClass::IncompletelyMatch;
    if (any_subset && any_superset) return RelationClass::Interrelated;
    return RelationClass::AlmostMatch;
}

PairClassification classify_pair(const Rule& m, const Rule& n, const Domain& domain) {
    validate_rule(m, domain);
    validate_rule(n, domain);

    auto proto_set = [&](const ProtoPattern& p) -> DimSet {
        auto bound = static_cast<uint32_t>(domain.protocols.size() - 1);
        if (p.any()) return {DimKind::Protocols, IntervalSet::full(bound)};
        return {DimKind::Protocols, IntervalSet::point(*domain.protocol_index(*p.token))};
    };
    auto span_set = [](const ValueSpan& s) -> DimSet {
        return {DimKind::Intervals, IntervalSet::single(s.lo, s.hi)};
    };

    FieldRelations f;
    f.protocol = field_relation(proto_set(m.protocol), proto_set(n.protocol));
    f.direction = m.direction == n.direction ? FieldRelation::Equal : FieldRelation::Disjoint;
    f.src_ip = field_relation(span_set(m.src_ip), span_set(n.src_ip));
    f.src_port = field_relation(span_set(m.src_port), span_set(n.src_port));
    f.dst_ip = field_relation(span_set(m.dst_ip), span_set(n.dst_ip));
    f.dst_port = field_relation(span_set(m.dst_port), span_set(n.dst_port));
    return {classify_fields(f), f};
}

namespace {

Policy without_rule(const Policy& p, int index) {
    Policy q = p;
    q.rules.erase(q.rules.begin() + (index - 1));
    q.renumber();
    return q;
}

// Shared walk over the refinement of two partitions: invokes fn for every
// pair of portions with differing actions, stopping early if fn returns true.
bool walk_differing_regions(const Policy& a, const Policy& b,
                            const std::function<bool(const HeaderSpace&)>& fn) {
    if (!(a.domain == b.domain))
        throw DomainMismatch("semantic comparison across different domains");
    PortionList pa = partition(a);
    PortionList pb = partition(b);
    for (const Portion& x : pa.portions) {
        for (const Portion& y : pb.portions) {
            if (x.action == y.action) continue;
            HeaderSpace overlap = intersect(x.addsp, y.addsp);
            if (!overlap.is_empty() && fn(overlap)) return true;
        }
    }
    return false;
}

}  // namespace

bool semantic_equal(const Policy& a, const Policy& b) {
    return !walk_differing_regions(a, b, [](const HeaderSpace&) { return true; });
}

u128 decision_delta(const Policy& a, const Policy& b) {
    u128 delta = 0;
    walk_differing_regions(a, b, [&](const HeaderSpace& region) {
        delta += region.count();
        return false;
    });
    return delta;
}

AnomalyReport detect_anomalies(const Policy& policy) {
    AnomalyReport report;
    PortionList plist = partition(policy);
    const int n = policy.size();

    std::vector<bool> wins(static_cast<size_t>(n) + 1, false);
    for (const Portion& p : plist.portions) {
        if (!p.r_eff.empty()) wins[static_cast<size_t>(p.r_eff.front())] = true;
    }

    for (int j = 1; j <= n; ++j) {
        if (wins[static_cast<size_t>(j)]) continue;
        report.inactive.push_back(j);
        // every portion containing j is decided by an earlier rule
        std::vector<int>& cover = report.witnesses[j];
        bool differs = false;
        for (const Portion& p : plist.portions) {
            if (!std::binary_search(p.r_in.begin(), p.r_in.end(), j)) continue;
            int winner = p.r_eff.front();
            if (cover.empty() || cover.back() != winner) cover.push_back(winner);
            if (policy.rule(winner).action != policy.rule(j).action) differs = true;
        }
        std::sort(cover.begin(), cover.end());
        cover.erase(std::unique(cover.begin(), cover.end()), cover.end());
        if (differs) report.shadowed.push_back(j);
    }

    for (int j = 1; j <= n; ++j) {
        if (semantic_equal(policy, without_rule(policy, j))) report.redundant.push_back(j);
    }

    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            auto c = classify_pair(policy.rule(i), policy.rule(j), policy.domain);
            if (c.cls == RelationClass::Interrelated)
                report.interrelated_pairs.push_back({i, j, c.fields});
        }
    }
    return report;
}

namespace {

std::string join(const std::vector<int>& v) {
    std::string out;
    for (int x : v) {
        if (!out.empty()) out += ' ';
        out += std::to_string(x);
    }
    return out;
}

}  // namespace

std::string anomaly_report_text(const AnomalyReport& r) {
    std::ostringstream os;
    os << "inactive: " << (r.inactive.empty() ? "none" : join(r.inactive)) << "\n";
    os << "shadowed: " << (r.shadowed.empty() ? "none" : join(r.shadowed)) << "\n";
    os << "redundant: " << (r.redundant.empty() ? "none" : join(r.redundant)) << "\n";
    for (const auto& [rule, cover] : r.witnesses)
        os << "  rule " << rule << " covered by: " << join(cover) << "\n";
    os << "interrelated pairs: " << r.interrelated_pairs.size() << "\n";
    for (const auto& p : r.interrelated_pairs)
        os << "  (" << p.m << "," << p.n << "): " << to_string(p.fields) << "\n";
    return os.str();
}

std::string anomaly_report_csv(const AnomalyReport& r) {
    std::ostringstream os;
    os << "rule,anomaly,witnesses\n";
    auto witnesses = [&](int rule) {
        auto it = r.witnesses.find(rule);
        return it == r.witnesses.end() ? std::string() : join(it->second);
    };
    for (int j : r.inactive) os << j << ",inactive,\"" << witnesses(j) << "\"\n";
    for (int j : r.shadowed) os << j << ",shadowed,\"" << witnesses(j) << "\"\n";
    for (int j : r.redundant) os << j << ",redundant,\"\"\n";
    for (const auto& p : r.interrelated_pairs)
        os << p.m << ",interrelated,\"" << p.n << "\"\n";
    return os.str();
}

}  // namespace fwp
