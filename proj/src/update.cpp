#include "fwp/update.hpp"

#include <sstream>

namespace fwp {

namespace {

std::vector<Rule> renumbered(std::vector<Rule> rules) {
    int i = 1;
    for (Rule& r : rules) r.index = i++;
    return rules;
}

}  // namespace

std::vector<RelationFinding> relation_report(const Policy& old_policy,
                                             const std::vector<Rule>& new_rules) {
    std::vector<RelationFinding> findings;
    int new_index = 0;
    for (const Rule& incoming : new_rules) {
        ++new_index;
        for (const Rule& existing : old_policy.rules) {
            auto c = classify_pair(existing, incoming, old_policy.domain);
            if (c.cls == RelationClass::CompletelyDisjoint) continue;
            findings.push_back({existing.index, new_index, c.cls, c.fields});
        }
    }
    return findings;
}

UpdateResult update_policy(const Policy& old_policy, const std::vector<Rule>& new_rules) {
    old_policy.validate();
    for (const Rule& r : new_rules) validate_rule(r, old_policy.domain);

    UpdateResult result;
    UpdateReport& report = result.report;

    std::vector<Rule> incoming = renumbered(new_rules);
    std::vector<Rule> kept;
    kept.reserve(incoming.size() + old_policy.rules.size());
    kept.insert(kept.end(), incoming.begin(), incoming.end());

    for (const Rule& existing : old_policy.rules) {
        bool dropped = false;
        for (const Rule& fresh : incoming) {
            if (existing.same_match_tuple(fresh)) {
                report.removed_duplicates.emplace_back(existing.index, fresh.index);
                dropped = true;
                break;
            }
        }
        if (!dropped) kept.push_back(existing);
    }

    result.policy.rules = renumbered(std::move(kept));
    result.policy.default_action = old_policy.default_action;
    result.policy.domain = old_policy.domain;

    report.relation_findings = relation_report(old_policy, incoming);
    report.resulting_rule_count = result.policy.size();
    report.semantic_delta = decision_delta(old_policy, result.policy);
    return result;
}

UpdateResult update_policy(const Policy& old_policy, const Policy& incoming) {
    if (!(old_policy.domain == incoming.domain))
        throw DomainMismatch("update: policies are defined over different domains");
    if (old_policy.default_action != incoming.default_action)
        throw DomainMismatch("update: policies disagree on the default action");
    return update_policy(old_policy, incoming.rules);
}

std::string update_report_text(const UpdateReport& r) {
    std::ostringstream os;
    os << "resulting rules: " << r.resulting_rule_count << "\n";
    os << "removed duplicates: " << r.removed_duplicates.size() << "\n";
    for (const auto& [old_idx, new_idx] : r.removed_duplicates)
        os << "  old rule " << old_idx << " superseded by incoming rule " << new_idx << "\n";
    os << "relation findings: " << r.relation_findings.size() << "\n";
    for (const auto& f : r.relation_findings)
        os << "  old " << f.old_index << " vs incoming " << f.new_index << ": "
           << to_token(f.cls) << " (" << to_string(f.fields) << ")\n";
    if (r.semantic_delta)
        os << "decision changes: " << u128_to_string(*r.semantic_delta) << " packets\n";
    else
        os << "decision changes: UNKNOWN\n";
    return os.str();
}

std::string update_report_csv(const UpdateReport& r) {
    std::ostringstream os;
    os << "kind,old_rule,new_rule,detail\n";
    for (const auto& [old_idx, new_idx] : r.removed_duplicates)
        os << "removed_duplicate," << old_idx << ',' << new_idx << ",\"\"\n";
    for (const auto& f : r.relation_findings)
        os << "relation," << f.old_index << ',' << f.new_index << ",\"" << to_token(f.cls)
           << "\"\n";
    os << "resulting_rules,,," << r.resulting_rule_count << "\n";
    os << "decision_changes,,,"
       << (r.semantic_delta ? u128_to_string(*r.semantic_delta) : "UNKNOWN") << "\n";
    return os.str();
}

}  // namespace fwp
