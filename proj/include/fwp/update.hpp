#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fwp/relations.hpp"

namespace fwp {

struct RelationFinding {
    int old_index = 0;  // original numbering of the existing policy
    int new_index = 0;  // position in the incoming rule list (1-based)
    RelationClass cls = RelationClass::CompletelyMatched;
    FieldRelations fields;
};

struct UpdateReport {
    // (old rule index, incoming rule index) for every old rule dropped
    // because an incoming rule carries the identical match tuple
    std::vector<std::pair<int, int>> removed_duplicates;
    // every non-disjoint (old, incoming) pair, for review before applying
    std::vector<RelationFinding> relation_findings;
    int resulting_rule_count = 0;
    // packets whose decision changed; computed exactly on any domain
    std::optional<u128> semantic_delta;
};

struct UpdateResult {
    Policy policy;
    UpdateReport report;
};

// Prepends the incoming rules to the existing policy ("new rules first"),
// drops old rules whose match tuple an incoming rule repeats (the incoming
// action supersedes), renumbers densely, and reports relations and the exact
// decision delta.
UpdateResult update_policy(const Policy& old_policy, const std::vector<Rule>& new_rules);

// Same, validating that both policies share domain and default action.
UpdateResult update_policy(const Policy& old_policy, const Policy& incoming);

// The review report alone: all pairs whose class is not COMPLETELY_DISJOINT.
std::vector<RelationFinding> relation_report(const Policy& old_policy,
                                             const std::vector<Rule>& new_rules);

std::string update_report_text(const UpdateReport& r);
std::string update_report_csv(const UpdateReport& r);

}  // namespace fwp
