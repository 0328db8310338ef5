#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwp/space.hpp"

namespace fwp {

// A maximal region of header space whose packets all match exactly the same
// set of rules. r_in holds the rules whose space fully contains the region,
// r_out the rules disjoint from it; r_eff is r_in in ascending priority
// order, and the head of r_eff (or the policy default) decides the action.
struct Portion {
    HeaderSpace addsp;
    std::vector<int> r_in;   // sorted ascending
    std::vector<int> r_out;  // sorted ascending
    std::vector<int> r_eff;  // == r_in, priority order
    Action action = Action::Deny;
};

struct PortionList {
    std::vector<Portion> portions;
    Policy policy;
};

// Action a rule set resolves to: head of r_eff, or the default when empty.
Action resolve_action(const Policy& policy, const std::vector<int>& r_eff);

// Appends a portion unless addsp is empty (empty regions are silently
// skipped so no unfilled portion is ever constructed).
PortionList add_portion(PortionList list, HeaderSpace addsp, std::vector<int> r_in,
                        std::vector<int> r_out, std::vector<int> r_eff);

// Splits the full domain into disjoint portions by folding the rules in
// priority order. For each rule r and each existing portion G:
//   - no overlap: r joins G.r_out;
//   - G inside r's space: r joins G.r_in / G.r_eff;
//   - partial overlap: G is replaced by the contained part (gains r in r_in)
//     and the remainder (gains r in r_out).
// Output is deterministic for identical input.
PortionList partition(const Policy& policy);

std::size_t locate_portion_index(const PortionList& plist, const PacketHeader& packet);
const Portion& locate_portion(const PortionList& plist, const PacketHeader& packet);

struct Decision {
    Action action = Action::Deny;
    std::optional<int> rule;  // nullopt: default action applied

    bool operator==(const Decision&) const = default;
};

Decision portion_decision(const PortionList& plist, const PacketHeader& packet);

// Structural integrity checks: pairwise disjointness, full coverage (by
// exact counting), r_in/r_out complementarity, r_eff ordering, action
// resolution, and the 2^n portion bound. No packet enumeration.
struct PartitionCheck {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

PartitionCheck verify_partition(const PortionList& plist);

struct PortionStats {
    int rule_count = 0;
    std::size_t portion_count = 0;
    std::map<int, std::size_t> portions_per_rule;  // every rule index present
    std::size_t default_portion_count = 0;
};

PortionStats portion_stats(const PortionList& plist);

// Reports: one row per portion (id, box description, r_in, effective rule,
// action), plus a stats block.
std::string portion_report_text(const PortionList& plist);
std::string portion_report_csv(const PortionList& plist);
std::string portion_stats_text(const PortionStats& s);
std::string portion_stats_csv(const PortionStats& s);

}  // namespace fwp
