#pragma once

#include <map>
#include <string>
#include <vector>

#include "fwp/portions.hpp"
#include "fwp/space.hpp"

namespace fwp {

enum class RelationClass {
    CompletelyMatched,
    AlmostMatch,
    Interrelated,
    IncompletelyMatch,
    CompletelyDisjoint,
};

std::string_view to_token(RelationClass c);

// Per-field relation of a rule pair over the five match fields plus direction.
struct FieldRelations {
    FieldRelation protocol = FieldRelation::Equal;
    FieldRelation direction = FieldRelation::Equal;
    FieldRelation src_ip = FieldRelation::Equal;
    FieldRelation src_port = FieldRelation::Equal;
    FieldRelation dst_ip = FieldRelation::Equal;
    FieldRelation dst_port = FieldRelation::Equal;

    bool operator==(const FieldRelations&) const = default;
};

std::string to_string(const FieldRelations& f);

// Derives the class from per-field relations:
//   any DISJOINT -> COMPLETELY_DISJOINT; all EQUAL -> COMPLETELY_MATCHED;
//   any PARTIAL  -> INCOMPLETELY_MATCH; subsets in one direction only ->
//   ALMOST_MATCH; proper subsets both ways across fields -> INTERRELATED.
RelationClass classify_fields(const FieldRelations& f);

struct PairClassification {
    RelationClass cls = RelationClass::CompletelyMatched;
    FieldRelations fields;
};

// Actions are not compared; the relation is about the match tuples only.
PairClassification classify_pair(const Rule& m, const Rule& n, const Domain& domain);

struct InterrelatedPair {
    int m = 0;
    int n = 0;
    FieldRelations fields;
};

struct AnomalyReport {
    // rules that decide no portion (never the first match)
    std::vector<int> inactive;
    // inactive rules where some covering winner differs in action
    std::vector<int> shadowed;
    // rules whose removal leaves the decision function unchanged
    std::vector<int> redundant;
    std::vector<InterrelatedPair> interrelated_pairs;
    // inactive rule -> the winning rules that cover it
    std::map<int, std::vector<int>> witnesses;

    bool clean() const {
        return inactive.empty() && shadowed.empty() && redundant.empty() &&
               interrelated_pairs.empty();
    }
};

AnomalyReport detect_anomalies(const Policy& policy);

// True iff every packet receives the same action under both policies (DENY
// and DROP distinct). Compared portion-wise, exact on any domain size.
bool semantic_equal(const Policy& a, const Policy& b);

// Number of packets whose action differs between the two policies.
u128 decision_delta(const Policy& a, const Policy& b);

std::string anomaly_report_text(const AnomalyReport& r);
std::string anomaly_report_csv(const AnomalyReport& r);

}  // namespace fwp
