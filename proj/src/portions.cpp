#include "fwp/portions.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace fwp {

Action resolve_action(const Policy& policy, const std::vector<int>& r_eff) {
    if (r_eff.empty()) return policy.default_action;
    return policy.rule(r_eff.front()).action;
}

PortionList add_portion(PortionList list, HeaderSpace addsp, std::vector<int> r_in,
                        std::vector<int> r_out, std::vector<int> r_eff) {
    if (addsp.is_empty()) return list;  // guard: never store an unfilled portion
    Action action = resolve_action(list.policy, r_eff);
    list.portions.push_back(Portion{std::move(addsp), std::move(r_in), std::move(r_out),
                                    std::move(r_eff), action});
    return list;
}

PortionList partition(const Policy& policy) {
    policy.validate();
    PortionList list{{}, policy};
    list.portions.push_back(
        Portion{HeaderSpace::full(policy.domain), {}, {}, {}, policy.default_action});

    for (const Rule& rule : policy.rules) {
        HeaderSpace rule_space = space_of_rule(rule, policy.domain);
        std::vector<Portion> next;
        next.reserve(list.portions.size());
        for (Portion& g : list.portions) {
            HeaderSpace inc = intersect(g.addsp, rule_space);
            if (inc.is_empty()) {
                g.r_out.push_back(rule.index);
                next.push_back(std::move(g));
                continue;
            }
            // inc is a subset of g by construction, so equal counts mean the
            // portion lies fully inside the rule's space
            if (inc.count() == g.addsp.count()) {
                g.r_in.push_back(rule.index);
                g.r_eff.push_back(rule.index);
                next.push_back(std::move(g));
                continue;
            }
            HeaderSpace exc = subtract(g.addsp, rule_space);
            Portion inside{std::move(inc), g.r_in, g.r_out, g.r_eff, g.action};
            inside.r_in.push_back(rule.index);
            inside.r_eff.push_back(rule.index);
            Portion outside{std::move(exc), std::move(g.r_in), std::move(g.r_out),
                            std::move(g.r_eff), g.action};
            outside.r_out.push_back(rule.index);
            next.push_back(std::move(inside));
            next.push_back(std::move(outside));
        }
        list.portions = std::move(next);
    }

    for (Portion& p : list.portions) p.action = resolve_action(policy, p.r_eff);
    return list;
}

std::size_t locate_portion_index(const PortionList& plist, const PacketHeader& packet) {
    PacketKey key = resolve(packet, plist.policy.domain);
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < plist.portions.size(); ++i) {
        if (plist.portions[i].addsp.contains(key)) {
            if (found)
                throw std::logic_error("partition violated: packet inside portions " +
                                       std::to_string(*found + 1) + " and " +
                                       std::to_string(i + 1));
            found = i;
        }
    }
    if (!found) throw std::logic_error("partition violated: packet inside no portion");
    return *found;
}

const Portion& locate_portion(const PortionList& plist, const PacketHeader& packet) {
    return plist.portions[locate_portion_index(plist, packet)];
}

Decision portion_decision(const PortionList& plist, const PacketHeader& packet) {
    const Portion& p = locate_portion(plist, packet);
    if (p.r_eff.empty()) return {p.action, std::nullopt};
    return {p.action, p.r_eff.front()};
}

namespace {

bool sorted_unique(const std::vector<int>& v) {
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] >= v[i]) return false;
    return true;
}

}  // namespace

PartitionCheck verify_partition(const PortionList& plist) {
    PartitionCheck check;
    auto flag = [&](std::string msg) {
        if (check.violations.size() < 50) check.violations.push_back(std::move(msg));
    };

    const Policy& policy = plist.policy;
    const int n = policy.size();
    try {
        policy.validate();
    } catch (const std::invalid_argument& e) {
        flag(std::string("policy: ") + e.what());
        return check;
    }

    for (std::size_t i = 0; i < plist.portions.size(); ++i) {
        const Portion& p = plist.portions[i];
        const std::string id = "portion " + std::to_string(i + 1);
        if (p.addsp.is_empty()) flag(id + ": empty address space stored");
        for (const Box& b : p.addsp.boxes()) {
            if (b.has_empty_dim()) flag(id + ": box with an empty dimension");
        }
        if (!(p.addsp.domain() == policy.domain)) flag(id + ": domain mismatch");

        if (!sorted_unique(p.r_in)) flag(id + ": r_in not sorted/unique");
        if (!sorted_unique(p.r_out)) flag(id + ": r_out not sorted/unique");
        if (p.r_eff != p.r_in) flag(id + ": r_eff differs from r_in in priority order");

        // r_in and r_out must partition {1..n}
        std::vector<int> merged;
        merged.reserve(p.r_in.size() + p.r_out.size());
        std::merge(p.r_in.begin(), p.r_in.end(), p.r_out.begin(), p.r_out.end(),
                   std::back_inserter(merged));
        bool complete = static_cast<int>(merged.size()) == n;
        if (complete) {
            for (int k = 0; k < n; ++k)
                if (merged[static_cast<size_t>(k)] != k + 1) complete = false;
        }
        if (!complete) flag(id + ": r_in and r_out do not partition rule set 1.." +
                            std::to_string(n));

        if (p.action != resolve_action(policy, p.r_eff))
            flag(id + ": action does not match head of r_eff / default");
    }

    // pairwise disjointness
    for (std::size_t i = 0; i < plist.portions.size(); ++i) {
        for (std::size_t j = i + 1; j < plist.portions.size(); ++j) {
            bool overlap = false;
            for (const Box& a : plist.portions[i].addsp.boxes()) {
                for (const Box& b : plist.portions[j].addsp.boxes()) {
                    if (!box_disjoint(a, b)) {
                        overlap = true;
                        break;
                    }
                }
                if (overlap) break;
            }
            if (overlap)
                flag("portions " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                     " overlap");
        }
    }

    // disjointness + exact total count == full coverage, with no enumeration
    u128 total = 0;
    for (const Portion& p : plist.portions) total += p.addsp.count();
    u128 expect = policy.domain.packet_count();
    if (total != expect)
        flag("coverage: portion sizes sum to " + u128_to_string(total) + ", domain holds " +
             u128_to_string(expect));

    if (n < 120) {
        u128 bound = u128{1} << n;
        if (u128{plist.portions.size()} > bound)
            flag("portion count " + std::to_string(plist.portions.size()) +
                 " exceeds 2^n bound " + u128_to_string(bound));
    }

    return check;
}

PortionStats portion_stats(const PortionList& plist) {
    PortionStats s;
    s.rule_count = plist.policy.size();
    s.portion_count = plist.portions.size();
    for (int i = 1; i <= s.rule_count; ++i) s.portions_per_rule[i] = 0;
    for (const Portion& p : plist.portions) {
        if (p.r_eff.empty()) ++s.default_portion_count;
        for (int r : p.r_in) ++s.portions_per_rule[r];
    }
    return s;
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

std::string boxes_text(const HeaderSpace& s) {
    std::string out;
    for (const Box& b : s.boxes()) {
        if (!out.empty()) out += " | ";
        out += format_box(b, s.domain());
    }
    return out;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string portion_report_text(const PortionList& plist) {
    std::ostringstream os;
    os << "portions: " << plist.portions.size() << " (policy of " << plist.policy.size()
       << " rules, default " << to_token(plist.policy.default_action) << ")\n";
    for (std::size_t i = 0; i < plist.portions.size(); ++i) {
        const Portion& p = plist.portions[i];
        os << std::setw(4) << (i + 1) << "  " << std::setw(6) << to_token(p.action) << "  eff="
           << (p.r_eff.empty() ? "-" : std::to_string(p.r_eff.front())) << "  r_in=["
           << join(p.r_in) << "]\n";
        for (const Box& b : p.addsp.boxes())
            os << "      " << format_box(b, plist.policy.domain) << "\n";
    }
    return os.str();
}

std::string portion_report_csv(const PortionList& plist) {
    std::ostringstream os;
    os << "portion,action,eff_rule,r_in,boxes\n";
    for (std::size_t i = 0; i < plist.portions.size(); ++i) {
        const Portion& p = plist.portions[i];
        os << (i + 1) << ',' << to_token(p.action) << ','
           << (p.r_eff.empty() ? "-" : std::to_string(p.r_eff.front())) << ','
           << csv_quote(join(p.r_in)) << ',' << csv_quote(boxes_text(p.addsp)) << "\n";
    }
    return os.str();
}

std::string portion_stats_text(const PortionStats& s) {
    std::ostringstream os;
    os << "rules: " << s.rule_count << "\n"
       << "portions: " << s.portion_count << "\n"
       << "default portions: " << s.default_portion_count << "\n";
    if (!s.portions_per_rule.empty()) {
        os << "portions per rule:\n";
        for (const auto& [rule, count] : s.portions_per_rule)
            os << "  " << rule << ": " << count << "\n";
    }
    return os.str();
}

std::string portion_stats_csv(const PortionStats& s) {
    std::ostringstream os;
    os << "key,value\n"
       << "rules," << s.rule_count << "\n"
       << "portions," << s.portion_count << "\n"
       << "default_portions," << s.default_portion_count << "\n";
    for (const auto& [rule, count] : s.portions_per_rule)
        os << "rule_" << rule << "_portions," << count << "\n";
    return os.str();
}

}  // namespace fwp
