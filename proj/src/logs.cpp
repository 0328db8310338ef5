#include "fwp/logs.hpp"

#include <iomanip>
#include <sstream>

#include "text_util.hpp"

namespace fwp {

using detail::parse_uint;
using detail::split;
using detail::trim;

namespace {

constexpr struct {
    uint8_t bit;
    const char* token;
} kFlags[] = {{kFlagSyn, "SYN"}, {kFlagFin, "FIN"}, {kFlagAck, "ACK"},
              {kFlagRst, "RST"}, {kFlagPsh, "PSH"}, {kFlagUrg, "URG"}};

uint32_t parse_dotted(const std::string& text, const char* key) {
    auto parts = split(text, '.');
    if (parts.size() != 4)
        throw ParseError(std::string("bad IP value for ") + key + ": \"" + text + "\"");
    uint32_t v = 0;
    for (const auto& part : parts) {
        auto octet = parse_uint(part);
        if (!octet || *octet > 255)
            throw ParseError(std::string("bad IP value for ") + key + ": \"" + text + "\"");
        v = (v << 8) | static_cast<uint32_t>(*octet);
    }
    return v;
}

std::string dotted(uint32_t v) {
    std::ostringstream os;
    os << (v >> 24) << '.' << ((v >> 16) & 0xFF) << '.' << ((v >> 8) & 0xFF) << '.'
       << (v & 0xFF);
    return os.str();
}

bool valid_time(const std::string& t) {
    if (t.size() != 8 || t[2] != ':' || t[5] != ':') return false;
    auto two = [&](size_t i) -> int {
        if (!isdigit(static_cast<unsigned char>(t[i])) ||
            !isdigit(static_cast<unsigned char>(t[i + 1])))
            return -1;
        return (t[i] - '0') * 10 + (t[i + 1] - '0');
    };
    int h = two(0), m = two(3), s = two(6);
    return h >= 0 && h < 24 && m >= 0 && m < 60 && s >= 0 && s < 60;
}

// collapse optional whitespace around '=' so "DST = x", "DST= x" and
// "DST =x" all tokenize as one KEY=VALUE token
std::string normalize_assignments(const std::string& line) {
    std::string out;
    out.reserve(line.size());
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '=') {
            while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
            out += '=';
            ++i;
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            continue;
        }
        out += c;
        ++i;
    }
    return out;
}

}  // namespace

std::optional<uint8_t> flag_from_token(std::string_view t) {
    for (const auto& f : kFlags)
        if (t == f.token) return f.bit;
    return std::nullopt;
}

std::vector<std::string> flag_tokens(uint8_t flags) {
    std::vector<std::string> out;
    for (const auto& f : kFlags)
        if (flags & f.bit) out.emplace_back(f.token);
    return out;
}

LogRecord parse_log_line(const std::string& text) {
    std::istringstream is(normalize_assignments(text));
    std::vector<std::string> tokens;
    std::string t;
    while (is >> t) tokens.push_back(t);

    LogRecord r;
    bool have_verdict = false, have_src = false, have_dst = false, have_proto = false;
    bool have_tag = false;

    for (size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];

        if (tok.rfind("Date:", 0) == 0) {
            std::string month = tok.size() > 5 ? tok.substr(5) : "";
            if (month.empty()) {
                if (i + 1 >= tokens.size()) throw ParseError("Date: missing month");
                month = tokens[++i];
            }
            if (i + 1 >= tokens.size()) throw ParseError("Date: missing day");
            auto day = parse_uint(tokens[++i]);
            if (!day || *day < 1 || *day > 31)
                throw ParseError("bad numeric field: day \"" + tokens[i] + "\"");
            r.month = month;
            r.day = static_cast<int>(*day);
            continue;
        }
        if (tok.rfind("Time:", 0) == 0) {
            std::string v = tok.size() > 5 ? tok.substr(5) : "";
            if (v.empty()) {
                if (i + 1 >= tokens.size()) throw ParseError("Time: missing value");
                v = tokens[++i];
            }
            if (!valid_time(v)) throw ParseError("bad time field \"" + v + "\"");
            r.time = v;
            continue;
        }

        if (auto eq = tok.find('='); eq != std::string::npos) {
            std::string key = tok.substr(0, eq);
            std::string value = tok.substr(eq + 1);
            if (key == "IN") {
                r.in_iface = value;
            } else if (key == "SRC") {
                r.src_ip = parse_dotted(value, "SRC");
                have_src = true;
            } else if (key == "DST") {
                r.dst_ip = parse_dotted(value, "DST");
                have_dst = true;
            } else if (key == "PROTO") {
                if (value.empty()) throw ParseError("empty PROTO value");
                r.protocol = value;
                have_proto = true;
            } else if (key == "SPT" || key == "DPT") {
                auto port = parse_uint(value);
                if (!port || *port > 0xFFFF)
                    throw ParseError("bad numeric field: " + key + "=\"" + value + "\"");
                (key == "SPT" ? r.spt : r.dpt) = static_cast<uint32_t>(*port);
            }
            // other keys (LEN=, TTL=, OUT=, ...) are tolerated and ignored
            continue;
        }

        if (!have_verdict) {
            auto v = action_from_token(tok);
            if (!v) throw ParseError("unparseable verdict \"" + tok + "\"");
            r.verdict = *v;
            have_verdict = true;
            continue;
        }
        if (auto flag = flag_from_token(tok)) {
            r.flags |= *flag;
            continue;
        }
        if (!have_tag && r.flags == 0) {
            r.tag = tok;
            have_tag = true;
            continue;
        }
        throw ParseError("unexpected token \"" + tok + "\"");
    }

    if (!have_verdict) throw ParseError("missing verdict");
    if (!have_src) throw ParseError("missing required key SRC");
    if (!have_dst) throw ParseError("missing required key DST");
    if (!have_proto) throw ParseError("missing required key PROTO");
    return r;
}

std::string to_line(const LogRecord& r) {
    std::ostringstream os;
    if (!r.month.empty()) os << "Date: " << r.month << ' ' << r.day << ' ';
    if (!r.time.empty()) os << "Time:" << r.time << ' ';
    os << to_token(r.verdict);
    if (!r.tag.empty()) os << ' ' << r.tag;
    if (!r.in_iface.empty()) os << " IN=" << r.in_iface;
    os << " SRC=" << dotted(r.src_ip) << " DST=" << dotted(r.dst_ip)
       << " PROTO=" << r.protocol << " SPT=" << r.spt << " DPT=" << r.dpt;
    for (const auto& f : flag_tokens(r.flags)) os << ' ' << f;
    return os.str();
}

std::vector<LogRecord> parse_log(const std::string& text) {
    std::vector<LogRecord> out;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        try {
            out.push_back(parse_log_line(t));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

SignificantRecord extract_significant(const LogRecord& r) {
    return {r.src_ip, r.spt, r.protocol, r.dst_ip, r.dpt};
}

TrafficStats traffic_stats(const std::vector<LogRecord>& records) {
    TrafficStats s;
    for (const LogRecord& r : records) {
        ++s.per_protocol_counts[r.protocol];
        ++s.verdict_counts[std::string(to_token(r.verdict))];
        for (const auto& f : flag_tokens(r.flags)) ++s.flag_counts[f];
    }
    if (!records.empty()) {
        double total = static_cast<double>(records.size());
        for (const auto& [proto, count] : s.per_protocol_counts)
            s.per_protocol_percent[proto] = 100.0 * static_cast<double>(count) / total;
    }
    return s;
}

namespace {

std::string percent(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

}  // namespace

std::string traffic_stats_text(const TrafficStats& s) {
    std::ostringstream os;
    os << "protocol counts:\n";
    for (const auto& [k, v] : s.per_protocol_counts)
        os << "  " << k << ": " << v << " (" << percent(s.per_protocol_percent.at(k))
           << "%)\n";
    os << "flags:\n";
    for (const auto& [k, v] : s.flag_counts) os << "  " << k << ": " << v << "\n";
    os << "verdicts:\n";
    for (const auto& [k, v] : s.verdict_counts) os << "  " << k << ": " << v << "\n";
    return os.str();
}

std::string traffic_stats_csv(const TrafficStats& s) {
    std::ostringstream os;
    os << "section,key,value\n";
    for (const auto& [k, v] : s.per_protocol_counts) os << "protocol_count," << k << ',' << v << "\n";
    for (const auto& [k, v] : s.per_protocol_percent)
        os << "protocol_percent," << k << ',' << percent(v) << "\n";
    for (const auto& [k, v] : s.flag_counts) os << "flag," << k << ',' << v << "\n";
    for (const auto& [k, v] : s.verdict_counts) os << "verdict," << k << ',' << v << "\n";
    return os.str();
}

PacketHeader to_packet(const LogRecord& r, std::optional<Direction> forced) {
    PacketHeader p;
    p.protocol = r.protocol;
    p.direction = forced ? *forced
                         : (r.in_iface.empty() ? Direction::Output : Direction::Input);
    p.src_ip = r.src_ip;
    p.dst_ip = r.dst_ip;
    if (r.protocol == "ICMP") {
        p.src_port = 0;
        p.dst_port = 0;
    } else {
        p.src_port = r.spt;
        p.dst_port = r.dpt;
    }
    return p;
}

std::vector<ReplayMismatch> replay(const std::vector<LogRecord>& records,
                                   const Policy& policy, std::optional<Direction> forced) {
    std::vector<ReplayMismatch> out;
    PortionList plist = partition(policy);
    for (std::size_t i = 0; i < records.size(); ++i) {
        PacketHeader packet = to_packet(records[i], forced);
        Decision d;
        try {
            d = portion_decision(plist, packet);
        } catch (const DomainMismatch& e) {
            out.push_back({i, ReplayMismatch::Kind::OutOfDomain, records[i].verdict,
                           std::nullopt, std::nullopt, e.what()});
            continue;
        }
        // DENY and DROP both count as non-permit here
        if (is_permit(records[i].verdict) != is_permit(d.action)) {
            out.push_back({i, ReplayMismatch::Kind::Verdict, records[i].verdict, d.action,
                           d.rule,
                           "logged " + std::string(to_token(records[i].verdict)) +
                               ", policy says " + std::string(to_token(d.action))});
        }
    }
    return out;
}

std::string replay_report_text(const std::vector<ReplayMismatch>& mismatches) {
    std::ostringstream os;
    os << mismatches.size() << " mismatches\n";
    for (const auto& m : mismatches) {
        os << "  record " << (m.record_index + 1) << ": ";
        if (m.kind == ReplayMismatch::Kind::OutOfDomain)
            os << "out of domain (" << m.detail << ")";
        else {
            os << m.detail;
            if (m.rule)
                os << " (rule " << *m.rule << ")";
            else
                os << " (default)";
        }
        os << "\n";
    }
    return os.str();
}

std::string replay_report_csv(const std::vector<ReplayMismatch>& mismatches) {
    std::ostringstream os;
    os << "record,kind,logged,decided,rule\n";
    for (const auto& m : mismatches) {
        os << (m.record_index + 1) << ','
           << (m.kind == ReplayMismatch::Kind::OutOfDomain ? "out_of_domain" : "verdict")
           << ',' << to_token(m.logged) << ',' << (m.decided ? to_token(*m.decided) : "-")
           << ',' << (m.rule ? std::to_string(*m.rule) : "-") << "\n";
    }
    return os.str();
}

}  // namespace fwp
