#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwp/portions.hpp"

namespace fwp {

// TCP flag bits in canonical output order.
enum TcpFlag : uint8_t {
    kFlagSyn = 1 << 0,
    kFlagFin = 1 << 1,
    kFlagAck = 1 << 2,
    kFlagRst = 1 << 3,
    kFlagPsh = 1 << 4,
    kFlagUrg = 1 << 5,
};

std::optional<uint8_t> flag_from_token(std::string_view t);
std::vector<std::string> flag_tokens(uint8_t flags);

// One parsed firewall log line:
//   Date: <Mon> <D> Time:<hh:mm:ss> <VERDICT> <tag> IN=<iface> SRC=<ip>
//   DST=<ip> PROTO=<proto> SPT=<port> DPT=<port> [flags...]
// Whitespace around '=' is tolerated; unknown KEY=VALUE fields are ignored.
struct LogRecord {
    std::string month;  // empty when the line carries no date
    int day = 0;
    std::string time;  // "hh:mm:ss", empty when absent
    Action verdict = Action::Deny;
    std::string tag;
    std::string in_iface;  // empty when absent (outbound records)
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;
    std::string protocol;
    uint32_t spt = 0;
    uint32_t dpt = 0;
    uint8_t flags = 0;

    bool operator==(const LogRecord&) const = default;
};

// Requires SRC, DST and PROTO keys and a verdict; ports default to 0.
LogRecord parse_log_line(const std::string& text);

// Canonical single-line form; parse_log_line(to_line(r)) == r and the text
// is stable under re-serialization.
std::string to_line(const LogRecord& r);

// Whole file: blank lines and '#' comments skipped, errors name the line.
std::vector<LogRecord> parse_log(const std::string& text);

// The fields worth keeping from each record: who sent what where.
struct SignificantRecord {
    uint32_t src_ip = 0;
    uint32_t spt = 0;
    std::string protocol;
    uint32_t dst_ip = 0;
    uint32_t dpt = 0;

    bool operator==(const SignificantRecord&) const = default;
};

SignificantRecord extract_significant(const LogRecord& r);

struct TrafficStats {
    std::map<std::string, std::size_t> per_protocol_counts;
    std::map<std::string, double> per_protocol_percent;
    std::map<std::string, std::size_t> flag_counts;
    std::map<std::string, std::size_t> verdict_counts;
};

TrafficStats traffic_stats(const std::vector<LogRecord>& records);

std::string traffic_stats_text(const TrafficStats& s);
std::string traffic_stats_csv(const TrafficStats& s);

// Converts a record to a packet: direction INPUT when IN= is present (or the
// forced override), ICMP ports normalized to 0.
PacketHeader to_packet(const LogRecord& r, std::optional<Direction> forced = std::nullopt);

struct ReplayMismatch {
    enum class Kind { Verdict, OutOfDomain };
    std::size_t record_index = 0;  // 0-based position in the input list
    Kind kind = Kind::Verdict;
    Action logged = Action::Deny;
    std::optional<Action> decided;
    std::optional<int> rule;
    std::string detail;
};

// Replays records against the policy's portion partition. A mismatch is a
// record whose logged verdict disagrees with the decided action, with DENY
// and DROP collapsed to "non-permit". Out-of-domain records are reported,
// not fatal.
std::vector<ReplayMismatch> replay(const std::vector<LogRecord>& records,
                                   const Policy& policy,
                                   std::optional<Direction> forced = std::nullopt);

std::string replay_report_text(const std::vector<ReplayMismatch>& mismatches);
std::string replay_report_csv(const std::vector<ReplayMismatch>& mismatches);

}  // namespace fwp
