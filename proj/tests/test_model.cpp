#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "fwp/formats.hpp"
#include "fwp/model.hpp"
#include "oracles.hpp"

using namespace fwp;

namespace {

constexpr uint32_t ip(uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
    return (a << 24) | (b << 16) | (c << 8) | d;
}

Domain table1_domain() {
    Domain d;
    d.protocols = {"TCP", "UDP", "ICMP", "DNS"};
    return d;
}

const char* kTable1 =
    "TCP, INPUT, 10.0.0.3, 139, 121.10.5.3, 49621, ACCEPT\n"
    "DNS, INPUT, 10.0.0.1, 53, 127.14.41.11, 61190, ACCEPT\n"
    "TCP, OUTPUT, 209.85.231.100, 49625, 10.0.0.4, 80, DENY\n"
    "UDP, OUTPUT, 255.255.255.255, 54507, 10.0.1.12, 2223, DENY\n"
    "UDP, INPUT, 10.2.0.4, 51005, 10.0.0.1, 53, ACCEPT\n"
    "TCP, OUTPUT, 229.96.11.79, ANY, 10.14.7.3, ANY, DENY\n";

}  // namespace

TEST_CASE("token round trips") {
    CHECK(to_token(Action::Accept) == "ACCEPT");
    CHECK(to_token(Action::Deny) == "DENY");
    CHECK(to_token(Action::Drop) == "DROP");
    CHECK(action_from_token("DROP") == Action::Drop);
    CHECK(!action_from_token("PERMIT").has_value());
    CHECK(direction_from_token("INPUT") == Direction::Input);
    CHECK(!direction_from_token("FORWARD").has_value());
    CHECK(is_permit(Action::Accept));
    CHECK(!is_permit(Action::Deny));
    CHECK(!is_permit(Action::Drop));
}

TEST_CASE("domain validation and sizes") {
    Domain d;
    CHECK_NOTHROW(d.validate());
    CHECK(d.ip_max() == 0xFFFFFFFFu);
    CHECK(d.port_max() == 0xFFFFu);

    Domain tiny = oracle::tiny_domain(1, 1, {"TCP"});
    CHECK(tiny.header_count() == 16);  // 1 * 2^2 * 2^2
    CHECK(tiny.packet_count() == 32);  // both directions

    Domain bad = tiny;
    bad.ip_bits = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = tiny;
    bad.port_bits = 17;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = tiny;
    bad.protocols = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = tiny;
    bad.protocols = {"TCP", "TCP"};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("parse_rule_line: golden first row") {
    Domain d = table1_domain();
    Rule r = parse_rule_line("TCP, INPUT, 10.0.0.3, 139, 121.10.5.3, 49621, ACCEPT", 1, d);
    CHECK(r.index == 1);
    CHECK(r.protocol == proto("TCP"));
    CHECK(r.direction == Direction::Input);
    CHECK(r.src_ip == ValueSpan{ip(10, 0, 0, 3), ip(10, 0, 0, 3)});
    CHECK(r.src_port == ValueSpan{139, 139});
    CHECK(r.dst_ip == ValueSpan{ip(121, 10, 5, 3), ip(121, 10, 5, 3)});
    CHECK(r.dst_port == ValueSpan{49621, 49621});
    CHECK(r.action == Action::Accept);
}

TEST_CASE("parse_rule_line: ANY ports expand to the full range") {
    Domain d = table1_domain();
    Rule r = parse_rule_line("TCP, OUTPUT, 229.96.11.79, ANY, 10.14.7.3, ANY, DENY", 6, d);
    CHECK(r.src_port == ValueSpan{0, 0xFFFF});
    CHECK(r.dst_port == ValueSpan{0, 0xFFFF});
    CHECK(r.src_ip.lo == ip(229, 96, 11, 79));
    CHECK(r.action == Action::Deny);
}

TEST_CASE("parse_rule_line: errors") {
    Domain d = table1_domain();
    CHECK_THROWS_WITH_AS(
        parse_rule_line("TCP, INPUT, 10.0.0.3, 139, 121.10.5.3, ACCEPT", 1, d),
        doctest::Contains("7"), ParseError);
    CHECK_THROWS_WITH_AS(
        parse_rule_line("TCP, INPUT, 10.0.0.3, 139, 121.10.5.3, 49621, PERMIT", 1, d),
        doctest::Contains("PERMIT"), ParseError);
    CHECK_THROWS_WITH_AS(
        parse_rule_line("TCP, FORWARD, 10.0.0.3, 139, 121.10.5.3, 49621, ACCEPT", 1, d),
        doctest::Contains("direction"), ParseError);
    CHECK_THROWS_AS(
        parse_rule_line("GRE, INPUT, 10.0.0.3, 139, 121.10.5.3, 49621, ACCEPT", 1, d),
        ParseError);
    CHECK_THROWS_WITH_AS(
        parse_rule_line("TCP, INPUT, 10.0.0.3, 70000, 121.10.5.3, 49621, ACCEPT", 1, d),
        doctest::Contains("port"), ParseError);
}

TEST_CASE("IP pattern forms") {
    Domain d;
    CHECK(parse_ip_pattern("10.*.*.*", d) == ValueSpan{ip(10, 0, 0, 0), ip(10, 255, 255, 255)});
    CHECK(parse_ip_pattern("10.20.*.*", d) == ValueSpan{ip(10, 20, 0, 0), ip(10, 20, 255, 255)});
    CHECK(parse_ip_pattern("*.*.*.*", d) == ValueSpan{0, 0xFFFFFFFFu});
    CHECK(parse_ip_pattern("*.*.*", d) == ValueSpan{0, 0xFFFFFFFFu});
    CHECK(parse_ip_pattern("ANY", d) == ValueSpan{0, 0xFFFFFFFFu});
    CHECK(parse_ip_pattern("10.0.0.0/8", d) == ValueSpan{ip(10, 0, 0, 0), ip(10, 255, 255, 255)});
    CHECK(parse_ip_pattern("1.2.3.4-1.2.3.9", d) == ValueSpan{ip(1, 2, 3, 4), ip(1, 2, 3, 9)});
    CHECK_THROWS_AS(parse_ip_pattern("10.*.0.1", d), ParseError);     // star must trail
    CHECK_THROWS_AS(parse_ip_pattern("10.0.0.5/8", d), ParseError);   // host bits set
    CHECK_THROWS_AS(parse_ip_pattern("1.2.3.9-1.2.3.4", d), ParseError);
    CHECK_THROWS_AS(parse_ip_pattern("300.0.0.1", d), ParseError);

    Domain tiny = oracle::tiny_domain(4, 4);
    CHECK(parse_ip_pattern("7", tiny) == ValueSpan{7, 7});
    CHECK(parse_ip_pattern("4/2", tiny) == ValueSpan{4, 7});
    CHECK(parse_ip_pattern("1-6", tiny) == ValueSpan{1, 6});
    CHECK(parse_ip_pattern("ANY", tiny) == ValueSpan{0, 15});
    CHECK_THROWS_AS(parse_ip_pattern("16", tiny), ParseError);
    CHECK_THROWS_AS(parse_ip_pattern("10.*.*.*", tiny), ParseError);  // needs 32-bit
}

TEST_CASE("ICMP rules: ports must be ANY or 0") {
    Domain d;
    CHECK_THROWS_AS(parse_rule_line("ICMP, INPUT, 1.2.3.4, 5, 5.6.7.8, 0, DENY", 1, d),
                    ParseError);
    CHECK_NOTHROW(parse_rule_line("ICMP, INPUT, 1.2.3.4, 0, 5.6.7.8, ANY, DENY", 1, d));
}

TEST_CASE("parse_policy_file: Table-style corpus") {
    Domain d = table1_domain();
    Policy p = parse_policy_file(kTable1, Action::Deny, d);
    CHECK(p.size() == 6);
    for (int i = 1; i <= 6; ++i) CHECK(p.rule(i).index == i);
    CHECK(p.rule(2).protocol == proto("DNS"));
    CHECK(p.rule(4).src_ip == ValueSpan{0xFFFFFFFFu, 0xFFFFFFFFu});
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("parse_policy_file: empty, comments, line-numbered errors") {
    Domain d = table1_domain();
    Policy empty = parse_policy_file("", Action::Deny, d);
    CHECK(empty.rules.empty());
    CHECK(empty.default_action == Action::Deny);

    Policy commented = parse_policy_file("# note\n\n  \n", Action::Accept, d);
    CHECK(commented.rules.empty());

    std::string bad =
        "TCP, INPUT, 10.0.0.3, 139, 121.10.5.3, 49621, ACCEPT\n"
        "# fine\n"
        "TCP, INPUT, 10.0.0.3, 139, 121.10.5.3, 49621, BOGUS\n";
    CHECK_THROWS_WITH_AS(parse_policy_file(bad, Action::Deny, d),
                         doctest::Contains("line 3"), ParseError);
}

TEST_CASE("XML policy parsing") {
    const char* xml =
        "<policy default=\"DENY\" protocols=\"TCP,UDP,ICMP,DNS\">\n"
        "  <rule proto=\"TCP\" dir=\"INPUT\" src-ip=\"10.0.0.3\" src-port=\"139\""
        " dst-ip=\"121.10.5.3\" dst-port=\"49621\" action=\"ACCEPT\"/>\n"
        "</policy>\n";
    Policy p = parse_xml_policy(xml);
    CHECK(p.size() == 1);
    CHECK(p.default_action == Action::Deny);
    Rule expect =
        parse_rule_line("TCP, INPUT, 10.0.0.3, 139, 121.10.5.3, 49621, ACCEPT", 1, p.domain);
    CHECK(p.rule(1) == expect);

    Policy empty = parse_xml_policy("<policy default=\"DENY\"/>");
    CHECK(empty.rules.empty());
    CHECK(empty.default_action == Action::Deny);
    CHECK(empty.domain == Domain{});

    CHECK_THROWS_AS(parse_xml_policy("<policy default=\"PERMIT\"/>"), ParseError);
    CHECK_THROWS_AS(parse_xml_policy("<policy default=\"DENY\" bogus=\"1\"/>"), ParseError);
    CHECK_THROWS_AS(parse_xml_policy("<rules/>"), ParseError);
    CHECK_THROWS_AS(parse_xml_policy("<policy default=\"DENY\"><rule/></policy>"),
                    ParseError);
    // duplicate default declaration
    CHECK_THROWS_AS(parse_xml_policy("<policy default=\"DENY\" default=\"ACCEPT\"/>"),
                    ParseError);
}

TEST_CASE("XML domain attributes define miniature domains") {
    const char* xml =
        "<policy default=\"ACCEPT\" ip-bits=\"4\" port-bits=\"3\" protocols=\"A,B\">\n"
        "  <rule proto=\"A\" dir=\"OUTPUT\" src-ip=\"4/2\" src-port=\"0-3\""
        " dst-ip=\"ANY\" dst-port=\"7\" action=\"DROP\"/>\n"
        "</policy>\n";
    Policy p = parse_xml_policy(xml);
    CHECK(p.domain.ip_bits == 4);
    CHECK(p.domain.port_bits == 3);
    CHECK(p.domain.protocols == std::vector<std::string>{"A", "B"});
    CHECK(p.rule(1).src_ip == ValueSpan{4, 7});
    CHECK(p.rule(1).dst_port == ValueSpan{7, 7});
}

TEST_CASE("serialization round trips") {
    Domain d = table1_domain();
    Policy p = parse_policy_file(kTable1, Action::Deny, d);

    std::string csv = serialize_policy(p, PolicyFormat::Csv);
    Policy p2 = parse_policy_file(csv, p.default_action, d);
    CHECK(p2 == p);
    CHECK(serialize_policy(p2, PolicyFormat::Csv) == csv);  // byte-canonical

    std::string xml = serialize_policy(p, PolicyFormat::Xml);
    Policy p3 = parse_xml_policy(xml);
    CHECK(p3 == p);
    CHECK(serialize_policy(p3, PolicyFormat::Xml) == xml);

    Policy empty;
    empty.domain = d;
    std::string txt = serialize_policy(empty, PolicyFormat::Csv);
    std::istringstream lines(txt);
    std::string line;
    while (std::getline(lines, line)) CHECK(line.front() == '#');
    CHECK(parse_policy_file(txt, empty.default_action, d) == empty);
}

TEST_CASE("round trip property on random policies") {
    std::mt19937 g(20260809);
    Domain tiny = oracle::tiny_domain(4, 4);
    Domain wide;  // default 32/16
    for (int it = 0; it < 200; ++it) {
        const Domain& d = (it % 2 == 0) ? tiny : wide;
        Policy p = oracle::random_policy(g, d, 8);
        CAPTURE(it);
        Policy via_csv =
            parse_policy_file(serialize_policy(p, PolicyFormat::Csv), p.default_action, d);
        CHECK(via_csv == p);
        Policy via_xml = parse_xml_policy(serialize_policy(p, PolicyFormat::Xml));
        CHECK(via_xml == p);
    }
}

TEST_CASE("pattern normalization idempotence") {
    Domain d;
    for (const char* text :
         {"10.0.0.3", "10.*.*.*", "*.*.*.*", "ANY", "10.0.0.0/8", "1.2.3.4-1.2.3.9",
          "128.0.0.0/1", "0.0.0.0"}) {
        ValueSpan s1 = parse_ip_pattern(text, d);
        std::string once = format_ip_pattern(s1, d);
        ValueSpan s2 = parse_ip_pattern(once, d);
        CHECK(s1 == s2);
        CHECK(format_ip_pattern(s2, d) == once);
    }
    for (const char* text : {"80", "ANY", "0-1023", "1000-2000", "65535"}) {
        ValueSpan s1 = parse_port_pattern(text, d);
        std::string once = format_port_pattern(s1, d);
        CHECK(parse_port_pattern(once, d) == s1);
        CHECK(format_port_pattern(parse_port_pattern(once, d), d) == once);
    }
}

TEST_CASE("parse_packet") {
    Domain d;
    PacketHeader p = parse_packet("TCP INPUT 172.168.0.4:49624 74.123.236.72:80", d);
    CHECK(p.protocol == "TCP");
    CHECK(p.direction == Direction::Input);
    CHECK(p.src_ip == ip(172, 168, 0, 4));
    CHECK(p.src_port == 49624);
    CHECK(p.dst_ip == ip(74, 123, 236, 72));
    CHECK(p.dst_port == 80);
    CHECK(in_domain(p, d));

    PacketHeader icmp = parse_packet("ICMP INPUT 10.0.0.1:0 10.0.0.2:0", d);
    CHECK(icmp.src_port == 0);
    CHECK(icmp.dst_port == 0);
    // nonzero ICMP ports are normalized, not rejected
    CHECK(parse_packet("ICMP INPUT 10.0.0.1:9 10.0.0.2:9", d) == icmp);

    CHECK_THROWS_WITH_AS(parse_packet("TCP INPUT 10.0.0.1:70000 10.0.0.2:80", d),
                         doctest::Contains("port"), ParseError);
    CHECK_THROWS_AS(parse_packet("TCP INPUT 10.0.0.1 10.0.0.2:80", d), ParseError);
    CHECK_THROWS_AS(parse_packet("TCP 10.0.0.1:1 10.0.0.2:80", d), ParseError);
    CHECK_THROWS_AS(parse_packet("GRE INPUT 10.0.0.1:1 10.0.0.2:80", d), ParseError);
}

TEST_CASE("make_policy renumbers and validates") {
    Domain d = oracle::tiny_domain(2, 2);
    std::mt19937 g(7);
    std::vector<Rule> rules;
    for (int i = 0; i < 3; ++i) rules.push_back(oracle::random_rule(g, d, 99));
    Policy p = make_policy(rules, Action::Drop, d);
    CHECK(p.size() == 3);
    for (int i = 1; i <= 3; ++i) CHECK(p.rule(i).index == i);

    Policy broken = p;
    broken.rules[1].index = 7;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}
