#pragma once

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fwp/model.hpp"

namespace fwp::detail {

namespace pt = boost::property_tree;

inline pt::ptree read_xml_root(const std::string& text, const std::string& root_name) {
    std::istringstream is(text);
    pt::ptree tree;
    try {
        pt::read_xml(is, tree, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("XML: ") + e.what());
    }
    auto root = tree.get_child_optional(root_name);
    if (!root || tree.size() != 1)
        throw ParseError("XML: root element must be <" + root_name + ">");
    return *root;
}

// ptree keeps duplicate attributes as repeated <xmlattr> children; collect
// them into a map, rejecting duplicates and unknown names.
inline std::map<std::string, std::string> attributes(
    const pt::ptree& node, const std::vector<std::string>& allowed,
    const std::string& element) {
    std::map<std::string, std::string> out;
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return out;
    for (const auto& [key, value] : *attrs) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParseError("XML: unknown attribute \"" + key + "\" on <" + element + ">");
        if (!out.emplace(key, value.data()).second)
            throw ParseError("XML: duplicate " + key + " declaration on <" + element + ">");
    }
    return out;
}

inline std::string require_attr(const std::map<std::string, std::string>& attrs,
                                const std::string& key, const std::string& element) {
    auto it = attrs.find(key);
    if (it == attrs.end())
        throw ParseError("XML: missing attribute \"" + key + "\" on <" + element + ">");
    return it->second;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace fwp::detail
