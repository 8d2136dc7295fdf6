#pragma once

#include <string>

#include <json.hpp>

#include "bnelicit/bn/structure.hpp"

namespace bnelicit::bn {

/// Parses the canonical JSON edge-list interchange format:
///   { "name": "...", "nodes": ["A", ...], "edges": [["A","B"], ...],
///     "descriptions": {"A": "..."}, "values": {"A": ["yes","no"]} }
/// `descriptions` and `values` are optional. Validation errors name the
/// offending node or edge.
inline BayesianNetworkStructure parse_edge_list_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("edge-list document must be a JSON object");
    for (const char* field : {"name", "nodes", "edges"})
        if (!doc.contains(field))
            throw ParseError(std::string("edge-list document missing field \"") + field + "\"");
    if (!doc["name"].is_string()) throw ParseError("field \"name\" must be a string");
    if (!doc["nodes"].is_array()) throw ParseError("field \"nodes\" must be an array");
    if (!doc["edges"].is_array()) throw ParseError("field \"edges\" must be an array");

    BayesianNetworkStructure out(doc["name"].get<std::string>());
    for (const auto& n : doc["nodes"]) {
        if (!n.is_string()) throw ParseError("node entries must be strings");
        out.add_node(n.get<std::string>());
    }
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
            throw ParseError("edge entries must be [from, to] string pairs");
        out.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
    }
    if (doc.contains("descriptions")) {
        if (!doc["descriptions"].is_object())
            throw ParseError("field \"descriptions\" must be an object");
        for (const auto& [node, desc] : doc["descriptions"].items()) {
            if (!desc.is_string()) throw ParseError("description values must be strings");
            out.set_description(node, desc.get<std::string>());
        }
    }
    if (doc.contains("values")) {
        if (!doc["values"].is_object()) throw ParseError("field \"values\" must be an object");
        for (const auto& [node, vals] : doc["values"].items()) {
            if (!vals.is_array()) throw ParseError("value lists must be arrays");
            std::vector<std::string> vs;
            for (const auto& v : vals) {
                if (!v.is_string()) throw ParseError("value entries must be strings");
                vs.push_back(v.get<std::string>());
            }
            out.set_values(node, vs);
        }
    }
    return out;
}

/// Serializes back to the same schema. Optional fields are emitted only when
/// present, edges in set order; output is deterministic.
inline std::string serialize_edge_list_json(const BayesianNetworkStructure& s, int indent = 2) {
    nlohmann::json doc;
    doc["name"] = s.name();
    doc["nodes"] = nlohmann::json::array();
    for (const auto& n : s.nodes()) doc["nodes"].push_back(n.display);
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : s.edges())
        doc["edges"].push_back({s.display(e.from), s.display(e.to)});
    if (!s.descriptions().empty()) {
        doc["descriptions"] = nlohmann::json::object();
        for (const auto& [key, text] : s.descriptions()) doc["descriptions"][s.display(key)] = text;
    }
    if (!s.values().empty()) {
        doc["values"] = nlohmann::json::object();
        for (const auto& [key, vals] : s.values()) doc["values"][s.display(key)] = vals;
    }
    return doc.dump(indent);
}

} // namespace bnelicit::bn
