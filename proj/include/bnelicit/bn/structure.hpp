#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bnelicit/errors.hpp"

namespace bnelicit::bn {

/// A node name with its canonical comparison key. Identity is the key
/// (lowercased, whitespace-collapsed); `display` keeps the readable form.
struct NodeName {
    std::string display;
    std::string key;

    friend bool operator==(const NodeName& a, const NodeName& b) { return a.key == b.key; }
    friend auto operator<=>(const NodeName& a, const NodeName& b) { return a.key <=> b.key; }
};

/// Directed edge between two nodes, stored as canonical keys.
struct DirectedEdge {
    std::string from;
    std::string to;

    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
    friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

using EdgeSet = std::set<DirectedEdge>;

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(b, e - b + 1);
}

inline std::string collapse_ws(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
        } else {
            if (in_ws && !out.empty()) out.push_back(' ');
            in_ws = false;
            out.push_back(c);
        }
    }
    return out;
}

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace detail

/// Canonicalizes a raw node name: trims, strips matching outer angle
/// brackets / quotes, collapses runs of whitespace. The key additionally
/// lowercases; `display` keeps the original casing. Idempotent.
inline NodeName normalize_name(const std::string& raw) {
    std::string s = detail::trim(raw);
    while (s.size() >= 2) {
        char a = s.front(), b = s.back();
        bool wrapped = (a == '<' && b == '>') || (a == '"' && b == '"') || (a == '\'' && b == '\'');
        if (!wrapped) break;
        s = detail::trim(s.substr(1, s.size() - 2));
    }
    s = detail::collapse_ws(s);
    if (s.empty()) throw ValidationError("node name is empty after normalization: \"" + raw + "\"");
    return NodeName{s, detail::to_lower(s)};
}

/// Named nodes plus a directed edge set; covers both ground-truth networks
/// and elicited structures (the latter may hold cycles until aggregation).
class BayesianNetworkStructure {
public:
    BayesianNetworkStructure() = default;
    explicit BayesianNetworkStructure(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    const std::vector<NodeName>& nodes() const { return nodes_; }
    const EdgeSet& edges() const { return edges_; }
    const std::map<std::string, std::string>& descriptions() const { return descriptions_; }
    const std::map<std::string, std::vector<std::string>>& values() const { return values_; }

    bool has_node(const std::string& key) const { return index_.count(key) > 0; }

    /// Display form for a node key; throws if the key is unknown.
    const std::string& display(const std::string& key) const {
        auto it = index_.find(key);
        if (it == index_.end()) throw ValidationError("unknown node key: " + key);
        return nodes_[it->second].display;
    }

    std::vector<std::string> node_keys() const {
        std::vector<std::string> out;
        out.reserve(nodes_.size());
        for (const auto& n : nodes_) out.push_back(n.key);
        return out;
    }

    std::vector<std::string> node_displays() const {
        std::vector<std::string> out;
        out.reserve(nodes_.size());
        for (const auto& n : nodes_) out.push_back(n.display);
        return out;
    }

    void add_node(const std::string& raw) {
        NodeName n = normalize_name(raw);
        if (index_.count(n.key))
            throw ValidationError("duplicate node: \"" + n.display + "\"");
        index_[n.key] = nodes_.size();
        nodes_.push_back(std::move(n));
    }

    /// Adds an edge given raw endpoint names; validates membership,
    /// self-loop and duplicate rules.
    void add_edge(const std::string& raw_from, const std::string& raw_to) {
        NodeName f = normalize_name(raw_from);
        NodeName t = normalize_name(raw_to);
        if (!has_node(f.key))
            throw ValidationError("edge endpoint not a declared node: \"" + f.display + "\"");
        if (!has_node(t.key))
            throw ValidationError("edge endpoint not a declared node: \"" + t.display + "\"");
        if (f.key == t.key)
            throw ValidationError("self-loop on node: \"" + f.display + "\"");
        DirectedEdge e{f.key, t.key};
        if (edges_.count(e))
            throw ValidationError("duplicate edge: \"" + f.display + "\" -> \"" + t.display + "\"");
        edges_.insert(std::move(e));
    }

    void set_description(const std::string& node_raw, const std::string& text) {
        NodeName n = normalize_name(node_raw);
        if (!has_node(n.key))
            throw ValidationError("description for unknown node: \"" + n.display + "\"");
        descriptions_[n.key] = text;
    }

    void set_values(const std::string& node_raw, std::vector<std::string> vals) {
        NodeName n = normalize_name(node_raw);
        if (!has_node(n.key))
            throw ValidationError("values for unknown node: \"" + n.display + "\"");
        values_[n.key] = std::move(vals);
    }

    std::set<std::string> node_key_set() const {
        std::set<std::string> out;
        for (const auto& n : nodes_) out.insert(n.key);
        return out;
    }

private:
    std::string name_;
    std::vector<NodeName> nodes_;
    std::map<std::string, size_t> index_;
    EdgeSet edges_;
    std::map<std::string, std::string> descriptions_;            // key -> deciphered meaning
    std::map<std::string, std::vector<std::string>> values_;     // key -> state labels
};

/// n x n binary matrix; cell (i,j) = 1 iff edge node_i -> node_j, node order
/// fixed by the structure's node list.
struct AdjacencyMatrix {
    size_t n = 0;
    std::vector<uint8_t> cells; // row-major

    uint8_t at(size_t i, size_t j) const { return cells[i * n + j]; }
    size_t ones() const { return static_cast<size_t>(std::count(cells.begin(), cells.end(), 1)); }
};

inline AdjacencyMatrix adjacency_matrix(const BayesianNetworkStructure& s) {
    AdjacencyMatrix m;
    m.n = s.nodes().size();
    m.cells.assign(m.n * m.n, 0);
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < s.nodes().size(); ++i) idx[s.nodes()[i].key] = i;
    for (const auto& e : s.edges()) m.cells[idx.at(e.from) * m.n + idx.at(e.to)] = 1;
    return m;
}

} // namespace bnelicit::bn
