#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bnelicit/bn/structure.hpp"

namespace bnelicit::bn {

namespace detail {

/// Tarjan strongly connected components over the nodes touched by `edges`.
/// Returns component id per node; ids are otherwise arbitrary.
inline std::map<std::string, int> strongly_connected_components(const EdgeSet& edges) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : edges) {
        adj[e.from].push_back(e.to);
        adj.try_emplace(e.to);
    }
    for (auto& [k, v] : adj) std::sort(v.begin(), v.end());

    std::map<std::string, int> index, low, comp;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    int next_index = 0, next_comp = 0;

    struct Frame {
        std::string node;
        size_t child = 0;
    };

    for (const auto& [start, _] : adj) {
        if (index.count(start)) continue;
        std::vector<Frame> call;
        call.push_back({start});
        index[start] = low[start] = next_index++;
        stack.push_back(start);
        on_stack.insert(start);
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& out = adj.at(f.node);
            if (f.child < out.size()) {
                const std::string& w = out[f.child++];
                if (!index.count(w)) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack.insert(w);
                    call.push_back({w});
                } else if (on_stack.count(w)) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
            } else {
                if (low[f.node] == index[f.node]) {
                    while (true) {
                        std::string w = stack.back();
                        stack.pop_back();
                        on_stack.erase(w);
                        comp[w] = next_comp;
                        if (w == f.node) break;
                    }
                    ++next_comp;
                }
                std::string done = f.node;
                call.pop_back();
                if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[done]);
            }
        }
    }
    return comp;
}

/// One cycle inside a component, found by DFS from the lexicographically
/// smallest member. Edges outside the component are ignored.
inline std::vector<std::string> representative_cycle(const EdgeSet& edges,
                                                     const std::set<std::string>& members) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : edges)
        if (members.count(e.from) && members.count(e.to)) adj[e.from].push_back(e.to);
    for (auto& [k, v] : adj) std::sort(v.begin(), v.end());

    std::string start = *members.begin();
    std::vector<std::string> path{start};
    std::map<std::string, size_t> pos{{start, 0}};
    // Walk smallest-first; a component is strongly connected so a cycle
    // through `start` is always reachable.
    std::set<std::pair<std::string, std::string>> used;
    std::string cur = start;
    while (true) {
        const auto& out = adj[cur];
        std::string next;
        for (const auto& w : out) {
            if (!used.count({cur, w})) {
                next = w;
                used.insert({cur, w});
                break;
            }
        }
        if (next.empty()) {
            // Dead end within the walk; backtrack.
            path.pop_back();
            pos.erase(cur);
            if (path.empty()) return {};
            cur = path.back();
            continue;
        }
        auto it = pos.find(next);
        if (it != pos.end())
            return std::vector<std::string>(path.begin() + static_cast<long>(it->second), path.end());
        pos[next] = path.size();
        path.push_back(next);
        cur = next;
    }
}

} // namespace detail

/// All elementary 2-cycles, plus one representative cycle per strongly
/// connected component with more than two nodes. Empty iff the edge set is
/// acyclic.
inline std::vector<std::vector<std::string>> find_cycles(const EdgeSet& edges) {
    std::vector<std::vector<std::string>> cycles;
    std::set<std::pair<std::string, std::string>> seen_pairs;
    for (const auto& e : edges) {
        if (e.from < e.to && edges.count(DirectedEdge{e.to, e.from}))
            cycles.push_back({e.from, e.to});
    }
    auto comp = detail::strongly_connected_components(edges);
    std::map<int, std::set<std::string>> groups;
    for (const auto& [node, c] : comp) groups[c].insert(node);
    for (const auto& [c, members] : groups) {
        if (members.size() > 2) {
            auto cyc = detail::representative_cycle(edges, members);
            if (!cyc.empty()) cycles.push_back(std::move(cyc));
        }
    }
    // Deterministic order: shorter cycles first, then lexicographic.
    std::sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return cycles;
}

/// True iff the edge set contains a directed cycle.
inline bool has_cycle(const EdgeSet& edges) {
    auto comp = detail::strongly_connected_components(edges);
    std::map<int, int> sizes;
    for (const auto& [node, c] : comp) ++sizes[c];
    for (const auto& [c, s] : sizes)
        if (s > 1) return true;
    return false;
}

/// Removes edges until acyclic: while a cycle exists, drops the cycle edge
/// with the lowest vote count, ties broken by lexicographic (from, to).
/// Never touches an edge that lies outside every cycle. Returns the
/// surviving edge set; `removed` (when given) collects the dropped edges.
inline EdgeSet break_cycles(const std::map<DirectedEdge, int>& weighted_edges,
                            std::vector<DirectedEdge>* removed = nullptr) {
    EdgeSet edges;
    for (const auto& [e, w] : weighted_edges) edges.insert(e);
    while (true) {
        auto comp = detail::strongly_connected_components(edges);
        bool found = false;
        DirectedEdge victim;
        int victim_votes = 0;
        for (const auto& e : edges) {
            auto itf = comp.find(e.from);
            auto itt = comp.find(e.to);
            if (itf == comp.end() || itt == comp.end() || itf->second != itt->second) continue;
            int votes = weighted_edges.at(e);
            if (!found || votes < victim_votes ||
                (votes == victim_votes && e < victim)) {
                victim = e;
                victim_votes = votes;
                found = true;
            }
        }
        if (!found) break;
        edges.erase(victim);
        if (removed) removed->push_back(victim);
    }
    return edges;
}

} // namespace bnelicit::bn
