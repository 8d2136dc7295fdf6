#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bnelicit/bn/structure.hpp"

namespace bnelicit::delphi {

/// Classic edit distance (insert / delete / substitute, unit costs).
inline size_t levenshtein(const std::string& a, const std::string& b) {
    const size_t m = a.size(), n = b.size();
    std::vector<size_t> prev(n + 1), cur(n + 1);
    for (size_t j = 0; j <= n; ++j) prev[j] = j;
    for (size_t i = 1; i <= m; ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= n; ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

/// An edge the model produced that could not be kept, with the reason.
struct DroppedEdge {
    std::pair<std::string, std::string> raw;
    std::string reason; // invented-node | self-loop | duplicate
};

struct ReconcileOutcome {
    std::vector<bn::DirectedEdge> edges; // canonical keys, first-seen order, deduplicated
    std::vector<DroppedEdge> dropped;
};

namespace reconcile_detail {

/// Maps one raw endpoint onto the canonical node set: exact normalized-key
/// match, else the unique Levenshtein minimizer within the acceptance
/// threshold max(2, ceil(0.25 * |raw key|)).
inline std::optional<std::string> resolve_endpoint(const std::string& raw,
                                                   const std::vector<std::string>& canonical_keys) {
    std::string key;
    try {
        key = bn::normalize_name(raw).key;
    } catch (const ValidationError&) {
        return std::nullopt; // empty/blank endpoint
    }
    size_t best = SIZE_MAX;
    size_t best_count = 0;
    std::string best_key;
    for (const auto& c : canonical_keys) {
        if (c == key) return c;
        size_t d = levenshtein(key, c);
        if (d < best) {
            best = d;
            best_count = 1;
            best_key = c;
        } else if (d == best) {
            ++best_count;
        }
    }
    const size_t threshold =
        std::max<size_t>(2, static_cast<size_t>(std::ceil(0.25 * static_cast<double>(key.size()))));
    if (best <= threshold && best_count == 1) return best_key;
    return std::nullopt;
}

} // namespace reconcile_detail

/// Maps raw edge endpoints onto the canonical node list. Any endpoint that
/// cannot be resolved drops the whole edge with reason "invented-node";
/// self-loops after mapping and duplicates are dropped with their own
/// reasons. Nothing is merged silently: a failed resolution never picks an
/// ambiguous minimizer.
inline ReconcileOutcome reconcile_node_names(
    const std::vector<std::pair<std::string, std::string>>& raw_edges,
    const std::vector<std::string>& canonical_names) {
    if (canonical_names.empty())
        throw ValidationError("reconcile_node_names: canonical node list is empty");
    std::vector<std::string> keys;
    keys.reserve(canonical_names.size());
    for (const auto& c : canonical_names) keys.push_back(bn::normalize_name(c).key);

    ReconcileOutcome out;
    std::set<bn::DirectedEdge> seen;
    for (const auto& raw : raw_edges) {
        auto from = reconcile_detail::resolve_endpoint(raw.first, keys);
        auto to = reconcile_detail::resolve_endpoint(raw.second, keys);
        if (!from || !to) {
            out.dropped.push_back({raw, "invented-node"});
            continue;
        }
        if (*from == *to) {
            out.dropped.push_back({raw, "self-loop"});
            continue;
        }
        bn::DirectedEdge e{*from, *to};
        if (!seen.insert(e).second) {
            out.dropped.push_back({raw, "duplicate"});
            continue;
        }
        out.edges.push_back(std::move(e));
    }
    return out;
}

} // namespace bnelicit::delphi
