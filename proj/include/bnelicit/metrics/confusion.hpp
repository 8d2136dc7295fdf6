#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnelicit/bn/structure.hpp"

namespace bnelicit::metrics {

/// Directed-edge confusion over the full n x n adjacency universe
/// (diagonal included). A reversed edge contributes one false positive and
/// one false negative.
struct ConfusionCounts {
    size_t tp = 0;
    size_t fp = 0;
    size_t fn_ = 0;
    size_t tn = 0;
    size_t n = 0; // node count of the truth network

    size_t cells() const { return n * n; }
};

inline ConfusionCounts confusion_counts(const bn::BayesianNetworkStructure& learned,
                                        const bn::BayesianNetworkStructure& truth) {
    auto truth_keys = truth.node_key_set();
    std::vector<std::string> unmatched;
    for (const auto& node : learned.nodes())
        if (!truth_keys.count(node.key)) unmatched.push_back(node.display);
    if (!unmatched.empty()) {
        std::ostringstream msg;
        msg << "learned nodes not present in the truth network:";
        for (const auto& u : unmatched) msg << " \"" << u << "\"";
        throw AlignmentError(msg.str());
    }

    ConfusionCounts c;
    c.n = truth.nodes().size();
    for (const auto& e : learned.edges()) {
        if (truth.edges().count(e)) ++c.tp;
        else ++c.fp;
    }
    for (const auto& e : truth.edges())
        if (!learned.edges().count(e)) ++c.fn_;
    c.tn = c.cells() - c.tp - c.fp - c.fn_;
    return c;
}

/// Structural Hamming distance: edges to delete plus edges to add, a badly
/// oriented edge counting twice.
inline size_t shd(const ConfusionCounts& c) { return c.fp + c.fn_; }

inline double shd_per_edge(const ConfusionCounts& c, size_t true_edge_count) {
    if (true_edge_count == 0)
        throw ValidationError("shd_per_edge: true edge count is zero");
    return static_cast<double>(shd(c)) / static_cast<double>(true_edge_count);
}

namespace detail {

inline double f1(size_t tp, size_t fp, size_t fn) {
    if (tp == 0 && fp == 0 && fn == 0) return 1.0; // empty class convention
    if (tp == 0) return 0.0;
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

} // namespace detail

/// Unweighted mean of the F1 scores of the edge and no-edge classes over the
/// flattened adjacency matrix (diagonal included).
inline double fscore_macro(const ConfusionCounts& c) {
    double edge_class = detail::f1(c.tp, c.fp, c.fn_);
    double noedge_class = detail::f1(c.tn, c.fn_, c.fp);
    return (edge_class + noedge_class) / 2.0;
}

/// One learned-vs-true evaluation row; column names follow the report tables.
struct MetricReport {
    ConfusionCounts counts;
    size_t shd = 0;
    double shd_per_edge = 0.0;
    double fscore_macro = 0.0;
};

inline MetricReport evaluate(const bn::BayesianNetworkStructure& learned,
                             const bn::BayesianNetworkStructure& truth) {
    MetricReport r;
    r.counts = confusion_counts(learned, truth);
    r.shd = shd(r.counts);
    r.shd_per_edge = shd_per_edge(r.counts, truth.edges().size());
    r.fscore_macro = fscore_macro(r.counts);
    return r;
}

inline nlohmann::json to_json(const MetricReport& r) {
    return nlohmann::json{
        {"TP", r.counts.tp},   {"FP", r.counts.fp},       {"FN", r.counts.fn_},
        {"TN", r.counts.tn},   {"n", r.counts.n},         {"SHD", r.shd},
        {"SHD/edg", r.shd_per_edge}, {"F-score", r.fscore_macro},
    };
}

/// Recall of true nodes relative to a generated node list, matched through a
/// human-authored alias map (generated name -> true name) with an exact
/// normalized-key fallback.
struct NodeRecall {
    size_t generated_count = 0;
    size_t matched_count = 0;
    double recall = 0.0;
};

inline NodeRecall node_recall(const std::vector<std::string>& generated,
                              const bn::BayesianNetworkStructure& truth,
                              const std::map<std::string, std::string>& alias_map) {
    auto truth_keys = truth.node_key_set();
    std::map<std::string, std::string> alias_by_key; // generated key -> true key
    std::set<std::string> targets;
    for (const auto& [gen, tru] : alias_map) {
        std::string tru_key = bn::normalize_name(tru).key;
        if (!truth_keys.count(tru_key))
            throw MappingError("alias target is not a true node: \"" + tru + "\"");
        if (!targets.insert(tru_key).second)
            throw MappingError("alias map is not injective: two names map to \"" + tru + "\"");
        alias_by_key[bn::normalize_name(gen).key] = tru_key;
    }

    NodeRecall out;
    out.generated_count = generated.size();
    std::set<std::string> matched;
    for (const auto& g : generated) {
        std::string key = bn::normalize_name(g).key;
        auto it = alias_by_key.find(key);
        if (it != alias_by_key.end()) matched.insert(it->second);
        else if (truth_keys.count(key)) matched.insert(key);
    }
    out.matched_count = matched.size();
    out.recall = truth.nodes().empty()
                     ? 0.0
                     : static_cast<double>(out.matched_count) / static_cast<double>(truth.nodes().size());
    return out;
}

} // namespace bnelicit::metrics
