#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnelicit/llm/chat.hpp"
#include "bnelicit/llm/prompts.hpp"
#include "bnelicit/metrics/confusion.hpp"

namespace bnelicit::contam {

/// Raw output of the two-prompt guided-instruction probe.
struct ProbeReplies {
    llm::ChatConversation conversation;
    std::string nodes_reply;
    std::string edges_reply;
};

/// Scored probe evidence for one (BN, model) pair.
struct ContaminationReport {
    std::vector<std::string> generated_nodes; // deduplicated display names
    size_t generated_count = 0;
    size_t matched_count = 0;
    double recall = 0.0;
    bool exact_name_match = false; // the report tables' "*" marker
    size_t generated_edge_count = 0;
    double edge_ratio = 0.0;
    std::optional<metrics::MetricReport> edge_analysis;
};

/// Sends the two probe prompts on one conversation. The URL is included in
/// both prompts only when provided.
inline ProbeReplies run_probe(llm::ChatBackend& backend, const std::string& paper_name,
                              const std::optional<std::string>& url,
                              const llm::PromptLibrary& prompts) {
    if (paper_name.empty()) throw ConfigError("probe needs a non-empty paper name");
    std::string paper_ref = "\"" + paper_name + "\"";
    if (url && !url->empty()) paper_ref += " and also available on " + *url;

    ProbeReplies out;
    out.conversation = llm::ChatConversation(backend.id());
    out.nodes_reply = llm::send(backend, out.conversation,
                                prompts.render("contamination_nodes", {{"paper_ref", paper_ref}}));
    out.edges_reply = llm::send(backend, out.conversation,
                                prompts.render("contamination_edges", {{"paper_ref", paper_ref}}));
    return out;
}

namespace contam_detail {

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    lines.push_back(cur);
    return lines;
}

inline std::optional<std::string> numbered_item(const std::string& line) {
    size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos || !std::isdigit(static_cast<unsigned char>(line[i])))
        return std::nullopt;
    size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j >= line.size() || (line[j] != '.' && line[j] != ')')) return std::nullopt;
    return bn::detail::trim(line.substr(j + 1));
}

inline std::optional<std::string> bulleted_item(const std::string& line) {
    std::string t = bn::detail::trim(line);
    if (t.size() >= 2 && (t[0] == '*' || t[0] == '-') && t[1] == ' ')
        return bn::detail::trim(t.substr(1));
    return std::nullopt;
}

/// Leading name of a list item: text before the first ":" or " - ",
/// markdown emphasis stripped.
inline std::string leading_name(std::string item) {
    size_t colon = item.find(':');
    size_t dash = item.find(" - ");
    size_t cut = std::min(colon == std::string::npos ? item.size() : colon,
                          dash == std::string::npos ? item.size() : dash);
    item = bn::detail::trim(item.substr(0, cut));
    while (item.size() >= 4 && item.substr(0, 2) == "**" && item.substr(item.size() - 2) == "**")
        item = bn::detail::trim(item.substr(2, item.size() - 4));
    return item;
}

} // namespace contam_detail

/// Names enumerated in the nodes reply. Numbered items win over bullets
/// (sub-bullets under numbered lists carry roles, not names); duplicates
/// collapse by normalized key. Hypothetical-list disclaimers do not suppress
/// extraction — classifying them is the analyst's call.
inline std::vector<std::string> extract_generated_nodes(const std::string& nodes_reply) {
    auto lines = contam_detail::split_lines(nodes_reply);
    std::vector<std::string> items;
    for (const auto& line : lines)
        if (auto item = contam_detail::numbered_item(line)) items.push_back(*item);
    if (items.empty())
        for (const auto& line : lines)
            if (auto item = contam_detail::bulleted_item(line)) items.push_back(*item);

    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& item : items) {
        std::string name = contam_detail::leading_name(item);
        if (name.empty()) continue;
        std::string key;
        try {
            key = bn::normalize_name(name).key;
        } catch (const ValidationError&) {
            continue;
        }
        if (seen.insert(key).second) out.push_back(bn::normalize_name(name).display);
    }
    return out;
}

/// "A->B" lines from the edges reply (bullets and numbering stripped, both
/// arrow spellings accepted), deduplicated by normalized key pair.
inline std::vector<std::pair<std::string, std::string>> extract_probe_edges(
    const std::string& edges_reply) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (auto line : contam_detail::split_lines(edges_reply)) {
        if (auto item = contam_detail::numbered_item(line)) line = *item;
        else if (auto bullet = contam_detail::bulleted_item(line)) line = *bullet;
        size_t arrow = line.find("->");
        size_t arrow_len = 2;
        if (arrow == std::string::npos) {
            arrow = line.find("→");
            arrow_len = 3;
        }
        if (arrow == std::string::npos || arrow == 0) continue;
        std::string from = bn::detail::trim(line.substr(0, arrow));
        std::string to = bn::detail::trim(line.substr(arrow + arrow_len));
        if (!to.empty() && to.back() == '.') to = bn::detail::trim(to.substr(0, to.size() - 1));
        if (from.empty() || to.empty()) continue;
        // Prose sentences around an arrow are not edge statements.
        if (from.find(' ') != std::string::npos && from.size() > 60) continue;
        std::string fk, tk;
        try {
            fk = bn::normalize_name(from).key;
            tk = bn::normalize_name(to).key;
        } catch (const ValidationError&) {
            continue;
        }
        if (seen.insert({fk, tk}).second) out.emplace_back(from, to);
    }
    return out;
}

/// Scores the probe: node recall through the analyst alias map, the exact
/// name-match flag, and (when nodes were generated) the edge analysis
/// against the true structure.
inline ContaminationReport score_probe(const std::vector<std::string>& generated_nodes,
                                       const std::string& edges_reply,
                                       const bn::BayesianNetworkStructure& truth,
                                       const std::map<std::string, std::string>& alias_map,
                                       bool count_as_zero = false,
                                       double exact_match_threshold = 0.5) {
    ContaminationReport report;
    if (count_as_zero) return report; // hypothetical list: zero nodes, no analysis

    report.generated_nodes = generated_nodes;
    report.generated_count = generated_nodes.size();
    auto recall = metrics::node_recall(generated_nodes, truth, alias_map);
    report.matched_count = recall.matched_count;
    report.recall = recall.recall;

    // exact_name_match: share of matched generated names equal byte-for-byte
    // to the true node they map to.
    std::map<std::string, std::string> alias_by_key;
    for (const auto& [gen, tru] : alias_map) alias_by_key[bn::normalize_name(gen).key] = tru;
    auto truth_keys = truth.node_key_set();
    size_t matched_names = 0, exact_names = 0;
    for (const auto& g : generated_nodes) {
        std::string key = bn::normalize_name(g).key;
        std::string true_display;
        if (auto it = alias_by_key.find(key); it != alias_by_key.end())
            true_display = truth.display(bn::normalize_name(it->second).key);
        else if (truth_keys.count(key))
            true_display = truth.display(key);
        else
            continue;
        ++matched_names;
        if (bn::normalize_name(g).display == true_display) ++exact_names;
    }
    if (matched_names > 0)
        report.exact_name_match =
            static_cast<double>(exact_names) / static_cast<double>(matched_names) >=
            exact_match_threshold;

    if (report.generated_count == 0 || truth.edges().empty()) return report;

    auto raw_edges = extract_probe_edges(edges_reply);
    report.generated_edge_count = raw_edges.size();
    report.edge_ratio =
        static_cast<double>(raw_edges.size()) / static_cast<double>(truth.edges().size());

    bn::BayesianNetworkStructure learned("probe");
    for (const auto& node : truth.nodes()) learned.add_node(node.display);
    std::set<bn::DirectedEdge> dedup;
    for (const auto& [from, to] : raw_edges) {
        auto resolve = [&](const std::string& raw) -> std::optional<std::string> {
            std::string key = bn::normalize_name(raw).key;
            if (auto it = alias_by_key.find(key); it != alias_by_key.end())
                return bn::normalize_name(it->second).key;
            if (truth_keys.count(key)) return key;
            return std::nullopt;
        };
        auto f = resolve(from);
        auto t = resolve(to);
        if (!f || !t || *f == *t) continue;
        if (dedup.insert({*f, *t}).second)
            learned.add_edge(truth.display(*f), truth.display(*t));
    }
    report.edge_analysis = metrics::evaluate(learned, truth);
    return report;
}

inline nlohmann::json to_json(const ContaminationReport& r) {
    nlohmann::json j;
    j["generated_nodes"] = r.generated_nodes;
    j["generated_count"] = r.generated_count;
    j["matched_count"] = r.matched_count;
    j["recall"] = r.recall;
    j["exact_name_match"] = r.exact_name_match;
    j["generated_edge_count"] = r.generated_edge_count;
    j["edge_ratio"] = r.edge_ratio;
    if (r.edge_analysis) j["edge_analysis"] = metrics::to_json(*r.edge_analysis);
    return j;
}

/// Loads an analyst alias map file: a JSON object {generated_name: true_name}.
inline std::map<std::string, std::string> load_alias_map(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid alias map JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("alias map must be a JSON object");
    std::map<std::string, std::string> out;
    for (const auto& [gen, tru] : doc.items()) {
        if (!tru.is_string()) throw ParseError("alias map values must be strings");
        out[gen] = tru.get<std::string>();
    }
    return out;
}

} // namespace bnelicit::contam
