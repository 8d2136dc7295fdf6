#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bnelicit/bn/cycles.hpp"
#include "bnelicit/delphi/reconcile.hpp"
#include "bnelicit/llm/chat.hpp"
#include "bnelicit/llm/prompts.hpp"

namespace bnelicit::harness {

/// A variable shown to the Understand prompt: name plus its state labels.
struct Variable {
    std::string name;
    std::vector<std::string> values;
};

/// The three-prompt baseline session and everything extracted from it.
struct HarnessRun {
    llm::ChatConversation conversation;
    std::map<std::string, std::string> node_meanings; // node key (or sentinel) -> meaning text
    std::vector<bn::DirectedEdge> discovered_edges;
    std::vector<bn::DirectedEdge> revised_edges;
    bn::EdgeSet final_edges;
    std::vector<delphi::DroppedEdge> dropped;
    std::vector<std::string> warnings;
    size_t cycles_repaired = 0;
    std::string revision_policy; // "revised" | "kept-discovery"
};

inline constexpr const char* kUnparsedMeaningKey = "__unparsed__";

namespace harness_detail {

inline std::string variable_lines(const std::vector<Variable>& variables) {
    std::string out;
    for (const auto& v : variables) {
        out += "variable " + v.name + ", values ";
        for (size_t i = 0; i < v.values.size(); ++i) {
            if (i) out += ", ";
            out += v.values[i];
        }
        out += "\n";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

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

/// "N. rest" / "N) rest" -> rest; nullopt otherwise.
inline std::optional<std::string> numbered_item(const std::string& line) {
    size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos || !std::isdigit(static_cast<unsigned char>(line[i])))
        return std::nullopt;
    size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j >= line.size() || (line[j] != '.' && line[j] != ')')) return std::nullopt;
    return bn::detail::trim(line.substr(j + 1));
}

} // namespace harness_detail

/// First harness prompt: shows the domain plus one "variable X, values ..."
/// line per variable and stores the deciphered meanings. Splits the reply
/// per variable when it is a numbered enumeration or mentions the names;
/// otherwise the whole reply lands under a sentinel key.
inline std::map<std::string, std::string> run_understand(llm::ChatBackend& backend,
                                                         llm::ChatConversation& conversation,
                                                         const std::string& domain,
                                                         const std::vector<Variable>& variables,
                                                         const llm::PromptLibrary& prompts) {
    for (const auto& v : variables)
        if (v.values.empty())
            throw ConfigError("variable \"" + v.name + "\" has no value list");
    std::string reply = llm::send(
        backend, conversation,
        prompts.render("harness_understand",
                       {{"domain", domain},
                        {"variable_lines", harness_detail::variable_lines(variables)}}));
    if (llm::whitespace_normalized(reply).empty())
        throw UnderstandFailure("Understand step returned an empty reply");

    std::map<std::string, std::string> meanings;
    auto lines = harness_detail::split_lines(reply);
    std::vector<std::string> items;
    for (const auto& line : lines)
        if (auto item = harness_detail::numbered_item(line)) items.push_back(*item);

    if (items.size() == variables.size()) {
        for (size_t i = 0; i < variables.size(); ++i)
            meanings[bn::normalize_name(variables[i].name).key] = items[i];
        return meanings;
    }
    // Fall back to a per-name scan of the reply lines.
    for (const auto& v : variables) {
        std::string needle = bn::normalize_name(v.name).key;
        for (const auto& line : lines) {
            std::string lower = bn::detail::to_lower(line);
            if (lower.find(needle) != std::string::npos) {
                meanings[bn::normalize_name(v.name).key] = bn::detail::trim(line);
                break;
            }
        }
    }
    if (meanings.empty()) meanings[kUnparsedMeaningKey] = reply;
    return meanings;
}

/// Pulls <edge>A→B</edge> regions out of a reply; accepts the closer
/// variants </edge>, <\edge> and <\\edge> and both arrow spellings. A region
/// without a separator is skipped with a warning. Duplicates collapse,
/// first-seen order is kept.
inline std::vector<std::pair<std::string, std::string>> parse_edge_tags(
    const std::string& reply, std::vector<std::string>* warnings = nullptr) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::pair<std::string, std::string>> seen;
    size_t pos = 0;
    const std::string open = "<edge>";
    while ((pos = reply.find(open, pos)) != std::string::npos) {
        size_t begin = pos + open.size();
        size_t end = std::string::npos;
        size_t closer_len = 0;
        for (const char* closer : {"</edge>", "<\\\\edge>", "<\\edge>"}) {
            size_t c = reply.find(closer, begin);
            if (c != std::string::npos && (end == std::string::npos || c < end)) {
                end = c;
                closer_len = std::string(closer).size();
            }
        }
        if (end == std::string::npos) break;
        std::string payload = reply.substr(begin, end - begin);
        pos = end + closer_len;

        size_t arrow = payload.find("→"); // →
        size_t arrow_len = 3;
        if (arrow == std::string::npos) {
            arrow = payload.find("->");
            arrow_len = 2;
        }
        if (arrow == std::string::npos) {
            if (warnings)
                warnings->push_back("edge tag without a separator: \"" + payload + "\"");
            continue;
        }
        std::string from = bn::detail::trim(payload.substr(0, arrow));
        std::string to = bn::detail::trim(payload.substr(arrow + arrow_len));
        if (from.empty() || to.empty()) {
            if (warnings)
                warnings->push_back("edge tag with an empty endpoint: \"" + payload + "\"");
            continue;
        }
        auto pair = std::make_pair(from, to);
        if (seen.insert(pair).second) out.push_back(std::move(pair));
    }
    return out;
}

namespace harness_detail {

/// Whole lines of the form "A -> B" / "A → B" (bullets and numbering
/// stripped) — the shape a revision reply uses when it affirms the list
/// without edge tags.
inline std::vector<std::pair<std::string, std::string>> plain_arrow_lines(const std::string& reply) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (auto line : split_lines(reply)) {
        if (auto item = numbered_item(line)) line = *item;
        line = bn::detail::trim(line);
        if (!line.empty() && (line[0] == '*' || line[0] == '-'))
            line = bn::detail::trim(line.substr(1));
        size_t arrow = line.find("→");
        size_t arrow_len = 3;
        if (arrow == std::string::npos) {
            arrow = line.find("->");
            arrow_len = 2;
        }
        if (arrow == std::string::npos || arrow == 0) continue;
        std::string from = bn::detail::trim(line.substr(0, arrow));
        std::string to = bn::detail::trim(line.substr(arrow + arrow_len));
        if (from.empty() || to.empty()) continue;
        // Reject prose: an affirmed edge line holds nothing but the statement.
        if (to.find(". ") != std::string::npos || to.find(", ") != std::string::npos) continue;
        auto pair = std::make_pair(from, to);
        if (seen.insert(pair).second) out.push_back(std::move(pair));
    }
    return out;
}

} // namespace harness_detail

/// The full three-prompt baseline on one conversation: Understand, Causal
/// Discovery (edge tags), Revision (re-extract; keep the discovery set when
/// the revision reply yields nothing parseable). Ends with cycle repair.
inline HarnessRun run_harness(llm::ChatBackend& backend, const std::string& domain,
                              const std::vector<Variable>& variables,
                              const std::vector<std::string>& truth_node_displays,
                              const llm::PromptLibrary& prompts) {
    HarnessRun run;
    run.conversation = llm::ChatConversation(backend.id());

    run.node_meanings = run_understand(backend, run.conversation, domain, variables, prompts);

    std::string discovery_reply =
        llm::send(backend, run.conversation, prompts.raw("harness_discovery"));
    auto raw_discovered = parse_edge_tags(discovery_reply, &run.warnings);
    auto rec = delphi::reconcile_node_names(raw_discovered, truth_node_displays);
    run.discovered_edges = rec.edges;
    for (auto& d : rec.dropped) run.dropped.push_back(std::move(d));

    std::map<std::string, std::string> display_by_key;
    for (const auto& d : truth_node_displays) display_by_key[bn::normalize_name(d).key] = d;
    std::string edge_lines;
    for (const auto& e : run.discovered_edges)
        edge_lines += display_by_key.at(e.from) + " → " + display_by_key.at(e.to) + "\n";
    if (!edge_lines.empty()) edge_lines.pop_back();

    std::string revision_reply = llm::send(
        backend, run.conversation, prompts.render("harness_revision", {{"edge_lines", edge_lines}}));

    auto raw_revised = parse_edge_tags(revision_reply, &run.warnings);
    if (raw_revised.empty()) raw_revised = harness_detail::plain_arrow_lines(revision_reply);
    std::vector<bn::DirectedEdge> adopted;
    if (!raw_revised.empty()) {
        auto rev = delphi::reconcile_node_names(raw_revised, truth_node_displays);
        for (auto& d : rev.dropped) run.dropped.push_back(std::move(d));
        run.revised_edges = rev.edges;
        adopted = rev.edges;
        run.revision_policy = "revised";
    } else {
        adopted = run.discovered_edges;
        run.revision_policy = "kept-discovery";
        run.warnings.push_back("revision reply held no parseable edges; kept the discovery set");
    }

    std::map<bn::DirectedEdge, int> weighted;
    for (const auto& e : adopted) weighted[e] = 1;
    std::vector<bn::DirectedEdge> removed;
    run.final_edges = bn::break_cycles(weighted, &removed);
    run.cycles_repaired = removed.size();
    return run;
}

inline nlohmann::json to_json(const HarnessRun& r) {
    nlohmann::json j;
    j["node_meanings"] = r.node_meanings;
    auto edges_json = [](const auto& edges) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : edges) arr.push_back({e.from, e.to});
        return arr;
    };
    j["discovered_edges"] = edges_json(r.discovered_edges);
    j["revised_edges"] = edges_json(r.revised_edges);
    j["final_edges"] = edges_json(r.final_edges);
    j["cycles_repaired"] = r.cycles_repaired;
    j["revision_policy"] = r.revision_policy;
    j["warnings"] = r.warnings;
    j["dropped"] = nlohmann::json::array();
    for (const auto& d : r.dropped)
        j["dropped"].push_back({{"raw", {d.raw.first, d.raw.second}}, {"reason", d.reason}});
    return j;
}

} // namespace bnelicit::harness
