#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "bnelicit/bn/cycles.hpp"
#include "bnelicit/delphi/reconcile.hpp"
#include "bnelicit/llm/chat.hpp"
#include "bnelicit/llm/json_extract.hpp"
#include "bnelicit/llm/prompts.hpp"

namespace bnelicit::delphi {

/// Persona generated by the facilitator; initializes one expert's system
/// message. Ids are 1-based (expert_1 .. expert_9).
struct ExpertProfile {
    int id = 0;
    std::string description;
};

/// Everything one expert produced, from raw model pairs to the decycled
/// reconciled edge set.
struct ExpertElicitation {
    ExpertProfile profile;
    llm::ChatConversation conversation;
    std::vector<std::pair<std::string, std::string>> raw_edges;
    std::vector<bn::DirectedEdge> reconciled_edges; // first-seen order, 2-cycle-free after resolution
    std::vector<DroppedEdge> dropped;
    size_t two_cycles_resolved = 0;
    size_t decycle_fallbacks = 0;
    bool refused = false;
    std::string failure; // non-empty when a hard error was downgraded
};

struct VoteOutcome {
    std::map<bn::DirectedEdge, int> vote_counts;
    bn::EdgeSet final_edges;
    std::vector<bn::DirectedEdge> removed_by_repair;
};

struct ElicitationDiagnostics {
    size_t post_vote_cycles_broken = 0;
    size_t experts_refused = 0;
    size_t invented_node_drops = 0;
    size_t two_cycles_resolved = 0;
};

struct ElicitationResult {
    std::vector<ExpertProfile> profiles; // all generated profiles
    std::vector<ExpertElicitation> per_expert;
    std::map<bn::DirectedEdge, int> vote_counts;
    bn::EdgeSet final_edges;
    ElicitationDiagnostics diagnostics;
};

/// Node list rendering used in the expert prompts: "< A >,< B >,< C >".
inline std::string render_node_list(const std::vector<std::string>& displays) {
    std::string out;
    for (size_t i = 0; i < displays.size(); ++i) {
        if (i) out += ",";
        out += "< " + displays[i] + " >";
    }
    return out;
}

namespace delphi_detail {

inline std::vector<ExpertProfile> parse_profiles(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ProfileParseError("profile JSON is not an object");
    std::vector<ExpertProfile> out;
    for (int i = 1; i <= 9; ++i) {
        std::string key = "expert_" + std::to_string(i);
        if (!doc.contains(key) || !doc[key].is_string() || doc[key].get<std::string>().empty())
            throw ProfileParseError("profile JSON missing key \"" + key + "\"");
        out.push_back({i, doc[key].get<std::string>()});
    }
    if (doc.size() != 9)
        throw ProfileParseError("profile JSON must contain exactly the keys expert_1..expert_9");
    return out;
}

} // namespace delphi_detail

/// Facilitator stage: system message plus two prompts; the second reply must
/// be a JSON object with keys expert_1..expert_9. One automatic re-ask is
/// attempted before failing hard.
inline std::vector<ExpertProfile> generate_expert_profiles(llm::ChatBackend& facilitator,
                                                           const std::string& knowledge_area,
                                                           const std::string& bn_task,
                                                           const llm::PromptLibrary& prompts,
                                                           llm::ChatConversation* conversation_out = nullptr) {
    if (knowledge_area.empty() || bn_task.empty())
        throw ConfigError("knowledge area and BN task must be non-empty");
    llm::ChatConversation conv(facilitator.id());
    conv.set_system(prompts.raw("facilitator_system"));
    llm::send(facilitator, conv,
              prompts.render("facilitator_think",
                             {{"knowledge_area", knowledge_area}, {"main_task", bn_task}}));
    const std::string ask = prompts.raw("facilitator_profiles_json");
    std::string reply = llm::send(facilitator, conv, ask);

    auto try_parse = [&](const std::string& text) -> std::vector<ExpertProfile> {
        return delphi_detail::parse_profiles(llm::extract_json_block(text));
    };

    std::vector<ExpertProfile> profiles;
    try {
        profiles = try_parse(reply);
    } catch (const Error&) {
        std::string retry =
            llm::send(facilitator, conv, ask + "\n\nReturn exactly the JSON schema requested");
        try {
            profiles = try_parse(retry);
        } catch (const Error& e) {
            throw ProfileParseError(std::string("facilitator did not return 9 expert profiles: ") +
                                    e.what());
        }
    }
    if (conversation_out) *conversation_out = conv;
    return profiles;
}

/// One expert: fresh conversation carrying the profile, a reasoning prompt,
/// then a JSON summary prompt. A reply without parseable JSON counts as a
/// refusal (empty edge list); malformed pairs are dropped with a reason.
inline ExpertElicitation elicit_expert_structure(llm::ChatBackend& backend,
                                                 const ExpertProfile& profile,
                                                 const std::vector<std::string>& node_displays,
                                                 const llm::PromptLibrary& prompts) {
    if (node_displays.size() < 2)
        throw ConfigError("expert elicitation needs at least two nodes");
    ExpertElicitation out;
    out.profile = profile;
    out.conversation = llm::ChatConversation(backend.id());
    out.conversation.set_system(prompts.render("expert_system", {{"profile", profile.description}}));

    const std::string node_list = render_node_list(node_displays);
    llm::send(backend, out.conversation,
              prompts.render("expert_relations", {{"node_list", node_list}}));
    std::string reply =
        llm::send(backend, out.conversation,
                  prompts.render("expert_summary_json", {{"node_list", node_list}}));

    nlohmann::json pairs;
    try {
        pairs = llm::extract_json_block(reply);
    } catch (const Error&) {
        out.refused = true;
        return out;
    }
    if (!pairs.is_array()) {
        out.dropped.push_back({{pairs.dump(), ""}, "unexpected-json-shape"});
        return out;
    }
    for (const auto& p : pairs) {
        if (p.is_array() && p.size() == 2 && p[0].is_string() && p[1].is_string())
            out.raw_edges.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
        else
            out.dropped.push_back({{p.dump(), ""}, "wrong-arity"});
    }

    auto reconciled = reconcile_node_names(out.raw_edges, node_displays);
    out.reconciled_edges = std::move(reconciled.edges);
    for (auto& d : reconciled.dropped) out.dropped.push_back(std::move(d));
    return out;
}

/// Resolves every 2-cycle in the expert's reconciled edges with the
/// decycling prompt on the same conversation. An unparseable answer (or one
/// naming other nodes) falls back to the direction that appeared first.
inline void resolve_two_cycles(llm::ChatBackend& backend, ExpertElicitation& expert,
                               const std::map<std::string, std::string>& display_by_key,
                               const llm::PromptLibrary& prompts) {
    auto& edges = expert.reconciled_edges;
    std::set<std::pair<std::string, std::string>> handled; // unordered pair, sorted
    for (size_t i = 0; i < edges.size(); ++i) {
        const bn::DirectedEdge first = edges[i];
        auto unordered = std::minmax(first.from, first.to);
        if (handled.count({unordered.first, unordered.second})) continue;
        bn::DirectedEdge reverse{first.to, first.from};
        bool has_reverse = false;
        for (size_t j = i + 1; j < edges.size(); ++j)
            if (edges[j] == reverse) has_reverse = true;
        if (!has_reverse) continue;
        handled.insert({unordered.first, unordered.second});

        const std::string display_a = display_by_key.at(first.from);
        const std::string display_b = display_by_key.at(first.to);
        std::string reply =
            llm::send(backend, expert.conversation,
                      prompts.render("decycling", {{"node_a", display_a}, {"node_b", display_b}}));

        bn::DirectedEdge keep = first; // fallback: first-seen direction
        bool fallback = true;
        try {
            auto j = llm::extract_json_block(reply);
            if (j.is_array() && j.size() == 2 && j[0].is_string() && j[1].is_string()) {
                std::string x = bn::normalize_name(j[0].get<std::string>()).key;
                std::string y = bn::normalize_name(j[1].get<std::string>()).key;
                if ((x == first.from && y == first.to) || (x == first.to && y == first.from)) {
                    keep = bn::DirectedEdge{x, y};
                    fallback = false;
                }
            }
        } catch (const Error&) {
        }
        if (fallback) ++expert.decycle_fallbacks;

        bn::DirectedEdge drop{keep.to, keep.from};
        std::vector<bn::DirectedEdge> kept;
        kept.reserve(edges.size());
        for (const auto& e : edges)
            if (!(e == drop)) kept.push_back(e);
        edges = std::move(kept);
        ++expert.two_cycles_resolved;
        if (edges.size() > i && !(edges[i] == first)) --i; // first direction was dropped
    }
}

/// Majority voting: an edge enters the final structure only when more than
/// half of the experts proposed it. Any cycle that survives voting is
/// repaired by break_cycles with the vote counts as weights.
inline VoteOutcome majority_vote(const std::vector<std::vector<bn::DirectedEdge>>& expert_edge_sets) {
    const size_t n = expert_edge_sets.size();
    if (n == 0 || n % 2 == 0)
        throw ConfigError("majority voting needs an odd number of expert structures, got " +
                          std::to_string(n));
    VoteOutcome out;
    for (const auto& set : expert_edge_sets) {
        std::set<bn::DirectedEdge> dedup(set.begin(), set.end());
        for (const auto& e : set)
            if (dedup.count(bn::DirectedEdge{e.to, e.from}))
                throw ValidationError("expert edge set contains a 2-cycle: " + e.from + " <-> " + e.to);
        for (const auto& e : dedup) ++out.vote_counts[e];
    }
    const size_t threshold = n / 2 + 1; // strictly more than half
    std::map<bn::DirectedEdge, int> winners;
    for (const auto& [e, c] : out.vote_counts)
        if (static_cast<size_t>(c) >= threshold) winners[e] = c;
    bn::EdgeSet final_edges;
    for (const auto& [e, c] : winners) final_edges.insert(e);
    if (bn::has_cycle(final_edges))
        final_edges = bn::break_cycles(winners, &out.removed_by_repair);
    out.final_edges = std::move(final_edges);
    return out;
}

/// Backends used by the pipeline; the facilitator and the experts may be the
/// same model or different ones.
struct DelphiBackends {
    std::shared_ptr<llm::ChatBackend> facilitator;
    std::shared_ptr<llm::ChatBackend> experts;
};

/// Full pipeline: profile generation, independent expert elicitations (up to
/// `parallelism` at a time), per-expert decycling, then majority voting.
/// Individual expert failures downgrade to refusals; facilitator failures
/// propagate.
inline ElicitationResult run_delphi(const DelphiBackends& backends,
                                    const std::vector<std::string>& truth_node_displays,
                                    const std::string& knowledge_area, const std::string& bn_task,
                                    size_t n_experts, const llm::PromptLibrary& prompts,
                                    const std::vector<int>& profile_subset = {},
                                    size_t parallelism = 1) {
    if (n_experts == 0 || n_experts % 2 == 0)
        throw ConfigError("n_experts must be odd, got " + std::to_string(n_experts));
    if (truth_node_displays.size() < 2)
        throw ConfigError("delphi elicitation needs at least two nodes");

    ElicitationResult result;
    result.profiles =
        generate_expert_profiles(*backends.facilitator, knowledge_area, bn_task, prompts);
    if (n_experts > result.profiles.size())
        throw ConfigError("n_experts exceeds the number of generated profiles");

    std::vector<int> ids = profile_subset;
    if (ids.empty())
        for (size_t i = 0; i < n_experts; ++i) ids.push_back(static_cast<int>(i + 1));
    if (ids.size() != n_experts)
        throw ConfigError("profile subset size does not match n_experts");
    std::set<int> uniq(ids.begin(), ids.end());
    if (uniq.size() != ids.size() || *uniq.begin() < 1 ||
        *uniq.rbegin() > static_cast<int>(result.profiles.size()))
        throw ConfigError("profile subset must hold unique ids within the generated profiles");

    std::map<std::string, std::string> display_by_key;
    for (const auto& d : truth_node_displays) display_by_key[bn::normalize_name(d).key] = d;

    if (backends.experts->requires_serial_order()) parallelism = 1;
    parallelism = std::max<size_t>(1, std::min(parallelism, ids.size()));

    result.per_expert.resize(ids.size());
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            size_t idx = cursor.fetch_add(1);
            if (idx >= ids.size()) break;
            const ExpertProfile& profile = result.profiles[static_cast<size_t>(ids[idx] - 1)];
            ExpertElicitation& slot = result.per_expert[idx];
            try {
                slot = elicit_expert_structure(*backends.experts, profile, truth_node_displays,
                                               prompts);
                resolve_two_cycles(*backends.experts, slot, display_by_key, prompts);
            } catch (const std::exception& e) {
                slot = ExpertElicitation{};
                slot.profile = profile;
                slot.refused = true;
                slot.failure = e.what();
            }
        }
    };
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < parallelism; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<std::vector<bn::DirectedEdge>> sets;
    for (const auto& ex : result.per_expert) {
        sets.push_back(ex.reconciled_edges);
        if (ex.refused) ++result.diagnostics.experts_refused;
        result.diagnostics.two_cycles_resolved += ex.two_cycles_resolved;
        for (const auto& d : ex.dropped)
            if (d.reason == "invented-node") ++result.diagnostics.invented_node_drops;
    }
    VoteOutcome vote = majority_vote(sets);
    result.vote_counts = std::move(vote.vote_counts);
    result.final_edges = std::move(vote.final_edges);
    result.diagnostics.post_vote_cycles_broken = vote.removed_by_repair.size();
    return result;
}

/// Deterministic JSON form of a pipeline result (replay-stable: no
/// timestamps, all collections ordered).
inline nlohmann::json to_json(const ElicitationResult& r) {
    nlohmann::json j;
    j["profiles"] = nlohmann::json::array();
    for (const auto& p : r.profiles)
        j["profiles"].push_back({{"id", p.id}, {"description", p.description}});
    j["per_expert"] = nlohmann::json::array();
    for (const auto& ex : r.per_expert) {
        nlohmann::json e;
        e["profile_id"] = ex.profile.id;
        e["refused"] = ex.refused;
        e["two_cycles_resolved"] = ex.two_cycles_resolved;
        e["decycle_fallbacks"] = ex.decycle_fallbacks;
        if (!ex.failure.empty()) e["failure"] = ex.failure;
        e["raw_edges"] = nlohmann::json::array();
        for (const auto& [a, b] : ex.raw_edges) e["raw_edges"].push_back({a, b});
        e["reconciled_edges"] = nlohmann::json::array();
        for (const auto& edge : ex.reconciled_edges)
            e["reconciled_edges"].push_back({edge.from, edge.to});
        e["dropped"] = nlohmann::json::array();
        for (const auto& d : ex.dropped)
            e["dropped"].push_back(
                {{"raw", {d.raw.first, d.raw.second}}, {"reason", d.reason}});
        j["per_expert"].push_back(std::move(e));
    }
    j["vote_counts"] = nlohmann::json::array();
    for (const auto& [edge, count] : r.vote_counts)
        j["vote_counts"].push_back({{"from", edge.from}, {"to", edge.to}, {"votes", count}});
    j["final_edges"] = nlohmann::json::array();
    for (const auto& edge : r.final_edges) j["final_edges"].push_back({edge.from, edge.to});
    j["diagnostics"] = {{"post_vote_cycles_broken", r.diagnostics.post_vote_cycles_broken},
                        {"experts_refused", r.diagnostics.experts_refused},
                        {"invented_node_drops", r.diagnostics.invented_node_drops},
                        {"two_cycles_resolved", r.diagnostics.two_cycles_resolved}};
    return j;
}

} // namespace bnelicit::delphi
