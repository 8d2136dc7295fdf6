#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bnelicit/errors.hpp"

namespace bnelicit::llm {

namespace extract_detail {

/// Content of the first ``` fence whose label matches `label` (empty label =
/// any fence). The opening fence need not be followed by a newline.
inline std::optional<std::string> fenced_block(const std::string& reply, const std::string& label) {
    size_t pos = 0;
    while ((pos = reply.find("```", pos)) != std::string::npos) {
        size_t lang_begin = pos + 3;
        size_t lang_end = lang_begin;
        while (lang_end < reply.size() &&
               (std::isalnum(static_cast<unsigned char>(reply[lang_end])) || reply[lang_end] == '_'))
            ++lang_end;
        std::string lang = reply.substr(lang_begin, lang_end - lang_begin);
        size_t body_begin = lang_end;
        if (body_begin < reply.size() && reply[body_begin] == '\r') ++body_begin;
        if (body_begin < reply.size() && reply[body_begin] == '\n') ++body_begin;
        size_t close = reply.find("```", body_begin);
        if (close == std::string::npos) return std::nullopt;
        if (label.empty() || lang == label)
            return reply.substr(body_begin, close - body_begin);
        pos = close + 3;
    }
    return std::nullopt;
}

/// First balanced top-level [...] or {...} region, honoring strings and
/// escapes.
inline std::optional<std::string> balanced_region(const std::string& text) {
    size_t start = text.find_first_of("[{");
    while (start != std::string::npos) {
        char open = text[start];
        char close = open == '[' ? ']' : '}';
        int depth = 0;
        bool in_string = false;
        for (size_t i = start; i < text.size(); ++i) {
            char c = text[i];
            if (in_string) {
                if (c == '\\') ++i;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == open) ++depth;
            else if (c == close) {
                --depth;
                if (depth == 0) return text.substr(start, i - start + 1);
            }
        }
        start = text.find_first_of("[{", start + 1);
    }
    return std::nullopt;
}

/// Drops commas that directly precede a closing bracket (outside strings).
inline std::string strip_trailing_commas(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < text.size()) out.push_back(text[++i]);
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
            out.push_back(c);
            continue;
        }
        if (c == ',') {
            size_t j = i + 1;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && (text[j] == ']' || text[j] == '}')) continue; // drop it
        }
        out.push_back(c);
    }
    return out;
}

} // namespace extract_detail

/// Pulls the first JSON value out of a model reply. Candidates in order: a
/// fenced block labeled json, any fenced block, the first balanced top-level
/// bracket region. Tolerates trailing commas.
inline nlohmann::json extract_json_block(const std::string& reply) {
    std::optional<std::string> candidate = extract_detail::fenced_block(reply, "json");
    if (!candidate) candidate = extract_detail::fenced_block(reply, "");
    if (!candidate) candidate = extract_detail::balanced_region(reply);
    if (!candidate) throw NoJsonError("reply contains no JSON candidate region");

    std::string text = extract_detail::strip_trailing_commas(*candidate);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        // A fenced block may wrap the JSON in prose; fall back to the first
        // balanced region inside the candidate before giving up.
        auto inner = extract_detail::balanced_region(*candidate);
        if (inner) {
            try {
                return nlohmann::json::parse(extract_detail::strip_trailing_commas(*inner));
            } catch (const nlohmann::json::parse_error&) {
            }
        }
        throw MalformedJsonError("JSON candidate region does not parse", *candidate);
    }
}

} // namespace bnelicit::llm
