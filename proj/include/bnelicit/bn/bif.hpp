#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "bnelicit/bn/cycles.hpp"
#include "bnelicit/bn/structure.hpp"

namespace bnelicit::bn {

namespace bif_detail {

struct Token {
    std::string text;
    int line = 0;
};

inline bool is_word_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) &&
           std::string("{}()|,;[]").find(c) == std::string::npos;
}

/// Splits BIF text into words and single-char delimiters, tracking line
/// numbers. Handles // and /* */ comments and double-quoted strings.
inline std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    int line = 1;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) {
                if (text[i] == '\n') ++line;
                ++i;
            }
            i = (i + 1 < n) ? i + 2 : n;
            continue;
        }
        if (c == '"') {
            size_t j = i + 1;
            while (j < n && text[j] != '"') {
                if (text[j] == '\n') ++line;
                ++j;
            }
            tokens.push_back({text.substr(i + 1, j - i - 1), line});
            i = (j < n) ? j + 1 : n;
            continue;
        }
        if (!is_word_char(c)) {
            tokens.push_back({std::string(1, c), line});
            ++i;
            continue;
        }
        size_t j = i;
        while (j < n && is_word_char(text[j])) ++j;
        tokens.push_back({text.substr(i, j - i), line});
        i = j;
    }
    return tokens;
}

class Cursor {
public:
    explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    bool done() const { return pos_ >= tokens_.size(); }
    const Token& peek() const {
        if (done()) throw ParseError("unexpected end of BIF input", last_line());
        return tokens_[pos_];
    }
    Token next() {
        Token t = peek();
        ++pos_;
        return t;
    }
    Token expect(const std::string& text) {
        Token t = next();
        if (t.text != text)
            throw ParseError("expected \"" + text + "\" but found \"" + t.text + "\"", t.line);
        return t;
    }
    int last_line() const { return tokens_.empty() ? 0 : tokens_.back().line; }

    /// Skips a brace-balanced block starting at the current '{'.
    void skip_block() {
        Token open = expect("{");
        int depth = 1;
        while (depth > 0) {
            Token t = next();
            if (t.text == "{") ++depth;
            if (t.text == "}") --depth;
        }
        (void)open;
    }

private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;
};

} // namespace bif_detail

/// Parses the structure-bearing subset of BIF: `network`, `variable` blocks
/// and `probability ( child | parents )` headers. CPT numbers are tokenized
/// and discarded. Declared state labels are kept on the structure so the
/// Understand step can use them.
inline BayesianNetworkStructure parse_bif(const std::string& text) {
    using namespace bif_detail;
    Cursor cur(tokenize(text));
    BayesianNetworkStructure out;
    std::vector<std::pair<std::string, std::string>> pending_edges; // raw from, to
    std::vector<int> pending_lines;
    std::set<std::string> children_seen;

    while (!cur.done()) {
        Token t = cur.next();
        if (t.text == "network") {
            Token name = cur.next();
            out.set_name(name.text);
            cur.skip_block();
        } else if (t.text == "variable") {
            Token name = cur.next();
            if (name.text == "{")
                throw ParseError("variable declaration without a name", name.line);
            try {
                out.add_node(name.text);
            } catch (const ValidationError& e) {
                throw ParseError(std::string("duplicate variable \"") + name.text + "\"", name.line);
            }
            // variable body: capture `type discrete [ n ] { v1, v2 };`
            cur.expect("{");
            std::vector<std::string> vals;
            int depth = 1;
            while (depth > 0) {
                Token b = cur.next();
                if (b.text == "type") {
                    while (!cur.done() && cur.peek().text != "{" && cur.peek().text != ";") cur.next();
                    if (cur.done() || cur.peek().text == ";") continue;
                    cur.expect("{");
                    while (cur.peek().text != "}") {
                        Token v = cur.next();
                        if (v.text != ",") vals.push_back(v.text);
                    }
                    cur.expect("}");
                    continue;
                }
                if (b.text == "{") ++depth;
                if (b.text == "}") --depth;
            }
            if (!vals.empty()) out.set_values(name.text, vals);
        } else if (t.text == "probability") {
            cur.expect("(");
            Token child = cur.next();
            if (child.text == ")" || child.text == "|")
                throw ParseError("probability block without a child variable", child.line);
            if (!out.has_node(normalize_name(child.text).key))
                throw ParseError("probability block references undeclared variable \"" + child.text + "\"",
                                 child.line);
            std::string child_key = normalize_name(child.text).key;
            if (children_seen.count(child_key))
                throw ParseError("duplicate probability block for variable \"" + child.text + "\"",
                                 child.line);
            children_seen.insert(child_key);
            Token sep = cur.next();
            if (sep.text == "|") {
                while (true) {
                    Token parent = cur.next();
                    if (parent.text == ")") break;
                    if (parent.text == ",") continue;
                    if (!out.has_node(normalize_name(parent.text).key))
                        throw ParseError(
                            "probability block references undeclared variable \"" + parent.text + "\"",
                            parent.line);
                    pending_edges.emplace_back(parent.text, child.text);
                    pending_lines.push_back(parent.line);
                }
            } else if (sep.text != ")") {
                throw ParseError("malformed probability header near \"" + sep.text + "\"", sep.line);
            }
            cur.skip_block(); // CPT content skipped
        } else if (t.text == "property") {
            while (!cur.done() && cur.peek().text != ";") cur.next();
            if (!cur.done()) cur.next();
        } else {
            throw ParseError("unexpected token \"" + t.text + "\"", t.line);
        }
    }

    for (size_t i = 0; i < pending_edges.size(); ++i) {
        try {
            out.add_edge(pending_edges[i].first, pending_edges[i].second);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), pending_lines[i]);
        }
    }
    if (has_cycle(out.edges()))
        throw ParseError("network is not acyclic");
    return out;
}

} // namespace bnelicit::bn
