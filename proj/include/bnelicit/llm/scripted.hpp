#pragma once

#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "bnelicit/llm/chat.hpp"

namespace bnelicit::llm {

/// Deterministic fake backend for tests and offline runs. Rules are matched
/// in order against the current system message and the last user prompt;
/// the first hit wins. A rule may reply with fixed text or a generator.
class ScriptedBackend : public ChatBackend {
public:
    struct Rule {
        std::string system_contains;  // empty = any
        std::string prompt_contains;  // empty = any
        std::string prompt_equals;    // empty = no exact requirement
        std::string reply;
        std::function<std::string(const std::vector<ChatMessage>&)> generator; // optional
    };

    explicit ScriptedBackend(std::string id = "scripted") : id_(std::move(id)) {}

    std::string id() const override { return id_; }

    ScriptedBackend& add_rule(Rule rule) {
        std::lock_guard<std::mutex> lock(mutex_);
        rules_.push_back(std::move(rule));
        return *this;
    }

    /// Shorthand: exact prompt -> reply.
    ScriptedBackend& on_prompt(const std::string& prompt, const std::string& reply) {
        return add_rule({"", "", prompt, reply, nullptr});
    }

    /// Shorthand: substring of prompt -> reply.
    ScriptedBackend& on_prompt_containing(const std::string& fragment, const std::string& reply) {
        return add_rule({"", fragment, "", reply, nullptr});
    }

    /// Shorthand: (system fragment, prompt fragment) -> reply.
    ScriptedBackend& on(const std::string& system_fragment, const std::string& prompt_fragment,
                        const std::string& reply) {
        return add_rule({system_fragment, prompt_fragment, "", reply, nullptr});
    }

    /// Fallback reply when no rule matches (strict error otherwise).
    ScriptedBackend& set_default_reply(const std::string& reply) {
        std::lock_guard<std::mutex> lock(mutex_);
        default_reply_ = reply;
        has_default_ = true;
        return *this;
    }

    std::string complete(const std::vector<ChatMessage>& messages) override {
        std::string system, prompt;
        for (const auto& m : messages)
            if (m.role == Role::system) system = m.content;
        for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
            if (it->role == Role::user) {
                prompt = it->content;
                break;
            }
        }
        std::lock_guard<std::mutex> lock(mutex_);
        for (const auto& r : rules_) {
            if (!r.system_contains.empty() && system.find(r.system_contains) == std::string::npos)
                continue;
            if (!r.prompt_contains.empty() && prompt.find(r.prompt_contains) == std::string::npos)
                continue;
            if (!r.prompt_equals.empty() && prompt != r.prompt_equals) continue;
            if (r.generator) return r.generator(messages);
            return r.reply;
        }
        if (has_default_) return default_reply_;
        throw BackendError("scripted backend has no rule for prompt: " + prompt.substr(0, 120),
                           /*retriable=*/false);
    }

private:
    std::string id_;
    std::vector<Rule> rules_;
    std::string default_reply_;
    bool has_default_ = false;
    mutable std::mutex mutex_;
};

} // namespace bnelicit::llm
