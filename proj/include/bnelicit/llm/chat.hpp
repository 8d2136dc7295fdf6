#pragma once

#include <map>
#include <string>
#include <vector>

#include "bnelicit/bn/structure.hpp" // detail::trim / collapse_ws
#include "bnelicit/errors.hpp"

namespace bnelicit::llm {

enum class Role { system, user, assistant };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

inline Role role_from_name(const std::string& s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    throw ValidationError("unknown chat role: \"" + s + "\"");
}

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Ordered message history bound to one backend. An optional system message
/// sits at position 0; afterwards roles strictly alternate user/assistant.
class ChatConversation {
public:
    ChatConversation() = default;
    explicit ChatConversation(std::string backend_id) : backend_id_(std::move(backend_id)) {}

    const std::vector<ChatMessage>& messages() const { return messages_; }
    const std::string& backend_id() const { return backend_id_; }
    std::map<std::string, std::string>& metadata() { return metadata_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    void set_system(const std::string& content) {
        if (!messages_.empty())
            throw ValidationError("system message must be the first message");
        messages_.push_back({Role::system, content});
    }

    void append(Role role, const std::string& content) {
        if (role == Role::system)
            throw ValidationError("system message must be set before any exchange");
        if (content.empty())
            throw ValidationError("user/assistant message content must be non-empty");
        Role expected = next_role();
        if (role != expected)
            throw ValidationError(std::string("conversation roles must alternate; expected ") +
                                  role_name(expected) + " but got " + role_name(role));
        messages_.push_back({role, content});
    }

    /// Role the next appended message must carry.
    Role next_role() const {
        if (messages_.empty() || messages_.back().role == Role::system) return Role::user;
        return messages_.back().role == Role::user ? Role::assistant : Role::user;
    }

private:
    std::vector<ChatMessage> messages_;
    std::string backend_id_;
    std::map<std::string, std::string> metadata_;
};

/// Anything that can complete a chat. `complete` receives the full history
/// (system message included) and returns the assistant reply text.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string id() const = 0;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
    /// Backends that persist or consume an ordered transcript need callers
    /// to serialize their requests.
    virtual bool requires_serial_order() const { return false; }
};

/// Appends user(prompt), obtains the assistant reply, appends it, returns it.
/// Exactly two messages are added to the conversation.
inline std::string send(ChatBackend& backend, ChatConversation& conversation,
                        const std::string& prompt) {
    if (conversation.next_role() != Role::user)
        throw ValidationError("conversation is waiting for an assistant reply");
    conversation.append(Role::user, prompt);
    std::string reply = backend.complete(conversation.messages());
    if (reply.empty()) reply = " "; // keep the alternation invariant on empty replies
    conversation.append(Role::assistant, reply);
    return reply;
}

/// Whitespace-insensitive comparison key used for replay matching.
inline std::string whitespace_normalized(const std::string& s) {
    return bn::detail::collapse_ws(bn::detail::trim(s));
}

} // namespace bnelicit::llm
