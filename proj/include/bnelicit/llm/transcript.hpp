#pragma once

#include <chrono>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnelicit/llm/chat.hpp"

namespace bnelicit::llm {

/// One recorded exchange: the full request history and the reply.
struct TranscriptEntry {
    std::vector<ChatMessage> request_messages;
    std::string response_text;
    std::string timestamp; // informational only; replay ignores it
};

inline nlohmann::json to_json(const TranscriptEntry& e) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : e.request_messages)
        msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    return nlohmann::json{{"request_messages", msgs},
                          {"response_text", e.response_text},
                          {"timestamp", e.timestamp}};
}

inline TranscriptEntry transcript_entry_from_json(const nlohmann::json& j) {
    TranscriptEntry e;
    for (const auto& m : j.at("request_messages"))
        e.request_messages.push_back(
            {role_from_name(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    e.response_text = j.at("response_text").get<std::string>();
    if (j.contains("timestamp")) e.timestamp = j.at("timestamp").get<std::string>();
    return e;
}

/// Append-only exchange log, one JSON object per line.
class Transcript {
public:
    Transcript() = default;

    const std::vector<TranscriptEntry>& entries() const { return entries_; }

    void append(TranscriptEntry e) {
        std::lock_guard<std::mutex> lock(mutex_);
        entries_.push_back(std::move(e));
    }

    void save(const std::string& path) const {
        std::lock_guard<std::mutex> lock(mutex_);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write transcript file: " + path);
        for (const auto& e : entries_) out << to_json(e).dump() << "\n";
    }

    static Transcript load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot read transcript file: " + path);
        Transcript t;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (bn::detail::trim(line).empty()) continue;
            try {
                t.entries_.push_back(transcript_entry_from_json(nlohmann::json::parse(line)));
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(std::string("bad transcript entry: ") + e.what(), lineno);
            }
        }
        return t;
    }

private:
    std::vector<TranscriptEntry> entries_;
    mutable std::mutex mutex_;
};

namespace transcript_detail {

inline std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace transcript_detail

/// Wraps a live (or scripted) backend and records every exchange.
class RecordingBackend : public ChatBackend {
public:
    RecordingBackend(std::shared_ptr<ChatBackend> inner, std::shared_ptr<Transcript> transcript)
        : inner_(std::move(inner)), transcript_(std::move(transcript)) {}

    std::string id() const override { return inner_->id() + "+record"; }
    bool requires_serial_order() const override { return true; }

    std::string complete(const std::vector<ChatMessage>& messages) override {
        std::lock_guard<std::mutex> lock(mutex_);
        std::string reply = inner_->complete(messages);
        transcript_->append({messages, reply, transcript_detail::now_iso8601()});
        return reply;
    }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::shared_ptr<Transcript> transcript_;
    std::mutex mutex_;
};

/// Replays a recorded transcript in order. Each request must match the
/// recorded one (role sequence and whitespace-normalized content); template
/// drift therefore breaks replays on purpose.
class ReplayBackend : public ChatBackend {
public:
    explicit ReplayBackend(Transcript transcript, std::string id = "replay")
        : transcript_(std::move(transcript)), id_(std::move(id)) {}

    std::string id() const override { return id_; }
    bool requires_serial_order() const override { return true; }

    std::string complete(const std::vector<ChatMessage>& messages) override {
        std::lock_guard<std::mutex> lock(mutex_);
        if (next_ >= transcript_.entries().size())
            throw ReplayExhausted("replay transcript exhausted after " + std::to_string(next_) +
                                  " exchanges");
        const TranscriptEntry& e = transcript_.entries()[next_];
        if (!matches(e.request_messages, messages)) {
            std::ostringstream msg;
            msg << "replay divergence at exchange " << next_ << ":\n  recorded prompt: "
                << last_user(e.request_messages) << "\n  actual prompt:   " << last_user(messages);
            throw ReplayDivergence(msg.str());
        }
        ++next_;
        return e.response_text;
    }

    size_t consumed() const { return next_; }

private:
    static std::string last_user(const std::vector<ChatMessage>& messages) {
        for (auto it = messages.rbegin(); it != messages.rend(); ++it)
            if (it->role == Role::user) return it->content;
        return "<none>";
    }

    static bool matches(const std::vector<ChatMessage>& recorded,
                        const std::vector<ChatMessage>& actual) {
        if (recorded.size() != actual.size()) return false;
        for (size_t i = 0; i < recorded.size(); ++i) {
            if (recorded[i].role != actual[i].role) return false;
            if (whitespace_normalized(recorded[i].content) != whitespace_normalized(actual[i].content))
                return false;
        }
        return true;
    }

    Transcript transcript_;
    std::string id_;
    size_t next_ = 0;
    std::mutex mutex_;
};

} // namespace bnelicit::llm
