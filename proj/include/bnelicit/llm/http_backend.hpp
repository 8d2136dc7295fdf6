#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "bnelicit/llm/chat.hpp"

namespace bnelicit::llm {

/// Connection settings for an OpenAI-compatible chat-completions endpoint.
/// The bearer token comes from the LLM_API_KEY environment variable.
struct HttpBackendConfig {
    std::string base_url = "http://localhost:8000";
    std::string model = "gpt-4-0613";
    double temperature = 0.7;
    int max_retries = 3;
    int initial_backoff_ms = 250;
    int timeout_seconds = 120;
};

/// Live backend: POST {base_url}/v1/chat/completions with the full message
/// history. Transient transport/HTTP failures are retried with exponential
/// backoff before turning into a hard error.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {}

    std::string id() const override { return config_.model + "@" + config_.base_url; }

    std::string complete(const std::vector<ChatMessage>& messages) override {
        nlohmann::json payload;
        payload["model"] = config_.model;
        payload["temperature"] = config_.temperature;
        payload["messages"] = nlohmann::json::array();
        for (const auto& m : messages)
            payload["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});

        std::string body = payload.dump();
        std::string last_error;
        int backoff = config_.initial_backoff_ms;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
                backoff *= 2;
            }
            try {
                return post_once(body);
            } catch (const BackendError& e) {
                if (!e.retriable()) throw;
                last_error = e.what();
            }
        }
        throw BackendError("chat completion failed after " + std::to_string(config_.max_retries + 1) +
                               " attempts: " + last_error,
                           /*retriable=*/false);
    }

private:
    std::string post_once(const std::string& body) {
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        httplib::Headers headers;
        if (const char* key = std::getenv("LLM_API_KEY"))
            headers.emplace("Authorization", std::string("Bearer ") + key);

        auto res = client.Post("/v1/chat/completions", headers, body, "application/json");
        if (!res)
            throw BackendError("transport failure: " + httplib::to_string(res.error()));
        if (res->status == 429 || res->status >= 500)
            throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body);
        if (res->status != 200)
            throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body,
                               /*retriable=*/false);
        try {
            auto j = nlohmann::json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("unexpected completion payload: ") + e.what(),
                               /*retriable=*/false);
        }
    }

    HttpBackendConfig config_;
};

} // namespace bnelicit::llm
