#pragma once

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "tod/gateway.hpp"
#include "tod/retrieval.hpp"

namespace tod {

struct Endpoint {
    std::string base_url;  // e.g. https://host/v1; paths are appended
    std::string model;
    std::string api_key;
    long timeout_s = 120;

    bool operator==(const Endpoint&) const = default;
};

// Wire helpers for the common chat-completions / embeddings protocol.
nlohmann::json chat_request_body(const ChatRequest& request, const std::string& model);
// Throws ContentError on refusal or content filtering, TransportError on a
// malformed body.
ChatReply parse_chat_response(const nlohmann::json& body);

nlohmann::json embedding_request_body(std::span<const std::string> texts, const std::string& model);
// Vectors ordered by the "index" field. Throws TransportError on a malformed body.
std::vector<EmbeddingVector> parse_embedding_response(const nlohmann::json& body,
                                                      std::size_t expected);

// 429 and 5xx are retryable; other non-2xx statuses are not.
bool retryable_status(long status);

class HttpChatProvider : public ChatProvider {
public:
    explicit HttpChatProvider(Endpoint endpoint);
    std::string id() const override;
    ChatReply send(const ChatRequest& request) override;

private:
    Endpoint endpoint_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(Endpoint endpoint);
    std::string id() const override;
    EmbeddingBatch embed(std::span<const std::string> texts) override;

private:
    Endpoint endpoint_;
};

}  // namespace tod
