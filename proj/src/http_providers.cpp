#include "tod/http_providers.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>

#include <curl/curl.h>

namespace tod {
namespace {

using nlohmann::json;

std::size_t collect(char* data, std::size_t size, std::size_t count, void* out) {
    static_cast<std::string*>(out)->append(data, size * count);
    return size * count;
}

struct HttpResult {
    long status = 0;
    std::string body;
    long latency_ms = 0;
};

std::string join_url(const std::string& base, const std::string& path) {
    if (!base.empty() && base.back() == '/') return base + path.substr(1);
    return base + path;
}

HttpResult post_json(const Endpoint& endpoint, const std::string& path, const json& payload) {
    static std::once_flag init;
    std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });

    if (endpoint.base_url.empty()) throw TransportError("no endpoint URL configured", false);
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) throw TransportError("could not initialize libcurl", false);

    std::string url = join_url(endpoint.base_url, path);
    std::string body = payload.dump();
    HttpResult result;

    curl_slist* headers = curl_slist_append(nullptr, "Content-Type: application/json");
    if (!endpoint.api_key.empty()) {
        headers = curl_slist_append(headers, ("Authorization: Bearer " + endpoint.api_key).c_str());
    }
    std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> header_guard(headers,
                                                                             curl_slist_free_all);

    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_HTTPHEADER, headers);
    curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDS, body.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_POSTFIELDSIZE, static_cast<long>(body.size()));
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, collect);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &result.body);
    curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, endpoint.timeout_s);
    curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);

    auto start = std::chrono::steady_clock::now();
    CURLcode rc = curl_easy_perform(curl.get());
    result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (rc != CURLE_OK) {
        throw TransportError("POST " + url + ": " + curl_easy_strerror(rc), true);
    }
    curl_easy_getinfo(curl.get(), CURLINFO_RESPONSE_CODE, &result.status);
    if (result.status < 200 || result.status >= 300) {
        throw TransportError("POST " + url + " returned HTTP " + std::to_string(result.status) +
                                 ": " + result.body.substr(0, 500),
                             retryable_status(result.status));
    }
    return result;
}

json parse_body(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw TransportError(std::string("provider returned invalid JSON: ") + e.what(), false);
    }
}

}  // namespace

bool retryable_status(long status) { return status == 429 || status >= 500; }

json chat_request_body(const ChatRequest& request, const std::string& model) {
    return json{
        {"model", model},
        {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.profile.temperature},
        {"top_p", request.profile.nucleus_mass},
        {"max_tokens", request.profile.max_tokens},
    };
}

ChatReply parse_chat_response(const json& body) {
    if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array() ||
        body["choices"].empty()) {
        throw TransportError("chat response has no choices", false);
    }
    const auto& choice = body["choices"][0];
    if (choice.value("finish_reason", json()).is_string() &&
        choice["finish_reason"] == "content_filter") {
        throw ContentError("provider filtered the reply");
    }
    if (!choice.contains("message") || !choice["message"].is_object()) {
        throw TransportError("chat response choice has no message", false);
    }
    const auto& message = choice["message"];
    if (message.contains("refusal") && message["refusal"].is_string()) {
        throw ContentError("provider refused: " + message["refusal"].get<std::string>());
    }
    if (!message.contains("content") || !message["content"].is_string()) {
        throw TransportError("chat response message has no text content", false);
    }
    ChatReply reply;
    reply.text = message["content"].get<std::string>();
    if (body.contains("usage") && body["usage"].is_object()) {
        reply.prompt_tokens = body["usage"].value("prompt_tokens", 0);
        reply.completion_tokens = body["usage"].value("completion_tokens", 0);
    }
    return reply;
}

json embedding_request_body(std::span<const std::string> texts, const std::string& model) {
    return json{{"model", model}, {"input", json(std::vector<std::string>(texts.begin(), texts.end()))}};
}

std::vector<EmbeddingVector> parse_embedding_response(const json& body, std::size_t expected) {
    if (!body.is_object() || !body.contains("data") || !body["data"].is_array()) {
        throw TransportError("embedding response has no data list", false);
    }
    const auto& data = body["data"];
    if (data.size() != expected) {
        throw TransportError("embedding response has " + std::to_string(data.size()) +
                                 " items for " + std::to_string(expected) + " inputs",
                             false);
    }
    std::vector<EmbeddingVector> out(expected);
    std::vector<bool> seen(expected, false);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& item = data[i];
        std::size_t index = i;
        if (item.contains("index")) {
            const auto& raw = item["index"];
            if (!raw.is_number_integer() || raw.get<long long>() < 0) {
                throw TransportError("embedding item has a bad index", false);
            }
            index = static_cast<std::size_t>(raw.get<long long>());
        }
        if (index >= expected || seen[index]) {
            throw TransportError("embedding item index " + std::to_string(index) + " is invalid",
                                 false);
        }
        if (!item.contains("embedding") || !item["embedding"].is_array()) {
            throw TransportError("embedding item has no vector", false);
        }
        for (const auto& x : item["embedding"]) {
            if (!x.is_number()) throw TransportError("embedding vector holds a non-number", false);
            out[index].values.push_back(x.get<double>());
        }
        seen[index] = true;
    }
    return out;
}

HttpChatProvider::HttpChatProvider(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string HttpChatProvider::id() const { return "http:" + endpoint_.model; }

ChatReply HttpChatProvider::send(const ChatRequest& request) {
    auto result = post_json(endpoint_, "/chat/completions", chat_request_body(request, endpoint_.model));
    auto reply = parse_chat_response(parse_body(result.body));
    reply.latency_ms = result.latency_ms;
    return reply;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string HttpEmbeddingProvider::id() const { return "http:" + endpoint_.model; }

EmbeddingBatch HttpEmbeddingProvider::embed(std::span<const std::string> texts) {
    auto result = post_json(endpoint_, "/embeddings", embedding_request_body(texts, endpoint_.model));
    return EmbeddingBatch{parse_embedding_response(parse_body(result.body), texts.size()),
                          result.latency_ms};
}

}  // namespace tod
