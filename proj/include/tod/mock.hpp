#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tod/gateway.hpp"
#include "tod/retrieval.hpp"

namespace tod {

struct MockChatEntry {
    enum class Failure { none, transport, refusal };

    std::optional<TemplateId> template_id;  // unset matches any template
    std::optional<std::string> node;
    std::optional<std::string> speaker;
    std::string reply;
    int times = 1;
    bool repeat = false;  // never exhausted; used only when no counted entry matches
    Failure fail = Failure::none;
};

struct MockEmbeddingConfig {
    int dimension = 64;
    std::map<std::string, EmbeddingVector> overrides;
};

struct MockScript {
    std::vector<MockChatEntry> chat;
    MockEmbeddingConfig embedding;
};

// YAML document with optional `chat:` and `embedding:` sections.
// Throws ConfigError with the offending entry index.
MockScript parse_mock_script(std::string_view yaml);
MockScript load_mock_script(const std::filesystem::path& path);

// Replies come from the first matching counted entry with uses left, else the
// first matching repeat entry. No match is a non-retryable TransportError.
class ScriptedChatProvider : public ChatProvider {
public:
    explicit ScriptedChatProvider(std::vector<MockChatEntry> entries);

    std::string id() const override { return "mock-chat"; }
    ChatReply send(const ChatRequest& request) override;

    std::size_t call_count() const;
    std::vector<ChatRequest> requests() const;

private:
    mutable std::mutex mutex_;
    std::vector<MockChatEntry> entries_;
    std::vector<int> used_;
    std::vector<ChatRequest> requests_;
};

// Hashed bag-of-words: slot 0 is a constant bias, every lowercase alphanumeric
// token adds 1 to one of the remaining slots. Never a zero vector.
EmbeddingVector hashed_embedding(std::string_view text, int dimension);

class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(MockEmbeddingConfig config = {});

    std::string id() const override { return "mock-embedding"; }
    EmbeddingBatch embed(std::span<const std::string> texts) override;

    std::size_t call_count() const;
    std::vector<std::string> texts_seen() const;

private:
    MockEmbeddingConfig config_;
    mutable std::mutex mutex_;
    std::size_t calls_ = 0;
    std::vector<std::string> seen_;
};

// Whitespace-separated word count; the mock token measure.
int count_words(std::string_view text);

}  // namespace tod
