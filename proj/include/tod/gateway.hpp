#pragma once

#include <functional>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tod/error.hpp"
#include "tod/prompts.hpp"
#include "tod/retry.hpp"
#include "tod/transcript.hpp"

namespace tod {

struct SamplingProfile {
    TemplateId task = TemplateId::mod_summarize;
    double temperature = 0.0;
    double nucleus_mass = 0.99;
    int max_tokens = 1024;

    bool operator==(const SamplingProfile&) const = default;
};

// Per-task sampling settings. Baseline tasks default to the summarization
// temperature.
class SamplingTable {
public:
    SamplingTable();

    const SamplingProfile& get(TemplateId task) const;
    // Throws ConfigError when temperature is outside [0, 0.5], nucleus mass
    // outside (0, 1] or max_tokens < 1.
    void set(const SamplingProfile& profile);

    std::vector<SamplingProfile> all() const;
    bool operator==(const SamplingTable&) const = default;

private:
    std::map<TemplateId, SamplingProfile> profiles_;
};

double default_temperature(TemplateId task);
inline constexpr double kDefaultNucleusMass = 0.99;
inline constexpr int kDefaultMaxTokens = 1024;

struct ChatRequest {
    TemplateId template_id = TemplateId::mod_summarize;
    std::string prompt;
    SamplingProfile profile;
    CallTag tag;
};

struct ChatReply {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    long latency_ms = 0;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string id() const = 0;
    // Throws TransportError (retryable or not) or ContentError on refusal.
    virtual ChatReply send(const ChatRequest& request) = 0;
};

template <class Record>
struct Schema {
    std::string id;
    // Throws ValidationError on any violation.
    std::function<Record(const nlohmann::json&)> parse;
};

template <class Record>
struct StructuredReply {
    std::string raw_text;
    Record parsed;
    int repair_attempts = 0;
};

struct GatewayOptions {
    RetryPolicy retry;
    int max_in_flight = 4;
    int repair_rounds = 2;
};

// Extracts the JSON value from a reply: the first ``` fenced block when one is
// present, otherwise the whole trimmed reply. Throws ValidationError.
nlohmann::json extract_json(std::string_view reply);

// Prompt used for a repair round.
std::string repair_prompt(std::string_view original, std::string_view bad_reply,
                          std::string_view error);

class ChatGateway {
public:
    ChatGateway(std::shared_ptr<ChatProvider> provider, SamplingTable sampling,
                GatewayOptions options = {});

    ChatRequest make_request(TemplateId template_id, std::string prompt, CallTag tag = {}) const;

    // Sends with transport retries and records the call in `log`.
    std::string complete(const ChatRequest& request, Transcript& log);

    // Parse, validate, and on failure re-prompt with the validation error up
    // to `repair_rounds` times. Throws StructuredOutputError with every raw
    // attempt when the budget is exhausted.
    template <class Record>
    StructuredReply<Record> complete_structured(const ChatRequest& request,
                                                const Schema<Record>& schema, Transcript& log) {
        std::vector<std::string> attempts;
        ChatRequest current = request;
        std::string last_error;
        for (int round = 0; round <= options_.repair_rounds; ++round) {
            std::string raw = send_and_record(current, log, round);
            attempts.push_back(raw);
            try {
                return StructuredReply<Record>{raw, schema.parse(extract_json(raw)), round};
            } catch (const ValidationError& e) {
                last_error = e.what();
                current.prompt = repair_prompt(request.prompt, raw, last_error);
            }
        }
        throw StructuredOutputError("no valid " + schema.id + " reply after " +
                                        std::to_string(attempts.size()) +
                                        " attempts; last error: " + last_error,
                                    std::move(attempts));
    }

    const SamplingTable& sampling() const { return sampling_; }
    const ChatProvider& provider() const { return *provider_; }

private:
    std::string send_and_record(const ChatRequest& request, Transcript& log, int repair_round);

    std::shared_ptr<ChatProvider> provider_;
    SamplingTable sampling_;
    GatewayOptions options_;
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace tod
