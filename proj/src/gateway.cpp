#include "tod/gateway.hpp"

#include <algorithm>
#include <cctype>

namespace tod {

double default_temperature(TemplateId task) {
    switch (task) {
        case TemplateId::persona_generate_arguments: return 0.3;
        case TemplateId::persona_relevance: return 0.0;
        case TemplateId::persona_present: return 0.1;
        case TemplateId::persona_respond: return 0.4;
        case TemplateId::persona_revise: return 0.4;
        case TemplateId::mod_generate_topics: return 0.3;
        case TemplateId::mod_is_expand: return 0.1;
        case TemplateId::mod_summarize: return 0.4;
        case TemplateId::baseline_single_stage:
        case TemplateId::baseline_paper_summary:
        case TemplateId::baseline_contrastive_summary: return 0.4;
    }
    return 0.0;
}

SamplingTable::SamplingTable() {
    auto add = [this](TemplateId id) {
        profiles_[id] = SamplingProfile{id, default_temperature(id), kDefaultNucleusMass,
                                        kDefaultMaxTokens};
    };
    for (auto id : debate_templates()) add(id);
    for (auto id : baseline_templates()) add(id);
}

const SamplingProfile& SamplingTable::get(TemplateId task) const { return profiles_.at(task); }

void SamplingTable::set(const SamplingProfile& profile) {
    auto name = std::string(to_string(profile.task));
    if (!(profile.temperature >= 0.0 && profile.temperature <= 0.5)) {
        throw ConfigError("temperature for " + name + " must be within [0, 0.5]");
    }
    if (!(profile.nucleus_mass > 0.0 && profile.nucleus_mass <= 1.0)) {
        throw ConfigError("nucleus_mass for " + name + " must be within (0, 1]");
    }
    if (profile.max_tokens < 1) throw ConfigError("max_tokens for " + name + " must be positive");
    profiles_[profile.task] = profile;
}

std::vector<SamplingProfile> SamplingTable::all() const {
    std::vector<SamplingProfile> out;
    for (const auto& [id, profile] : profiles_) out.push_back(profile);
    return out;
}

nlohmann::json extract_json(std::string_view reply) {
    std::string_view body = reply;
    if (auto open = reply.find("```"); open != std::string_view::npos) {
        auto line_end = reply.find('\n', open);
        if (line_end == std::string_view::npos) throw ValidationError("unterminated fenced block");
        auto close = reply.find("```", line_end + 1);
        if (close == std::string_view::npos) throw ValidationError("unterminated fenced block");
        body = reply.substr(line_end + 1, close - line_end - 1);
    }
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
    if (body.empty()) throw ValidationError("reply contains no JSON data");
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("reply is not valid JSON: ") + e.what());
    }
}

std::string repair_prompt(std::string_view original, std::string_view bad_reply,
                          std::string_view error) {
    std::string out(original);
    out += "\n\nYour previous reply was:\n~~~~\n";
    out += bad_reply;
    out += "\n~~~~\n\nThat reply could not be used: ";
    out += error;
    out += "\nReply again with a corrected single JSON object inside one ```json fenced block and "
           "nothing else.\n";
    return out;
}

ChatGateway::ChatGateway(std::shared_ptr<ChatProvider> provider, SamplingTable sampling,
                         GatewayOptions options)
    : provider_(std::move(provider)),
      sampling_(std::move(sampling)),
      options_(options),
      in_flight_(std::make_unique<std::counting_semaphore<>>(std::max(1, options.max_in_flight))) {}

ChatRequest ChatGateway::make_request(TemplateId template_id, std::string prompt,
                                      CallTag tag) const {
    return ChatRequest{template_id, std::move(prompt), sampling_.get(template_id), std::move(tag)};
}

std::string ChatGateway::complete(const ChatRequest& request, Transcript& log) {
    return send_and_record(request, log, 0);
}

std::string ChatGateway::send_and_record(const ChatRequest& request, Transcript& log,
                                         int repair_round) {
    ChatReply reply;
    {
        in_flight_->acquire();
        struct Release {
            std::counting_semaphore<>* s;
            ~Release() { s->release(); }
        } release{in_flight_.get()};
        reply = with_retries(options_.retry,
                             "chat provider " + provider_->id() + " (" +
                                 std::string(to_string(request.template_id)) + ")",
                             [&] { return provider_->send(request); });
    }
    TranscriptEntry entry;
    entry.kind = TranscriptEntry::Kind::chat;
    entry.tag = request.tag;
    entry.template_id = std::string(to_string(request.template_id));
    entry.prompt = request.prompt;
    entry.reply = reply.text;
    entry.temperature = request.profile.temperature;
    entry.nucleus_mass = request.profile.nucleus_mass;
    entry.max_tokens = request.profile.max_tokens;
    entry.prompt_tokens = reply.prompt_tokens;
    entry.completion_tokens = reply.completion_tokens;
    entry.latency_ms = reply.latency_ms;
    entry.repair_round = repair_round;
    log.append(std::move(entry));
    return reply.text;
}

}  // namespace tod
