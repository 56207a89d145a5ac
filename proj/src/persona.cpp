#include "tod/persona.hpp"

#include <algorithm>

#include "tod/schemas.hpp"

namespace tod {
namespace {

bool has_turn(std::span<const DebateTurn> history, Side speaker, Stage stage) {
    return std::any_of(history.begin(), history.end(), [&](const DebateTurn& t) {
        return t.speaker == speaker && t.stage == stage;
    });
}

Bindings persona_bindings(const DebateContext& ctx) {
    return {
        {"paper_title", ctx.self.paper.title},
        {"paper_abstract", ctx.self.paper.abstract},
        {"opposition_title", ctx.opposition.title},
        {"opposition_abstract", ctx.opposition.abstract},
        {"topic", ctx.topic_title},
        {"topic_description", ctx.topic_description},
        {"contributions", render_contributions(ctx.self.side, ctx.input)},
    };
}

CallTag speaker_tag(const CallTag& tag, Side side) {
    return CallTag{tag.node_id, std::string(to_string(side))};
}

DebateTurn speak(ChatGateway& gateway, const DebateContext& ctx, TemplateId id, Stage stage,
                 Bindings bindings, Transcript& log, const CallTag& tag) {
    auto prompt = render_prompt(id, bindings);
    auto text = gateway.complete(gateway.make_request(id, std::move(prompt), tag), log);
    return DebateTurn{ctx.self.side, stage, std::move(text)};
}

}  // namespace

RetrievalSource::RetrievalSource(std::vector<Segment> segments, EmbeddingService& service)
    : segments_(std::move(segments)), service_(service) {}

void RetrievalSource::prepare(Transcript& log, const CallTag& tag) {
    if (prepared_) return;
    prepared_ = true;
    if (segments_.empty()) return;
    std::vector<std::string> texts;
    for (const auto& s : segments_) texts.push_back(s.text);
    auto vectors = service_.embed_texts(texts, log, tag);
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        pool_.push_back(PoolEntry{segments_[i], std::move(vectors[i])});
    }
}

std::vector<Segment> RetrievalSource::retrieve(const std::string& query, int delta,
                                               Transcript& log, const CallTag& tag) {
    prepare(log, tag);
    if (pool_.empty()) return {};
    std::vector<std::string> texts{query};
    auto q = service_.embed_texts(texts, log, tag);
    std::vector<Segment> out;
    for (auto& ranked : top_delta(q.front(), pool_, delta)) out.push_back(std::move(ranked.segment));
    return out;
}

FixedContextSource::FixedContextSource(const PaperRecord& paper) {
    int id = 0;
    for (const auto* text : {&paper.title, &paper.abstract, &paper.introduction}) {
        blocks_.push_back(Segment{id++, paper.paper_id, normalize_whitespace(*text), 1});
    }
}

std::vector<Segment> FixedContextSource::retrieve(const std::string&, int delta, Transcript&,
                                                  const CallTag&) {
    if (delta < 1) throw PreconditionError("delta must be at least 1");
    auto keep = std::min(blocks_.size(), static_cast<std::size_t>(delta));
    return {blocks_.begin(), blocks_.begin() + static_cast<std::ptrdiff_t>(keep)};
}

std::string render_evidence_list(std::span<const Segment> evidence) {
    std::string out;
    for (std::size_t i = 0; i < evidence.size(); ++i) {
        if (i) out += "\n";
        out += "Evidence #" + std::to_string(i) + ": " + evidence[i].text;
    }
    return out;
}

std::vector<Claim> generate_claims(ChatGateway& gateway, const Persona& persona,
                                   const std::string& topic, std::span<const Segment> evidence,
                                   int k, Transcript& log, const CallTag& tag) {
    if (k < 1) throw PreconditionError("generate_claims needs k >= 1");
    if (evidence.empty()) {
        log.note(tag, "no evidence retrieved; persona enters the debate without claims");
        return {};
    }
    auto prompt = render_prompt(TemplateId::persona_generate_arguments,
                                {{"paper_title", persona.paper.title},
                                 {"paper_abstract", persona.paper.abstract},
                                 {"topic", topic},
                                 {"evidence", render_evidence_list(evidence)},
                                 {"k", std::to_string(k)}});
    auto request = gateway.make_request(TemplateId::persona_generate_arguments, std::move(prompt), tag);
    try {
        return gateway.complete_structured(request, arguments_schema(evidence.size(), k), log).parsed;
    } catch (const StructuredOutputError& e) {
        log.note(tag, std::string("claim generation failed; persona has no claims: ") + e.what());
        return {};
    }
}

RelevanceVerdict classify_relevance(ChatGateway& gateway, const Segment& segment,
                                    const Claim& claim, Transcript& log, const CallTag& tag) {
    auto prompt = render_prompt(TemplateId::persona_relevance, {{"claim", claim.title},
                                                                {"claim_description", claim.description},
                                                                {"evidence", segment.text}});
    auto request = gateway.make_request(TemplateId::persona_relevance, std::move(prompt), tag);
    try {
        return gateway.complete_structured(request, relevance_schema(), log).parsed;
    } catch (const StructuredOutputError& e) {
        log.note(tag, "relevance verdict unusable for segment " + std::to_string(segment.segment_id) +
                          "; treated as irrelevant: " + e.what());
        return RelevanceVerdict{};
    }
}

Preemption preempt(ChatGateway& gateway, EvidenceSource& own_source,
                   std::span<const Claim> opposing_claims, int delta, Transcript& log,
                   const CallTag& tag) {
    Preemption result;
    for (const auto& claim : opposing_claims) {
        auto& kept = result.counter[claim.claim_id];
        try {
            auto query = format_topic_query(claim.title, claim.description);
            for (const auto& segment : own_source.retrieve(query, delta, log, tag)) {
                if (keep_evidence(classify_relevance(gateway, segment, claim, log, tag))) {
                    kept.push_back(segment);
                }
            }
        } catch (const TransportError& e) {
            kept.clear();
            log.note(tag, "preemption of claim " + std::to_string(claim.claim_id) +
                              " failed: " + e.what());
        } catch (const ContentError& e) {
            kept.clear();
            log.note(tag, "preemption of claim " + std::to_string(claim.claim_id) +
                              " failed: " + e.what());
        }
        if (kept.empty()) result.unaddressed.insert(claim.claim_id);
    }
    return result;
}

std::string render_contributions(Side side, const DebateInput& input) {
    if (input.claims.empty()) return "(none)";
    auto self = side_label(side);
    auto other = side_label(opponent(side));
    std::string out;
    for (const auto& claim : input.claims) {
        auto id = std::to_string(claim.claim_id);
        if (!out.empty()) out += "\n\n";
        out += self + " Paper's Contribution #" + id + ": " + claim.title + ": " + claim.description;
        out += "\n" + self + " Paper's Contribution Evidence #" + id + ":";
        for (int e : claim.evidence_ids) {
            if (e >= 0 && static_cast<std::size_t>(e) < input.evidence.size()) {
                out += "\n- " + input.evidence[static_cast<std::size_t>(e)].text;
            }
        }
        out += "\n" + other + "'s relevant evidence to potentially counter the quality of this contribution:";
        auto it = input.counter.find(claim.claim_id);
        if (it == input.counter.end() || it->second.empty()) {
            out += "\n- (none)";
        } else {
            for (const auto& s : it->second) out += "\n- " + s.text;
        }
    }
    return out;
}

std::string render_conversation_history(std::span<const DebateTurn> turns) {
    std::string out;
    for (const auto& t : turns) {
        if (!out.empty()) out += "\n\n";
        out += side_label(t.speaker) + " (" + std::string(to_string(t.stage)) + "): " + t.text;
    }
    return out;
}

DebateTurn present_argument(ChatGateway& gateway, const DebateContext& ctx, Transcript& log,
                            const CallTag& tag) {
    return speak(gateway, ctx, TemplateId::persona_present, Stage::present, persona_bindings(ctx),
                 log, tag);
}

DebateTurn respond_to(ChatGateway& gateway, const DebateContext& ctx,
                      std::span<const DebateTurn> history, Transcript& log, const CallTag& tag) {
    if (!has_turn(history, opponent(ctx.self.side), Stage::present)) {
        throw PreconditionError("respond_to needs the opposition's present turn in the history");
    }
    auto bindings = persona_bindings(ctx);
    bindings["conversation_history"] = render_conversation_history(history);
    return speak(gateway, ctx, TemplateId::persona_respond, Stage::respond, std::move(bindings), log,
                 tag);
}

DebateTurn revise_argument(ChatGateway& gateway, const DebateContext& ctx,
                           std::span<const DebateTurn> history, Transcript& log, const CallTag& tag) {
    if (!has_turn(history, Side::author_0, Stage::respond) ||
        !has_turn(history, Side::author_1, Stage::respond)) {
        throw PreconditionError("revise_argument needs both respond turns in the history");
    }
    auto bindings = persona_bindings(ctx);
    bindings["conversation_history"] = render_conversation_history(history);
    return speak(gateway, ctx, TemplateId::persona_revise, Stage::revise, std::move(bindings), log,
                 tag);
}

std::vector<DebateTurn> run_debate(ChatGateway& gateway, const DebateContext& a,
                                   const DebateContext& b, Transcript& log,
                                   const std::string& node_id) {
    if (a.self.side != Side::author_0 || b.self.side != Side::author_1) {
        throw PreconditionError("run_debate takes author_0 then author_1");
    }
    CallTag tag{node_id, ""};
    std::vector<DebateTurn> turns;
    turns.push_back(present_argument(gateway, a, log, speaker_tag(tag, Side::author_0)));
    turns.push_back(present_argument(gateway, b, log, speaker_tag(tag, Side::author_1)));
    std::vector<DebateTurn> presents = turns;
    turns.push_back(respond_to(gateway, a, presents, log, speaker_tag(tag, Side::author_0)));
    turns.push_back(respond_to(gateway, b, presents, log, speaker_tag(tag, Side::author_1)));
    std::vector<DebateTurn> exchanged = turns;
    turns.push_back(revise_argument(gateway, a, exchanged, log, speaker_tag(tag, Side::author_0)));
    turns.push_back(revise_argument(gateway, b, exchanged, log, speaker_tag(tag, Side::author_1)));
    return turns;
}

}  // namespace tod
