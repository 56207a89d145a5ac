#include "tod/moderator.hpp"

#include <algorithm>
#include <set>

#include "tod/persona.hpp"
#include "tod/schemas.hpp"

namespace tod {
namespace {

bool cites_only(const std::vector<int>& ids, std::span<const Claim> claims) {
    return std::all_of(ids.begin(), ids.end(), [&](int id) {
        return std::any_of(claims.begin(), claims.end(),
                           [&](const Claim& c) { return c.claim_id == id; });
    });
}

}  // namespace

std::vector<std::string> check_proposal(const SubtopicProposal& proposal,
                                        std::span<const Claim> claims_a,
                                        std::span<const Claim> claims_b) {
    std::vector<std::string> reasons;
    if (proposal.relevant_claims_a.empty() && proposal.relevant_claims_b.empty()) {
        reasons.push_back("cites no contribution from either author");
    }
    if (!cites_only(proposal.relevant_claims_a, claims_a)) {
        reasons.push_back("cites an Author 0 contribution that does not exist");
    }
    if (!cites_only(proposal.relevant_claims_b, claims_b)) {
        reasons.push_back("cites an Author 1 contribution that does not exist");
    }
    return reasons;
}

SubtopicResult generate_subtopics(ChatGateway& gateway, const SubtopicRequest& request, int k,
                                  Transcript& log, const CallTag& tag) {
    if (k < 1) throw PreconditionError("generate_subtopics needs k >= 1");
    if (request.view_a.claims.empty() && request.view_b.claims.empty()) {
        throw PreconditionError("generate_subtopics needs at least one claim");
    }
    auto prompt = render_prompt(TemplateId::mod_generate_topics,
                                {{"topic", request.topic_title},
                                 {"topic_description", request.topic_description},
                                 {"author_0_title", request.paper_a.title},
                                 {"author_0_abstract", request.paper_a.abstract},
                                 {"author_0_contributions",
                                  render_contributions(Side::author_0, request.view_a)},
                                 {"author_1_title", request.paper_b.title},
                                 {"author_1_abstract", request.paper_b.abstract},
                                 {"author_1_contributions",
                                  render_contributions(Side::author_1, request.view_b)},
                                 {"k", std::to_string(k)}});
    SubtopicResult result;
    std::vector<SubtopicProposal> parsed;
    try {
        parsed = gateway
                     .complete_structured(
                         gateway.make_request(TemplateId::mod_generate_topics, std::move(prompt), tag),
                         subtopics_schema(), log)
                     .parsed;
    } catch (const StructuredOutputError& e) {
        result.dropped.push_back(std::string("subtopic reply unusable: ") + e.what());
        log.note(tag, result.dropped.back());
        return result;
    }
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        auto reasons = check_proposal(parsed[i], request.view_a.claims, request.view_b.claims);
        std::string why;
        if (!reasons.empty()) {
            why = reasons.front();
        } else if (static_cast<int>(result.proposals.size()) >= k) {
            why = "beyond the first " + std::to_string(k) + " valid subtopics";
        }
        if (why.empty()) {
            result.proposals.push_back(parsed[i]);
        } else {
            result.dropped.push_back("dropped subtopic " + std::to_string(i) + " \"" +
                                     parsed[i].title + "\": " + why);
            log.note(tag, result.dropped.back());
        }
    }
    return result;
}

ExpansionVerdict judge_expansion(ChatGateway& gateway, const JudgeRequest& request, Transcript& log,
                                 const CallTag& tag) {
    if (!canonical_turns(request.turns)) {
        throw PreconditionError("judge_expansion needs the six debate turns");
    }
    auto prompt = render_prompt(TemplateId::mod_is_expand,
                                {{"topic", request.topic_title},
                                 {"topic_description", request.topic_description},
                                 {"conversation_history", render_conversation_history(request.turns)},
                                 {"previous_arguments", request.previous_arguments},
                                 {"current_arguments", request.current_arguments}});
    try {
        return gateway
            .complete_structured(gateway.make_request(TemplateId::mod_is_expand, std::move(prompt), tag),
                                 expansion_schema(), log)
            .parsed;
    } catch (const StructuredOutputError& e) {
        ExpansionVerdict v;
        v.explanation = std::string("Judge reply unusable; stopping this path. ") + e.what();
        v.progression_of_arguments = false;
        v.meaningful_questions = false;
        v.clear_winner = true;
        v.degraded = true;
        log.note(tag, "expansion verdict degraded to stop");
        return v;
    }
}

std::string render_entering_claims(const DebateInput& a, const DebateInput& b) {
    std::string out;
    auto add = [&](Side side, const DebateInput& in) {
        if (in.claims.empty()) {
            if (!out.empty()) out += "\n";
            out += side_label(side) + ": (no claims)";
        }
        for (const auto& c : in.claims) {
            if (!out.empty()) out += "\n";
            out += side_label(side) + ": " + c.title + ": " + c.description;
        }
    };
    add(Side::author_0, a);
    add(Side::author_1, b);
    return out;
}

std::string render_argument_pair(const std::string& a, const std::string& b) {
    return side_label(Side::author_0) + ": " + a + "\n\n" + side_label(Side::author_1) + ": " + b;
}

std::string render_tree_context(const DebateTree& tree) {
    std::string out;
    for (const auto& id : tree.preorder()) {
        auto n = tree.node(id);
        if (!n.parent || !n.revised_argument_a || !n.revised_argument_b) continue;
        if (!out.empty()) out += "\n\n";
        out += std::string(static_cast<std::size_t>(2 * (n.depth - 1)), ' ');
        out += "Level " + std::to_string(n.depth) + ": \"" + n.title + "\" : \"" + n.description + "\"";
        out += "\nAuthor 0's argument: " + *n.revised_argument_a;
        out += "\nAuthor 1's argument: " + *n.revised_argument_b;
    }
    return out;
}

std::string render_synthesis_prompt(const DebateTree& tree) {
    auto root = tree.node(tree.root_id());
    return render_prompt(TemplateId::mod_summarize, {{"topic", root.title},
                                                     {"author_0_title", tree.paper_a().title},
                                                     {"author_1_title", tree.paper_b().title},
                                                     {"tree", render_tree_context(tree)}});
}

SynthesisResult synthesize(ChatGateway& gateway, const DebateTree& tree, Transcript& log) {
    if (auto issues = audit_tree(tree, true); !issues.empty()) {
        throw PreconditionError("synthesize needs a finished tree: " + issues.front());
    }
    SynthesisResult result;
    result.node_count = static_cast<int>(tree.size());
    result.max_depth_reached = tree.max_depth_reached();
    if (result.node_count == 1) {
        result.summary = std::string(kNoDebateSummary);
        log.note(CallTag{tree.root_id(), ""}, "no debated nodes; synthesis skipped");
        return result;
    }
    auto request = gateway.make_request(TemplateId::mod_summarize, render_synthesis_prompt(tree),
                                        CallTag{tree.root_id(), ""});
    result.summary = gateway.complete(request, log);
    return result;
}

}  // namespace tod
