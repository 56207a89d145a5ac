#pragma once

#include <span>
#include <string>
#include <vector>

#include "tod/debate_tree.hpp"
#include "tod/gateway.hpp"

namespace tod {

struct SubtopicRequest {
    std::string topic_title;
    std::string topic_description;
    PaperRecord paper_a;
    PaperRecord paper_b;
    DebateInput view_a;  // author_0's claims, evidence, and author_1's counter-evidence
    DebateInput view_b;
};

struct SubtopicResult {
    std::vector<SubtopicProposal> proposals;  // at most k, reply order
    std::vector<std::string> dropped;          // one reason per rejected proposal
};

// Returns the first k proposals that cite only existing claim ids and at
// least one claim. An unusable reply yields no proposals. Requires at least
// one claim on either side.
SubtopicResult generate_subtopics(ChatGateway& gateway, const SubtopicRequest& request, int k,
                                  Transcript& log, const CallTag& tag);

// Reasons a proposal is invalid against the given claim sets; empty if valid.
std::vector<std::string> check_proposal(const SubtopicProposal& proposal,
                                        std::span<const Claim> claims_a,
                                        std::span<const Claim> claims_b);

struct JudgeRequest {
    std::string topic_title;
    std::string topic_description;
    std::vector<DebateTurn> turns;
    std::string previous_arguments;
    std::string current_arguments;
};

// Requires the six canonical turns. An unusable reply yields the degraded
// stop verdict {progression=false, questions=false, winner=true}.
ExpansionVerdict judge_expansion(ChatGateway& gateway, const JudgeRequest& request,
                                 Transcript& log, const CallTag& tag);

inline bool should_expand(const ExpansionVerdict& v, int depth, int max_depth) {
    return depth < max_depth &&
           (v.progression_of_arguments || v.meaningful_questions || !v.clear_winner);
}

// "Author 0: <title>: <description>" lines for the claims entering a node.
std::string render_entering_claims(const DebateInput& a, const DebateInput& b);
// "Author 0: <text>" blocks for two arguments.
std::string render_argument_pair(const std::string& a, const std::string& b);

// The tree block of the synthesis prompt: every non-root node in preorder
// with its title, description and both revised arguments.
std::string render_tree_context(const DebateTree& tree);
std::string render_synthesis_prompt(const DebateTree& tree);

struct SynthesisResult {
    std::string summary;
    int node_count = 0;
    int max_depth_reached = 0;
};

inline constexpr std::string_view kNoDebateSummary =
    "No debate took place: neither paper produced claims about the topic, so there is nothing to "
    "compare.";

// Requires a finished tree. With no debated node the summary is
// kNoDebateSummary and no provider call is made.
SynthesisResult synthesize(ChatGateway& gateway, const DebateTree& tree, Transcript& log);

}  // namespace tod
