#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tod/corpus.hpp"

namespace tod {

enum class Side { author_0, author_1 };

std::string_view to_string(Side side);
std::optional<Side> side_from_string(std::string_view name);
inline Side opponent(Side side) { return side == Side::author_0 ? Side::author_1 : Side::author_0; }
// "Author 0" / "Author 1"
std::string side_label(Side side);

// evidence_ids index the evidence list the claim was generated from.
struct Claim {
    int claim_id = 0;
    std::string title;
    std::string description;
    std::vector<int> evidence_ids;

    bool operator==(const Claim&) const = default;
};

struct EvidencePool {
    std::vector<Segment> supporting;
    // Opposing claim_id -> own segments kept against it.
    std::map<int, std::vector<Segment>> counter;
    // Opposing claim_ids with an empty counter list.
    std::set<int> unaddressed;

    bool operator==(const EvidencePool&) const = default;
};

enum class Stage { present, respond, revise };

std::string_view to_string(Stage stage);
std::optional<Stage> stage_from_string(std::string_view name);

struct DebateTurn {
    Side speaker = Side::author_0;
    Stage stage = Stage::present;
    std::string text;

    bool operator==(const DebateTurn&) const = default;
};

// Speaker/stage sequence every debated node follows.
inline constexpr std::pair<Side, Stage> kTurnOrder[6] = {
    {Side::author_0, Stage::present}, {Side::author_1, Stage::present},
    {Side::author_0, Stage::respond}, {Side::author_1, Stage::respond},
    {Side::author_0, Stage::revise},  {Side::author_1, Stage::revise},
};

struct RelevanceVerdict {
    bool supports = false;
    bool refutes = false;
    bool clarifies = false;
    bool irrelevant = true;

    bool operator==(const RelevanceVerdict&) const = default;
};

// Keep iff (supports or refutes or clarifies) and not irrelevant.
inline bool keep_evidence(const RelevanceVerdict& v) {
    return (v.supports || v.refutes || v.clarifies) && !v.irrelevant;
}

struct SubtopicProposal {
    std::string title;
    std::string description;
    std::vector<int> relevant_claims_a;
    std::vector<int> relevant_claims_b;

    bool operator==(const SubtopicProposal&) const = default;
};

struct ExpansionVerdict {
    std::string explanation;
    bool progression_of_arguments = false;
    bool meaningful_questions = false;
    bool clear_winner = true;
    bool degraded = false;  // judge failed; this is the default stop verdict

    bool operator==(const ExpansionVerdict&) const = default;
};

}  // namespace tod
