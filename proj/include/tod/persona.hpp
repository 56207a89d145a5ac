#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tod/debate_tree.hpp"
#include "tod/debate_types.hpp"
#include "tod/gateway.hpp"
#include "tod/retrieval.hpp"

namespace tod {

struct Persona {
    Side side = Side::author_0;
    PaperRecord paper;
};

// Where a persona's evidence comes from.
class EvidenceSource {
public:
    virtual ~EvidenceSource() = default;
    // Best segments for `query`, best first, at most `delta` of them.
    virtual std::vector<Segment> retrieve(const std::string& query, int delta, Transcript& log,
                                          const CallTag& tag) = 0;
};

// Ranks a paper's segments by cosine similarity to the embedded query.
class RetrievalSource : public EvidenceSource {
public:
    RetrievalSource(std::vector<Segment> segments, EmbeddingService& service);

    // Embeds every segment in one batch. Idempotent.
    void prepare(Transcript& log, const CallTag& tag);
    std::vector<Segment> retrieve(const std::string& query, int delta, Transcript& log,
                                  const CallTag& tag) override;
    const std::vector<Segment>& segments() const { return segments_; }

private:
    std::vector<Segment> segments_;
    std::vector<PoolEntry> pool_;
    EmbeddingService& service_;
    bool prepared_ = false;
};

// Always returns the paper's title, abstract and introduction as segments 0, 1, 2.
class FixedContextSource : public EvidenceSource {
public:
    explicit FixedContextSource(const PaperRecord& paper);
    std::vector<Segment> retrieve(const std::string& query, int delta, Transcript& log,
                                  const CallTag& tag) override;
    const std::vector<Segment>& segments() const { return blocks_; }

private:
    std::vector<Segment> blocks_;
};

// "Evidence #0: ..." lines, numbered by list position.
std::string render_evidence_list(std::span<const Segment> evidence);

// Empty evidence gives no claims and no provider call. A reply that stays
// invalid after repairs also gives no claims, with a transcript note.
std::vector<Claim> generate_claims(ChatGateway& gateway, const Persona& persona,
                                   const std::string& topic, std::span<const Segment> evidence,
                                   int k, Transcript& log, const CallTag& tag);

// An unusable reply counts as irrelevant, with a transcript note.
RelevanceVerdict classify_relevance(ChatGateway& gateway, const Segment& segment,
                                    const Claim& claim, Transcript& log, const CallTag& tag);

struct Preemption {
    std::map<int, std::vector<Segment>> counter;
    std::set<int> unaddressed;
};

// For each opposing claim: retrieve from the persona's own source with the
// claim's "title : description" query, classify each segment, keep the ones
// keep_evidence accepts. A failure on one claim leaves it unaddressed and
// does not stop the others.
Preemption preempt(ChatGateway& gateway, EvidenceSource& own_source,
                   std::span<const Claim> opposing_claims, int delta, Transcript& log,
                   const CallTag& tag);

// Contribution blocks for the persona and moderator prompts; "(none)" when
// there are no claims.
std::string render_contributions(Side side, const DebateInput& input);

// "Author 0 (present): ..." blocks separated by blank lines.
std::string render_conversation_history(std::span<const DebateTurn> turns);

struct DebateContext {
    Persona self;
    PaperRecord opposition;
    std::string topic_title;
    std::string topic_description;
    DebateInput input;
};

DebateTurn present_argument(ChatGateway& gateway, const DebateContext& ctx, Transcript& log,
                            const CallTag& tag);
// Requires the opponent's present turn in `history`.
DebateTurn respond_to(ChatGateway& gateway, const DebateContext& ctx,
                      std::span<const DebateTurn> history, Transcript& log, const CallTag& tag);
// Requires both respond turns in `history`.
DebateTurn revise_argument(ChatGateway& gateway, const DebateContext& ctx,
                           std::span<const DebateTurn> history, Transcript& log, const CallTag& tag);

// The six turns in canonical order. Respond sees both present turns; revise
// sees the four present and respond turns.
std::vector<DebateTurn> run_debate(ChatGateway& gateway, const DebateContext& a,
                                   const DebateContext& b, Transcript& log,
                                   const std::string& node_id);

}  // namespace tod
