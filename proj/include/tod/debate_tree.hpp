#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tod/config.hpp"
#include "tod/corpus.hpp"
#include "tod/debate_types.hpp"

namespace tod {

enum class NodeStatus { created, deliberated, debated, judged, expanded, leaf };
enum class NodeEvent { deliberation_complete, debate_complete, verdict_recorded, stop_decision };

std::string_view to_string(NodeStatus status);
std::optional<NodeStatus> status_from_string(std::string_view name);
std::string_view to_string(NodeEvent event);

// What one persona brings into a child debate: the parent's claims chosen for
// this subtopic, the evidence list their ids index, and the opponent's
// counter-evidence against each of them.
struct DebateInput {
    std::vector<Claim> claims;
    std::vector<Segment> evidence;
    std::map<int, std::vector<Segment>> counter;

    bool operator==(const DebateInput&) const = default;
};

struct TopicNode {
    std::string node_id;
    std::string title;
    std::string description;
    int depth = 0;
    std::optional<std::string> parent;
    std::vector<std::string> children;

    DebateInput input_a;
    DebateInput input_b;

    // Self-deliberation results at this node.
    std::vector<Claim> claims_a;
    std::vector<Claim> claims_b;
    EvidencePool evidence_a;
    EvidencePool evidence_b;

    std::vector<DebateTurn> turns;
    std::optional<std::string> revised_argument_a;
    std::optional<std::string> revised_argument_b;
    std::optional<ExpansionVerdict> verdict;
    NodeStatus status = NodeStatus::created;
    std::vector<std::string> notes;  // degradations and dropped proposals

    const DebateInput& input(Side side) const { return side == Side::author_0 ? input_a : input_b; }
    const std::vector<Claim>& claims(Side side) const {
        return side == Side::author_0 ? claims_a : claims_b;
    }
    const EvidencePool& evidence(Side side) const {
        return side == Side::author_0 ? evidence_a : evidence_b;
    }
    const std::optional<std::string>& revised_argument(Side side) const {
        return side == Side::author_0 ? revised_argument_a : revised_argument_b;
    }

    bool operator==(const TopicNode&) const = default;
};

// Single-writer tree. Structural changes go through attach_children and
// advance_status; work on a node happens on a checked-out copy that is stored
// back with store_work.
class DebateTree {
public:
    // Throws ValueError on an empty title. Credentials are dropped from the snapshot.
    static DebateTree create_root(std::string topic_title, std::string topic_description,
                                  PaperRecord paper_a, PaperRecord paper_b, const RunConfig& config);

    DebateTree(const DebateTree& other);
    DebateTree& operator=(const DebateTree& other);
    DebateTree(DebateTree&& other) noexcept;
    DebateTree& operator=(DebateTree&& other) noexcept;

    const std::string& root_id() const { return root_; }
    const PaperRecord& paper(Side side) const { return side == Side::author_0 ? paper_a_ : paper_b_; }
    const PaperRecord& paper_a() const { return paper_a_; }
    const PaperRecord& paper_b() const { return paper_b_; }
    const RunConfig& config() const { return config_; }

    bool contains(const std::string& id) const;
    // Throws StateError for an unknown id.
    TopicNode node(const std::string& id) const;
    std::size_t size() const;
    int max_depth_reached() const;

    // Children first-to-last after their parent, starting at the root.
    std::vector<std::string> preorder() const;

    // One child per proposal, ids "<parent>.<1-based index>". An empty list
    // turns the parent into a leaf. Parent must be deliberated or judged and
    // have no children; more than k proposals or a child deeper than
    // max_depth is a StateError.
    std::vector<std::string> attach_children(const std::string& parent_id,
                                             const std::vector<SubtopicProposal>& proposals);

    // Transition table:
    //   created     + deliberation_complete -> deliberated  (root only)
    //   created     + debate_complete       -> debated      (six canonical turns, both revised arguments)
    //   debated     + verdict_recorded      -> judged       (verdict set)
    //   judged      + stop_decision         -> leaf
    TopicNode advance_status(const std::string& id, NodeEvent event);

    TopicNode checkout(const std::string& id) const;
    // Replaces the work fields of the stored node (inputs, claims, evidence,
    // turns, revised arguments, verdict, notes). Structural fields must match.
    void store_work(const TopicNode& work);

    // Appends a note to a node.
    void add_note(const std::string& id, std::string note);

    std::map<std::string, TopicNode> nodes() const;

    // Rebuilds a tree from parts without lifecycle checks; used by the
    // document reader, which audits separately.
    static DebateTree restore(std::string root, std::map<std::string, TopicNode> nodes,
                              PaperRecord paper_a, PaperRecord paper_b, RunConfig config);

    bool operator==(const DebateTree& other) const;

private:
    DebateTree() = default;
    TopicNode& at(const std::string& id);
    const TopicNode& at(const std::string& id) const;

    mutable std::mutex mutex_;
    std::string root_;
    std::map<std::string, TopicNode> nodes_;
    PaperRecord paper_a_;
    PaperRecord paper_b_;
    RunConfig config_;
};

// True when turns follow the canonical six-turn order exactly.
bool canonical_turns(const std::vector<DebateTurn>& turns);

// Structural audit. With `finished`, also requires every node to be a leaf or
// expanded. Returns one message per violation; empty means the tree is sound.
std::vector<std::string> audit_tree(const DebateTree& tree, bool finished);

// Versioned JSON document with stable key order.
inline constexpr int kTreeFormatVersion = 1;
nlohmann::ordered_json tree_to_json(const DebateTree& tree);
std::string serialize_tree(const DebateTree& tree);
// Throws ParseError (with a JSON pointer path) or UnsupportedVersionError.
DebateTree tree_from_json(const nlohmann::json& doc);
DebateTree deserialize_tree(std::string_view document);

}  // namespace tod
