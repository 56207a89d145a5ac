#include "tod/debate_tree.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace tod {

std::string_view to_string(NodeStatus status) {
    switch (status) {
        case NodeStatus::created: return "created";
        case NodeStatus::deliberated: return "deliberated";
        case NodeStatus::debated: return "debated";
        case NodeStatus::judged: return "judged";
        case NodeStatus::expanded: return "expanded";
        case NodeStatus::leaf: return "leaf";
    }
    return "created";
}

std::optional<NodeStatus> status_from_string(std::string_view name) {
    for (auto s : {NodeStatus::created, NodeStatus::deliberated, NodeStatus::debated,
                   NodeStatus::judged, NodeStatus::expanded, NodeStatus::leaf}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view to_string(NodeEvent event) {
    switch (event) {
        case NodeEvent::deliberation_complete: return "deliberation_complete";
        case NodeEvent::debate_complete: return "debate_complete";
        case NodeEvent::verdict_recorded: return "verdict_recorded";
        case NodeEvent::stop_decision: return "stop_decision";
    }
    return "deliberation_complete";
}

bool canonical_turns(const std::vector<DebateTurn>& turns) {
    if (turns.size() != std::size(kTurnOrder)) return false;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        if (turns[i].speaker != kTurnOrder[i].first || turns[i].stage != kTurnOrder[i].second) {
            return false;
        }
    }
    return true;
}

DebateTree DebateTree::create_root(std::string topic_title, std::string topic_description,
                                   PaperRecord paper_a, PaperRecord paper_b,
                                   const RunConfig& config) {
    if (topic_title.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ValueError("root topic title must not be empty");
    }
    DebateTree tree;
    tree.root_ = "0";
    TopicNode root;
    root.node_id = "0";
    root.title = std::move(topic_title);
    root.description = std::move(topic_description);
    tree.nodes_.emplace(root.node_id, std::move(root));
    tree.paper_a_ = std::move(paper_a);
    tree.paper_b_ = std::move(paper_b);
    tree.config_ = config.redacted();
    return tree;
}

DebateTree DebateTree::restore(std::string root, std::map<std::string, TopicNode> nodes,
                               PaperRecord paper_a, PaperRecord paper_b, RunConfig config) {
    DebateTree tree;
    tree.root_ = std::move(root);
    tree.nodes_ = std::move(nodes);
    tree.paper_a_ = std::move(paper_a);
    tree.paper_b_ = std::move(paper_b);
    tree.config_ = std::move(config);
    return tree;
}

DebateTree::DebateTree(const DebateTree& other) {
    std::lock_guard lock(other.mutex_);
    root_ = other.root_;
    nodes_ = other.nodes_;
    paper_a_ = other.paper_a_;
    paper_b_ = other.paper_b_;
    config_ = other.config_;
}

DebateTree& DebateTree::operator=(const DebateTree& other) {
    if (this == &other) return *this;
    DebateTree copy(other);
    *this = std::move(copy);
    return *this;
}

DebateTree::DebateTree(DebateTree&& other) noexcept
    : root_(std::move(other.root_)),
      nodes_(std::move(other.nodes_)),
      paper_a_(std::move(other.paper_a_)),
      paper_b_(std::move(other.paper_b_)),
      config_(std::move(other.config_)) {}

DebateTree& DebateTree::operator=(DebateTree&& other) noexcept {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    root_ = std::move(other.root_);
    nodes_ = std::move(other.nodes_);
    paper_a_ = std::move(other.paper_a_);
    paper_b_ = std::move(other.paper_b_);
    config_ = std::move(other.config_);
    return *this;
}

bool DebateTree::operator==(const DebateTree& other) const {
    if (this == &other) return true;
    std::scoped_lock lock(mutex_, other.mutex_);
    return root_ == other.root_ && nodes_ == other.nodes_ && paper_a_ == other.paper_a_ &&
           paper_b_ == other.paper_b_ && config_ == other.config_;
}

TopicNode& DebateTree::at(const std::string& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw StateError("no node \"" + id + "\"");
    return it->second;
}

const TopicNode& DebateTree::at(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw StateError("no node \"" + id + "\"");
    return it->second;
}

bool DebateTree::contains(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return nodes_.count(id) > 0;
}

TopicNode DebateTree::node(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return at(id);
}

TopicNode DebateTree::checkout(const std::string& id) const { return node(id); }

std::size_t DebateTree::size() const {
    std::lock_guard lock(mutex_);
    return nodes_.size();
}

int DebateTree::max_depth_reached() const {
    std::lock_guard lock(mutex_);
    int depth = 0;
    for (const auto& [id, n] : nodes_) depth = std::max(depth, n.depth);
    return depth;
}

std::map<std::string, TopicNode> DebateTree::nodes() const {
    std::lock_guard lock(mutex_);
    return nodes_;
}

std::vector<std::string> DebateTree::preorder() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> order;
    std::set<std::string> visited;
    std::vector<std::string> stack{root_};
    while (!stack.empty()) {
        auto id = stack.back();
        stack.pop_back();
        auto it = nodes_.find(id);
        if (it == nodes_.end() || !visited.insert(id).second) continue;
        order.push_back(id);
        const auto& children = it->second.children;
        for (auto c = children.rbegin(); c != children.rend(); ++c) stack.push_back(*c);
    }
    return order;
}

std::vector<std::string> DebateTree::attach_children(const std::string& parent_id,
                                                     const std::vector<SubtopicProposal>& proposals) {
    std::lock_guard lock(mutex_);
    auto& parent = at(parent_id);
    if (parent.status != NodeStatus::deliberated && parent.status != NodeStatus::judged) {
        throw StateError("cannot attach children to node " + parent_id + " in status " +
                         std::string(to_string(parent.status)));
    }
    if (!parent.children.empty()) {
        throw StateError("node " + parent_id + " already has children");
    }
    if (proposals.empty()) {
        parent.status = NodeStatus::leaf;
        return {};
    }
    if (parent.depth + 1 > config_.max_depth) {
        throw StateError("children of node " + parent_id + " would exceed max depth " +
                         std::to_string(config_.max_depth));
    }
    if (static_cast<int>(proposals.size()) > config_.k) {
        throw StateError("node " + parent_id + " given " + std::to_string(proposals.size()) +
                         " subtopics, more than k = " + std::to_string(config_.k));
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        TopicNode child;
        child.node_id = parent_id + "." + std::to_string(i + 1);
        child.title = proposals[i].title;
        child.description = proposals[i].description;
        child.depth = parent.depth + 1;
        child.parent = parent_id;
        ids.push_back(child.node_id);
        nodes_.emplace(child.node_id, std::move(child));
    }
    auto& p = at(parent_id);
    p.children = ids;
    p.status = NodeStatus::expanded;
    return ids;
}

TopicNode DebateTree::advance_status(const std::string& id, NodeEvent event) {
    std::lock_guard lock(mutex_);
    auto& n = at(id);
    auto illegal = [&](const std::string& why) {
        return StateError("node " + id + ": event " + std::string(to_string(event)) +
                          " is illegal in status " + std::string(to_string(n.status)) +
                          (why.empty() ? "" : " (" + why + ")"));
    };
    switch (event) {
        case NodeEvent::deliberation_complete:
            if (n.status != NodeStatus::created || n.parent) throw illegal("root only");
            n.status = NodeStatus::deliberated;
            break;
        case NodeEvent::debate_complete:
            if (n.status != NodeStatus::created || !n.parent) throw illegal("");
            if (!canonical_turns(n.turns)) throw illegal("turns are not the six canonical turns");
            if (!n.revised_argument_a || !n.revised_argument_b) {
                throw illegal("both revised arguments are required");
            }
            n.status = NodeStatus::debated;
            break;
        case NodeEvent::verdict_recorded:
            if (n.status != NodeStatus::debated) throw illegal("");
            if (!n.verdict) throw illegal("no verdict stored");
            n.status = NodeStatus::judged;
            break;
        case NodeEvent::stop_decision:
            if (n.status != NodeStatus::judged) throw illegal("");
            n.status = NodeStatus::leaf;
            break;
    }
    return n;
}

void DebateTree::store_work(const TopicNode& work) {
    std::lock_guard lock(mutex_);
    auto& n = at(work.node_id);
    if (work.title != n.title || work.description != n.description || work.depth != n.depth ||
        work.parent != n.parent || work.children != n.children || work.status != n.status) {
        throw StateError("stored work for node " + work.node_id + " changes its structure");
    }
    if (!n.parent && !work.turns.empty()) throw StateError("the root never holds turns");
    n.input_a = work.input_a;
    n.input_b = work.input_b;
    n.claims_a = work.claims_a;
    n.claims_b = work.claims_b;
    n.evidence_a = work.evidence_a;
    n.evidence_b = work.evidence_b;
    n.turns = work.turns;
    n.revised_argument_a = work.revised_argument_a;
    n.revised_argument_b = work.revised_argument_b;
    n.verdict = work.verdict;
    n.notes = work.notes;
}

void DebateTree::add_note(const std::string& id, std::string note) {
    std::lock_guard lock(mutex_);
    at(id).notes.push_back(std::move(note));
}

std::vector<std::string> audit_tree(const DebateTree& tree, bool finished) {
    std::vector<std::string> issues;
    auto nodes = tree.nodes();
    const auto& config = tree.config();
    auto report = [&](const std::string& id, const std::string& what) {
        issues.push_back("node " + id + ": " + what);
    };
    auto root_it = nodes.find(tree.root_id());
    if (root_it == nodes.end()) {
        issues.push_back("root node " + tree.root_id() + " is missing");
        return issues;
    }
    if (root_it->second.parent) report(tree.root_id(), "root has a parent");
    if (root_it->second.depth != 0) report(tree.root_id(), "root depth is not 0");

    // Reachability and acyclicity from the root.
    std::set<std::string> seen;
    std::vector<std::string> stack{tree.root_id()};
    while (!stack.empty()) {
        auto id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second) {
            report(id, "reached twice (cycle or shared child)");
            continue;
        }
        auto it = nodes.find(id);
        if (it == nodes.end()) {
            report(id, "listed as a child but missing");
            continue;
        }
        for (const auto& c : it->second.children) stack.push_back(c);
    }
    for (const auto& [id, n] : nodes) {
        if (!seen.count(id)) report(id, "not connected to the root");
    }

    std::size_t bound = 1;
    std::size_t level = 1;
    for (int d = 1; d <= config.max_depth; ++d) {
        level *= static_cast<std::size_t>(config.k);
        bound += level;
    }
    if (nodes.size() > bound) {
        issues.push_back("tree has " + std::to_string(nodes.size()) + " nodes, above the bound " +
                         std::to_string(bound));
    }

    for (const auto& [id, n] : nodes) {
        if (n.node_id != id) report(id, "stored under a different id");
        if (n.depth > config.max_depth) report(id, "depth exceeds max depth");
        if (static_cast<int>(n.children.size()) > config.k) report(id, "more than k children");
        if (n.parent) {
            auto p = nodes.find(*n.parent);
            if (p == nodes.end()) {
                report(id, "parent is missing");
            } else {
                if (n.depth != p->second.depth + 1) report(id, "depth is not parent depth + 1");
                const auto& siblings = p->second.children;
                if (std::find(siblings.begin(), siblings.end(), id) == siblings.end()) {
                    report(id, "parent does not list it as a child");
                }
            }
        }
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            auto c = nodes.find(n.children[i]);
            if (c != nodes.end() && c->second.parent != id) {
                report(id, "child " + n.children[i] + " points to another parent");
            }
            if (n.children[i] != id + "." + std::to_string(i + 1)) {
                report(id, "child id " + n.children[i] + " is not the path id");
            }
        }
        if (!n.children.empty() && n.status != NodeStatus::expanded) {
            report(id, "has children but status is " + std::string(to_string(n.status)));
        }
        if (n.status == NodeStatus::expanded && n.children.empty()) {
            report(id, "expanded without children");
        }
        if (!n.parent) {
            if (!n.turns.empty()) report(id, "root holds turns");
            if (n.status == NodeStatus::debated || n.status == NodeStatus::judged) {
                report(id, "root cannot be debated or judged");
            }
        } else {
            bool debated = n.status != NodeStatus::created;
            if (n.status == NodeStatus::deliberated) report(id, "non-root node in status deliberated");
            if (debated && !canonical_turns(n.turns)) report(id, "turns are not canonical");
            if (debated && (!n.revised_argument_a || !n.revised_argument_b)) {
                report(id, "missing a revised argument");
            }
            bool judged = n.status == NodeStatus::judged || n.status == NodeStatus::expanded ||
                          n.status == NodeStatus::leaf;
            if (judged && !n.verdict) report(id, "judged without a verdict");
            if (!debated && !n.turns.empty()) report(id, "holds turns before its debate completed");
        }
        if (finished && n.status != NodeStatus::leaf && n.status != NodeStatus::expanded) {
            report(id, "unfinished status " + std::string(to_string(n.status)));
        }
    }
    return issues;
}

}  // namespace tod
