#include <doctest.h>

#include <chrono>

#include "support.hpp"

using namespace tod;

namespace {

DebateTree fresh(int k = 3, int max_depth = 3) {
    RunConfig c;
    c.k = k;
    c.max_depth = max_depth;
    return DebateTree::create_root("Topic", "desc", test::paper("a", "A"), test::paper("b", "B"), c);
}

void debate(DebateTree& t, const std::string& id) {
    auto w = t.checkout(id);
    w.turns = test::scripted_turns(id);
    w.revised_argument_a = w.turns[4].text;
    w.revised_argument_b = w.turns[5].text;
    t.store_work(w);
    t.advance_status(id, NodeEvent::debate_complete);
}

void judge(DebateTree& t, const std::string& id, ExpansionVerdict v) {
    auto w = t.checkout(id);
    w.verdict = v;
    t.store_work(w);
    t.advance_status(id, NodeEvent::verdict_recorded);
}

}  // namespace

TEST_CASE("root creation") {
    auto t = fresh();
    CHECK(t.root_id() == "0");
    CHECK(t.size() == 1);
    auto root = t.node("0");
    CHECK(root.status == NodeStatus::created);
    CHECK(root.depth == 0);
    CHECK(root.title == "Topic");
    CHECK_THROWS_AS(DebateTree::create_root("", "d", test::paper("a", "A"), test::paper("b", "B"), RunConfig{}),
                    ValueError);
    CHECK_THROWS_AS(t.node("9"), StateError);

    RunConfig c;
    c.chat.api_key = "secret";
    auto s = DebateTree::create_root("T", "", test::paper("a", "A"), test::paper("b", "B"), c);
    CHECK(s.config().chat.api_key.empty());
}

TEST_CASE("a full legal lifecycle") {
    auto t = fresh();
    CHECK(t.advance_status("0", NodeEvent::deliberation_complete).status == NodeStatus::deliberated);
    auto ids = t.attach_children("0", {test::proposal("x"), test::proposal("y")});
    CHECK(ids == std::vector<std::string>{"0.1", "0.2"});
    CHECK(t.node("0").status == NodeStatus::expanded);
    CHECK(t.node("0.2").depth == 1);
    CHECK(t.node("0.2").parent == std::optional<std::string>("0"));

    debate(t, "0.1");
    judge(t, "0.1", ExpansionVerdict{"", true, false, false, false});
    CHECK(t.attach_children("0.1", {test::proposal("z")}) == std::vector<std::string>{"0.1.1"});
    debate(t, "0.1.1");
    judge(t, "0.1.1", ExpansionVerdict{});
    CHECK(t.advance_status("0.1.1", NodeEvent::stop_decision).status == NodeStatus::leaf);
    debate(t, "0.2");
    judge(t, "0.2", ExpansionVerdict{"", true, true, false, false});
    CHECK(t.attach_children("0.2", {}).empty());
    CHECK(t.node("0.2").status == NodeStatus::leaf);

    CHECK(audit_tree(t, true).empty());
    CHECK(test::independent_audit(t, 3, 3).empty());
    CHECK(t.preorder() == std::vector<std::string>{"0", "0.1", "0.1.1", "0.2"});
    CHECK(t.max_depth_reached() == 2);
}

TEST_CASE("illegal transitions are rejected and leave the tree unchanged") {
    auto t = fresh();
    auto snapshot = t;
    CHECK_THROWS_AS(t.advance_status("0", NodeEvent::debate_complete), StateError);
    CHECK_THROWS_AS(t.advance_status("0", NodeEvent::verdict_recorded), StateError);
    CHECK_THROWS_AS(t.advance_status("0", NodeEvent::stop_decision), StateError);
    CHECK_THROWS_AS(t.attach_children("0", {test::proposal("x")}), StateError);
    CHECK(t == snapshot);

    t.advance_status("0", NodeEvent::deliberation_complete);
    CHECK_THROWS_AS(t.advance_status("0", NodeEvent::deliberation_complete), StateError);
    t.attach_children("0", {test::proposal("x")});
    CHECK_THROWS_AS(t.attach_children("0", {test::proposal("x")}), StateError);

    snapshot = t;
    CHECK_THROWS_AS(t.advance_status("0.1", NodeEvent::deliberation_complete), StateError);
    CHECK_THROWS_WITH(t.advance_status("0.1", NodeEvent::debate_complete),
                      doctest::Contains("six canonical turns"));
    CHECK_THROWS_AS(t.attach_children("0.1", {test::proposal("y")}), StateError);
    CHECK(t == snapshot);

    auto w = t.checkout("0.1");
    w.turns = test::scripted_turns("0.1");
    t.store_work(w);
    CHECK_THROWS_WITH(t.advance_status("0.1", NodeEvent::debate_complete),
                      doctest::Contains("revised arguments"));
    std::swap(w.turns[0], w.turns[1]);
    w.revised_argument_a = "a";
    w.revised_argument_b = "b";
    t.store_work(w);
    CHECK_THROWS_AS(t.advance_status("0.1", NodeEvent::debate_complete), StateError);

    auto t2 = fresh();
    t2.advance_status("0", NodeEvent::deliberation_complete);
    t2.attach_children("0", {test::proposal("x")});
    debate(t2, "0.1");
    CHECK_THROWS_WITH(t2.advance_status("0.1", NodeEvent::verdict_recorded),
                      doctest::Contains("no verdict"));
    CHECK_THROWS_AS(t2.advance_status("0.1", NodeEvent::stop_decision), StateError);
    judge(t2, "0.1", ExpansionVerdict{});
    t2.advance_status("0.1", NodeEvent::stop_decision);
    CHECK_THROWS_AS(t2.advance_status("0.1", NodeEvent::stop_decision), StateError);
    CHECK_THROWS_AS(t2.attach_children("0.1", {}), StateError);
}

TEST_CASE("attach_children enforces k and max depth") {
    auto t = fresh(2, 1);
    t.advance_status("0", NodeEvent::deliberation_complete);
    auto snapshot = t;
    CHECK_THROWS_WITH(t.attach_children("0", {test::proposal("a"), test::proposal("b"), test::proposal("c")}),
                      doctest::Contains("more than k = 2"));
    CHECK(t == snapshot);
    t.attach_children("0", {test::proposal("a"), test::proposal("b")});
    debate(t, "0.1");
    judge(t, "0.1", ExpansionVerdict{"", true, true, false, false});
    CHECK_THROWS_WITH(t.attach_children("0.1", {test::proposal("deep")}),
                      doctest::Contains("exceed max depth 1"));
    // An empty list still closes the node at the depth limit.
    CHECK(t.attach_children("0.1", {}).empty());
    CHECK(t.node("0.1").status == NodeStatus::leaf);
}

TEST_CASE("store_work protects structure") {
    auto t = fresh();
    auto root = t.checkout("0");
    root.turns = test::scripted_turns("0");
    CHECK_THROWS_WITH(t.store_work(root), doctest::Contains("root never holds turns"));
    for (int field = 0; field < 6; ++field) {
        auto w = t.checkout("0");
        switch (field) {
            case 0: w.title = "other"; break;
            case 1: w.description = "other"; break;
            case 2: w.depth = 1; break;
            case 3: w.parent = "x"; break;
            case 4: w.children = {"0.1"}; break;
            case 5: w.status = NodeStatus::leaf; break;
        }
        CHECK_THROWS_AS(t.store_work(w), StateError);
    }
    auto w = t.checkout("0");
    w.claims_a = {Claim{0, "c", "d", {0}}};
    w.notes = {"n"};
    t.store_work(w);
    CHECK(t.node("0").claims_a.size() == 1);
    t.add_note("0", "second");
    CHECK(t.node("0").notes == std::vector<std::string>{"n", "second"});
    auto ghost = w;
    ghost.node_id = "0.7";
    CHECK_THROWS_AS(t.store_work(ghost), StateError);
}

TEST_CASE("canonical turn order") {
    auto turns = test::scripted_turns("n");
    CHECK(canonical_turns(turns));
    CHECK_FALSE(canonical_turns({}));
    auto shorter = turns;
    shorter.pop_back();
    CHECK_FALSE(canonical_turns(shorter));
    for (std::size_t i = 0; i + 1 < turns.size(); ++i) {
        auto swapped = turns;
        std::swap(swapped[i], swapped[i + 1]);
        CHECK_FALSE(canonical_turns(swapped));
    }
    auto longer = turns;
    longer.push_back(turns[0]);
    CHECK_FALSE(canonical_turns(longer));
}

TEST_CASE("audit detects corrupted trees") {
    auto t = fresh();
    t.advance_status("0", NodeEvent::deliberation_complete);
    t.attach_children("0", {test::proposal("x")});
    debate(t, "0.1");
    judge(t, "0.1", ExpansionVerdict{});
    t.advance_status("0.1", NodeEvent::stop_decision);
    REQUIRE(audit_tree(t, true).empty());

    auto rebuild = [&](auto mutate) {
        auto nodes = t.nodes();
        mutate(nodes);
        return DebateTree::restore("0", nodes, t.paper_a(), t.paper_b(), t.config());
    };
    CHECK_FALSE(audit_tree(rebuild([](auto& n) { n["0.1"].children = {"0"}; n["0.1"].status = NodeStatus::expanded; }), false).empty());
    CHECK_FALSE(audit_tree(rebuild([](auto& n) { n["0"].children.push_back("0.2"); }), false).empty());
    CHECK_FALSE(audit_tree(rebuild([](auto& n) { n["0.1"].depth = 2; }), false).empty());
    CHECK_FALSE(audit_tree(rebuild([](auto& n) { n["0.1"].turns.pop_back(); }), false).empty());
    CHECK_FALSE(audit_tree(rebuild([](auto& n) { n["0.1"].verdict.reset(); }), false).empty());
    CHECK_FALSE(audit_tree(rebuild([](auto& n) { n["0"].status = NodeStatus::judged; }), false).empty());
    CHECK_FALSE(audit_tree(rebuild([](auto& n) { n["0.1"].status = NodeStatus::judged; }), true).empty());
    CHECK(audit_tree(rebuild([](auto& n) { n["0.1"].status = NodeStatus::judged; }), false).empty());
    CHECK_FALSE(audit_tree(rebuild([](auto& n) {
                               auto orphan = n["0.1"];
                               orphan.node_id = "0.5";
                               n["0.5"] = orphan;
                           }),
                           false)
                    .empty());
}

TEST_CASE("fuzzed lifecycles pass both audits") {
    std::mt19937_64 rng(2024);
    int rejected = 0;
    std::size_t largest = 0;
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 500; ++i) {
        auto f = test::fuzz_tree(rng);
        auto issues = audit_tree(f.tree, true);
        auto independent = test::independent_audit(f.tree, f.k, f.max_depth);
        INFO("sequence " << i);
        CHECK(issues.empty());
        CHECK(independent.empty());
        rejected += f.illegal_rejected;
        largest = std::max(largest, f.tree.size());
    }
    CHECK(rejected > 0);
    CHECK(largest > 5);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(30));
}
