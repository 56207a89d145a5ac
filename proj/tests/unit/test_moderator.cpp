#include <doctest.h>

#include "support.hpp"
#include "tod/moderator.hpp"

using namespace tod;

namespace {

ChatGateway gateway_for(const std::string& yaml, std::shared_ptr<ScriptedChatProvider>* out = nullptr) {
    auto p = std::make_shared<ScriptedChatProvider>(parse_mock_script(yaml).chat);
    if (out) *out = p;
    return ChatGateway(p, SamplingTable{},
                       GatewayOptions{RetryPolicy{0, std::chrono::milliseconds(0), 0.0}, 4, 1});
}

SubtopicRequest request_with(std::vector<Claim> a, std::vector<Claim> b) {
    SubtopicRequest r{"Topic", "Topic description", test::paper("a", "Paper A"),
                      test::paper("b", "Paper B"), {}, {}};
    r.view_a.claims = std::move(a);
    r.view_b.claims = std::move(b);
    return r;
}

std::string topic_json(const std::string& title, const std::string& a, const std::string& b) {
    return "{\"topic_title\": \"" + title + "\", \"topic_description\": \"about " + title +
           "\", \"author_0_relevant_contributions\": " + a +
           ", \"author_1_relevant_contributions\": " + b + "}";
}

JudgeRequest judge_request() {
    return JudgeRequest{"Sub", "Sub description", test::scripted_turns("0.1"), "prev", "curr"};
}

}  // namespace

TEST_CASE("expansion gate truth table") {
    // Expand when below the depth limit and the verdict is not a clean finish:
    // a clean finish means no progression, no open questions, and a clear winner.
    for (int mask = 0; mask < 8; ++mask) {
        ExpansionVerdict v{"", (mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0, false};
        bool clean_finish = !v.progression_of_arguments && !v.meaningful_questions && v.clear_winner;
        for (int depth : {1, 2}) {
            CHECK(should_expand(v, depth, 3) == !clean_finish);
        }
        CHECK_FALSE(should_expand(v, 3, 3));
        CHECK_FALSE(should_expand(v, 4, 3));
    }
    CHECK_FALSE(should_expand(ExpansionVerdict{}, 0, 3));
}

TEST_CASE("proposal checks") {
    std::vector<Claim> a{Claim{0, "a0", "", {}}, Claim{1, "a1", "", {}}};
    std::vector<Claim> b{Claim{0, "b0", "", {}}};
    CHECK(check_proposal(SubtopicProposal{"t", "d", {1}, {}}, a, b).empty());
    CHECK(check_proposal(SubtopicProposal{"t", "d", {}, {0}}, a, b).empty());
    CHECK(check_proposal(SubtopicProposal{"t", "d", {}, {}}, a, b).size() == 1);
    CHECK(check_proposal(SubtopicProposal{"t", "d", {2}, {0}}, a, b).size() == 1);
    CHECK(check_proposal(SubtopicProposal{"t", "d", {0}, {1}}, a, b).size() == 1);
    CHECK(check_proposal(SubtopicProposal{"t", "d", {5}, {5}}, a, b).size() == 2);
}

TEST_CASE("subtopics keep the first k valid proposals in reply order") {
    std::shared_ptr<ScriptedChatProvider> p;
    std::string reply = "[" + topic_json("bad ids", "[7]", "[]") + ", " + topic_json("one", "[0]", "[]") +
                        ", " + topic_json("empty", "[]", "[]") + ", " + topic_json("two", "[]", "[0]") +
                        ", " + topic_json("three", "[0]", "[0]") + "]";
    auto g = gateway_for("chat:\n  - template: mod_generate_topics\n    reply: '" + reply + "'\n", &p);
    Transcript log;
    auto r = generate_subtopics(g, request_with({Claim{0, "a", "", {}}}, {Claim{0, "b", "", {}}}), 2,
                                log, {"0.1", ""});
    REQUIRE(r.proposals.size() == 2);
    CHECK(r.proposals[0].title == "one");
    CHECK(r.proposals[1].title == "two");
    REQUIRE(r.dropped.size() == 3);
    CHECK(r.dropped[0].find("bad ids") != std::string::npos);
    CHECK(r.dropped[2].find("beyond the first 2") != std::string::npos);
    CHECK(log.count(TranscriptEntry::Kind::note) == 3);
    auto prompt = p->requests().at(0).prompt;
    CHECK(prompt.find("Paper A") != std::string::npos);
    CHECK(prompt.find("Paper B") != std::string::npos);
    CHECK(p->requests().at(0).tag.node_id == "0.1");
}

TEST_CASE("subtopic preconditions and unusable replies") {
    auto g = gateway_for("chat:\n  - template: mod_generate_topics\n    repeat: true\n    reply: none\n");
    Transcript log;
    CHECK_THROWS_AS(generate_subtopics(g, request_with({}, {}), 3, log, {}), PreconditionError);
    CHECK_THROWS_AS(generate_subtopics(g, request_with({Claim{}}, {}), 0, log, {}), PreconditionError);
    CHECK(log.size() == 0);
    auto r = generate_subtopics(g, request_with({Claim{}}, {}), 3, log, {});
    CHECK(r.proposals.empty());
    CHECK(r.dropped.size() == 1);
    CHECK(log.count(TranscriptEntry::Kind::chat) == 2);
}

TEST_CASE("judge parses a verdict") {
    std::shared_ptr<ScriptedChatProvider> p;
    auto g = gateway_for(R"(chat:
  - template: mod_is_expand
    reply: '{"explanation": "open", "progression_of_arguments": false, "meaningful_questions": true, "clear_winner": true}'
)",
                         &p);
    Transcript log;
    auto v = judge_expansion(g, judge_request(), log, {"0.1", ""});
    CHECK(v == ExpansionVerdict{"open", false, true, true, false});
    auto prompt = p->requests().at(0).prompt;
    CHECK(prompt.find("author_0 revise at 0.1") != std::string::npos);
    CHECK(prompt.find("prev") != std::string::npos);
    CHECK(prompt.find("curr") != std::string::npos);
}

TEST_CASE("an unusable judge reply degrades to stop") {
    auto g = gateway_for("chat:\n  - template: mod_is_expand\n    repeat: true\n    reply: unclear\n");
    Transcript log;
    auto v = judge_expansion(g, judge_request(), log, {"0.1", ""});
    CHECK(v.degraded);
    CHECK_FALSE(v.progression_of_arguments);
    CHECK_FALSE(v.meaningful_questions);
    CHECK(v.clear_winner);
    CHECK_FALSE(should_expand(v, 1, 3));
    CHECK(log.count(TranscriptEntry::Kind::chat) == 2);

    auto bad = judge_request();
    bad.turns.pop_back();
    CHECK_THROWS_AS(judge_expansion(g, bad, log, {}), PreconditionError);
}

TEST_CASE("render helpers") {
    DebateInput a;
    a.claims = {Claim{0, "Speed", "is fast", {}}, Claim{1, "Size", "is small", {}}};
    CHECK(render_entering_claims(a, DebateInput{}) ==
          "Author 0: Speed: is fast\nAuthor 0: Size: is small\nAuthor 1: (no claims)");
    CHECK(render_argument_pair("x", "y") == "Author 0: x\n\nAuthor 1: y");
}

TEST_CASE("tree context lists debated nodes in preorder with indentation") {
    auto tree = DebateTree::create_root("Root", "root desc", test::paper("a", "A"), test::paper("b", "B"),
                                        RunConfig{});
    tree.advance_status("0", NodeEvent::deliberation_complete);
    tree.attach_children("0", {test::proposal("first"), test::proposal("second")});
    for (const auto& id : {"0.1", "0.2"}) {
        auto w = tree.checkout(id);
        w.turns = test::scripted_turns(id);
        w.revised_argument_a = w.turns[4].text;
        w.revised_argument_b = w.turns[5].text;
        tree.store_work(w);
        tree.advance_status(id, NodeEvent::debate_complete);
    }
    auto w = tree.checkout("0.1");
    w.verdict = ExpansionVerdict{"go", true, false, false, false};
    tree.store_work(w);
    tree.advance_status("0.1", NodeEvent::verdict_recorded);
    tree.attach_children("0.1", {test::proposal("deeper")});
    {
        auto d = tree.checkout("0.1.1");
        d.turns = test::scripted_turns("0.1.1");
        d.revised_argument_a = d.turns[4].text;
        d.revised_argument_b = d.turns[5].text;
        tree.store_work(d);
    }
    auto text = render_tree_context(tree);
    CHECK(text ==
          "Level 1: \"first\" : \"first description\"\n"
          "Author 0's argument: author_0 revise at 0.1\n"
          "Author 1's argument: author_1 revise at 0.1\n\n"
          "  Level 2: \"deeper\" : \"deeper description\"\n"
          "Author 0's argument: author_0 revise at 0.1.1\n"
          "Author 1's argument: author_1 revise at 0.1.1\n\n"
          "Level 1: \"second\" : \"second description\"\n"
          "Author 0's argument: author_0 revise at 0.2\n"
          "Author 1's argument: author_1 revise at 0.2");
    auto prompt = render_synthesis_prompt(tree);
    CHECK(prompt.find(text) != std::string::npos);
    CHECK(prompt.find("Root") != std::string::npos);
}

TEST_CASE("synthesis") {
    std::shared_ptr<ScriptedChatProvider> p;
    auto g = gateway_for("chat:\n  - template: mod_summarize\n    repeat: true\n    reply: the summary\n", &p);
    Transcript log;

    auto empty = DebateTree::create_root("Root", "", test::paper("a", "A"), test::paper("b", "B"), RunConfig{});
    CHECK_THROWS_AS(synthesize(g, empty, log), PreconditionError);
    empty.advance_status("0", NodeEvent::deliberation_complete);
    empty.attach_children("0", {});
    auto r = synthesize(g, empty, log);
    CHECK(r.summary == kNoDebateSummary);
    CHECK(r.node_count == 1);
    CHECK(p->call_count() == 0);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto f = test::fuzz_tree(rng);
        auto before = p->call_count();
        auto s = synthesize(g, f.tree, log);
        CHECK(s.node_count == static_cast<int>(f.tree.size()));
        CHECK(s.max_depth_reached == f.tree.max_depth_reached());
        CHECK(p->call_count() == before + (f.tree.size() > 1 ? 1 : 0));
        CHECK(s.summary == (f.tree.size() > 1 ? std::string("the summary") : std::string(kNoDebateSummary)));
    }
}
