#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tod/prompts.hpp"

using namespace tod;

namespace {

Bindings bind_all(TemplateId id, const std::string& prefix = "") {
    Bindings b;
    for (const auto& name : template_placeholders(id)) b[name] = prefix + "<" + name + ">";
    return b;
}

}  // namespace

TEST_CASE("registry holds eight debate templates and three baselines") {
    auto debate = debate_templates();
    CHECK(debate.size() == 8);
    CHECK(baseline_templates().size() == 3);
    std::set<std::string> names;
    for (auto id : debate) {
        auto name = std::string(to_string(id));
        names.insert(name);
        CHECK(template_from_string(name) == id);
    }
    CHECK(names == std::set<std::string>{"mod_generate_topics", "mod_is_expand", "mod_summarize",
                                         "persona_generate_arguments", "persona_relevance",
                                         "persona_present", "persona_respond", "persona_revise"});
    for (auto id : baseline_templates()) CHECK(template_from_string(to_string(id)) == id);
    CHECK_FALSE(template_from_string("persona").has_value());
}

TEST_CASE("placeholder sets per template") {
    using V = std::vector<std::string>;
    CHECK(template_placeholders(TemplateId::persona_relevance) ==
          V{"claim", "claim_description", "evidence"});
    CHECK(template_placeholders(TemplateId::mod_summarize) ==
          V{"topic", "author_0_title", "author_1_title", "tree"});
    CHECK(template_placeholders(TemplateId::persona_generate_arguments) ==
          V{"paper_title", "paper_abstract", "topic", "evidence", "k"});
    auto respond = template_placeholders(TemplateId::persona_respond);
    CHECK(std::find(respond.begin(), respond.end(), "conversation_history") != respond.end());
    auto present = template_placeholders(TemplateId::persona_present);
    CHECK(std::find(present.begin(), present.end(), "conversation_history") == present.end());
}

TEST_CASE("every template renders with all placeholders bound and none left over") {
    std::vector<TemplateId> all(debate_templates().begin(), debate_templates().end());
    all.insert(all.end(), baseline_templates().begin(), baseline_templates().end());
    for (auto id : all) {
        auto result = render_prompt_checked(id, bind_all(id));
        CHECK(result.unused_bindings.empty());
        CHECK(result.text.find("{{") == std::string::npos);
        for (const auto& name : template_placeholders(id)) {
            CHECK(result.text.find("<" + name + ">") != std::string::npos);
        }
    }
}

TEST_CASE("a missing binding names the placeholder") {
    for (auto id : debate_templates()) {
        for (const auto& missing : template_placeholders(id)) {
            auto b = bind_all(id);
            b.erase(missing);
            try {
                render_prompt(id, b);
                FAIL("rendered without " << missing);
            } catch (const RenderError& e) {
                CHECK(e.placeholder() == missing);
                CHECK(std::string(e.what()).find(std::string(to_string(id))) != std::string::npos);
            }
        }
    }
}

TEST_CASE("extra bindings are reported, values are not re-expanded") {
    auto b = bind_all(TemplateId::persona_relevance);
    b["spare"] = "x";
    b["claim"] = "{{evidence}}";
    auto r = render_prompt_checked(TemplateId::persona_relevance, b);
    CHECK(r.unused_bindings == std::vector<std::string>{"spare"});
    CHECK(r.text.find("Claim: {{evidence}}") != std::string::npos);
}

TEST_CASE("render_text handles malformed braces literally") {
    Bindings b{{"a", "1"}};
    CHECK(render_text("{{a}} {{ a }} {{} {{a", b).text == "1 {{ a }} {{} {{a");
    CHECK(render_text("no placeholders", {}).text == "no placeholders");
    CHECK(render_text("{{a}}{{a}}", b).text == "11");
}

TEST_CASE("structured templates ask for their schema keys") {
    auto has = [](TemplateId id, const std::string& key) {
        return std::string(template_body(id)).find(key) != std::string::npos;
    };
    for (auto key : {"topic_title", "topic_description", "author_0_relevant_contributions",
                     "author_1_relevant_contributions"}) {
        CHECK(has(TemplateId::mod_generate_topics, key));
    }
    for (auto key : {"explanation", "progression_of_arguments", "meaningful_questions", "clear_winner"}) {
        CHECK(has(TemplateId::mod_is_expand, key));
    }
    for (auto key : {"argument_title", "description", "evidence"}) {
        CHECK(has(TemplateId::persona_generate_arguments, key));
    }
    for (auto key : {"supports_claim", "refutes_claim", "clarifies_claim", "irrelevant_to_claim"}) {
        CHECK(has(TemplateId::persona_relevance, key));
    }
}
