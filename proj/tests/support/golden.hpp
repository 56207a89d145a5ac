#pragma once

#include <map>

#include "support.hpp"
#include "tod/commands.hpp"

namespace tod::test {

// One phrase per debate template that its rendered text must contain.
inline const std::map<TemplateId, std::string>& template_anchors() {
    static const std::map<TemplateId, std::string> anchors{
        {TemplateId::mod_generate_topics, "fair and balanced moderator"},
        {TemplateId::mod_is_expand, "You must determine whether progress is being made"},
        {TemplateId::mod_summarize, "Here is a breakdown of their debates in tree format"},
        {TemplateId::persona_generate_arguments,
         "Below is a list of relevant evidence retrieved from your paper"},
        {TemplateId::persona_relevance,
         "Your objective is to check if a given evidence is relevant to a claim or not"},
        {TemplateId::persona_present,
         "make an argument for a specific reason why your contributions towards the topic"},
        {TemplateId::persona_respond,
         "You must respond to the last argument presented by your opposition in debate"},
        {TemplateId::persona_revise, "construct a new, stronger argument"},
    };
    return anchors;
}

struct GoldenResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

// Compares `actual` with the golden file, or rewrites it in update mode.
inline GoldenResult check_golden(const std::string& relative, const std::string& actual) {
    auto path = source_path("tests/golden/" + relative);
    if (update_goldens()) {
        write_file(path, actual);
        return {relative, true, "updated"};
    }
    if (!std::filesystem::exists(path)) return {relative, false, "golden file missing"};
    auto expected = read_file(path);
    if (expected == actual) return {relative, true, ""};
    std::size_t at = 0;
    while (at < expected.size() && at < actual.size() && expected[at] == actual[at]) ++at;
    return {relative, false, "first difference at byte " + std::to_string(at)};
}

inline std::vector<GoldenResult> prompt_goldens() {
    auto file = cli::load_bindings(source_path("tests/fixtures/prompt_bindings.yaml").string());
    std::vector<GoldenResult> results;
    for (auto id : debate_templates()) {
        auto text = render_prompt(id, cli::bindings_for(file, id));
        auto r = check_golden("prompts/" + std::string(to_string(id)) + ".txt", text);
        if (text.find(template_anchors().at(id)) == std::string::npos) {
            r.ok = false;
            r.detail = "anchor phrase missing";
        }
        results.push_back(r);
    }
    return results;
}

// Runs one variant on the fixture pair with fresh mocks and compares every
// artifact file.
inline std::vector<GoldenResult> e2e_goldens(Variant variant) {
    auto mocks = make_mocks(fixture_script());
    auto pair = fixture_pair();
    auto artifacts = run_variant(pair, config_for(variant), mocks.providers());
    TempDir dir;
    auto paths = write_artifacts(artifacts, pair, dir.path());
    std::vector<std::filesystem::path> files{paths.summary, paths.transcript, paths.manifest};
    if (paths.tree) files.push_back(*paths.tree);
    std::vector<GoldenResult> results;
    for (const auto& f : files) {
        results.push_back(check_golden("e2e/" + std::string(to_string(variant)) + "/" +
                                           f.filename().string(),
                                       read_file(f)));
    }
    return results;
}

}  // namespace tod::test
