#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tod {

enum class TemplateId {
    mod_generate_topics,
    mod_is_expand,
    mod_summarize,
    persona_generate_arguments,
    persona_relevance,
    persona_present,
    persona_respond,
    persona_revise,
    // Baseline pipelines; not part of the debate registry.
    baseline_single_stage,
    baseline_paper_summary,
    baseline_contrastive_summary,
};

std::string_view to_string(TemplateId id);
std::optional<TemplateId> template_from_string(std::string_view name);

// The eight debate templates, in registry order.
std::span<const TemplateId> debate_templates();
std::span<const TemplateId> baseline_templates();

using Bindings = std::map<std::string, std::string, std::less<>>;

// Template text with `{{name}}` placeholders.
std::string_view template_body(TemplateId id);

// Distinct placeholder names in order of first appearance.
std::vector<std::string> template_placeholders(TemplateId id);

struct RenderResult {
    std::string text;
    std::vector<std::string> unused_bindings;
};

// Substitutes every placeholder; throws RenderError naming the first unbound one.
std::string render_prompt(TemplateId id, const Bindings& bindings);
RenderResult render_prompt_checked(TemplateId id, const Bindings& bindings);

// Renders arbitrary text with the same placeholder rules.
RenderResult render_text(std::string_view body, const Bindings& bindings);

}  // namespace tod
