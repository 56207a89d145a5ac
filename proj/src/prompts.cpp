#include "tod/prompts.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "tod/error.hpp"

namespace tod {
namespace {

constexpr std::array<TemplateId, 8> kDebateTemplates = {
    TemplateId::mod_generate_topics,        TemplateId::mod_is_expand,
    TemplateId::mod_summarize,              TemplateId::persona_generate_arguments,
    TemplateId::persona_relevance,          TemplateId::persona_present,
    TemplateId::persona_respond,            TemplateId::persona_revise,
};

constexpr std::array<TemplateId, 3> kBaselineTemplates = {
    TemplateId::baseline_single_stage,
    TemplateId::baseline_paper_summary,
    TemplateId::baseline_contrastive_summary,
};

constexpr std::string_view kGenerateTopics =
    R"(You are a fair and balanced moderator of a debate between two authors determining their respective novel contributions towards the following topic:
Topic: {{topic}}
Topic Description: {{topic_description}}

Here are the two papers and their claimed novel contributions with corresponding evidence:

Author 0 Paper Title: {{author_0_title}}
Author 0 Paper Abstract: {{author_0_abstract}}
{{author_0_contributions}}

Author 1 Paper Title: {{author_1_title}}
Author 1 Paper Abstract: {{author_1_abstract}}
{{author_1_contributions}}

Based on each of the author's claimed novelties, evidence, and counter-evidence to each other's arguments, you must determine the most meaningful, diverse set of subtopics within the parent topic, "{{topic}}", which best cover the types of contributions each of the papers make. Remember that for each of your selected topics, the papers will be debating which of them makes the better contribution towards the topic. Hence, for each of your subtopics, cite the integer IDs of any relevant contributions from Author 0 or Author 1. At least one of these lists should be non-empty. Overall, our goal is to identify how novel Author 0's paper's contributions towards topic "{{topic}}" are by individually considering their contributions towards your subtopics.

Output your list subtopics (up to {{k}}) in the following format:
    "topic_title": <should be a brief, 10-15 word string where the value is the title of your subtopic>,
    "topic_description": <1-2 sentence string explaining the subtopic and what you feel would be most helpful for the papers to debate within the subtopic>,
    "author_0_relevant_contributions": <list of integer IDs citing which contribution(s) from Author 0 would be most relevant to this subtopic; can be empty>,
    "author_1_relevant_contributions": <list of integer IDs citing which contribution(s) from Author 1 would be most relevant to this subtopic; can be empty>

Reply with a single JSON object inside one ```json fenced block and nothing else. The object has one key, "subtopics", whose value is the list of subtopic objects described above.
)";

constexpr std::string_view kIsExpand =
    R"(You are a moderator facilitating a debate in which two paper are debating who makes the better contribution towards the following topic:
Topic: {{topic}}
Topic Description: {{topic_description}}

{{conversation_history}}

Below, you are given the previous set of arguments and the current set of arguments.

previous arguments: {{previous_arguments}}

current arguments: {{current_arguments}}

You must determine whether progress is being made. DO NOT focus on the language being used. Focus on the content of the arguments. Specifically, determine the following (True or False for each):
1. progression_of_arguments: Are these arguments sufficiently different enough to necessitate further debate? Are there new, deeper concepts being discussed between the two sets of arguments?
2. meaningful_questions: Within the debate history, each author acknowledges each other's arguments and may ask clarifying questions accordingly. Do you believe that the clarifying questions have not been sufficiently addressed already and would be important to answer through further debate? If there are no questions raised in the debate history by either author, return False.
3. clear_winner: Do you believe that it is clear that one author has won the debate, and it does not need to be further deconstructured (in order to determine which components within each author's contributions are truly better)?

Output your argument in the following format:
    "explanation": <2-5 sentence string to explain your reasoning about whether further debate is necessary when comparing the previous arguments and the current arguments>,
    "progression_of_arguments": <output a boolean; pick only one of "True" or "False" depending on the history, arguments, and your explanation above>,
    "meaningful_questions": <output a boolean; pick only one of "True" or "False" depending on the history, arguments, and your explanation above>,
    "clear_winner": <output a boolean; pick only one of "True" or "False" depending on the history, arguments, and your explanation above>

Reply with a single JSON object inside one ```json fenced block and nothing else, using exactly these four keys. Write each boolean as JSON true or false.
)";

constexpr std::string_view kSummarize =
    R"(Two authors are debating their respective novelties with respect to the following topic:
Topic: {{topic}}
Author 0's paper title is: {{author_0_title}}
Author 1's paper title is: {{author_1_title}}

Here is a breakdown of their debates in tree format. At each tree node, we provide the "topic_title" : "topic description", Author 0's corresponding argument and Author 1's corresponding argument:

{{tree}}

Based on the debate breakdown, output a paragraph-long synthesis of the debate which summarizes the similarities and differences between the papers. Structure your summary with initially their similarities (which ideas/aspects overlap between the two papers?) to their differences (what makes the papers unique) in novelties. Focus more on the differences than the similarities.
)";

constexpr std::string_view kGenerateArguments =
    R"(You are the author of the paper, '{{paper_title}}'. The abstract of your work is: {{paper_abstract}}.

You are debating another author on the novel contributions your work makes towards the following topic: {{topic}}.

Below is a list of relevant evidence retrieved from your paper:
{{evidence}}

Based on the evidence, output a list of 1 to {{k}} DIVERSE, specific arguments for your position that are all supported by the evidence. Each argument should have a corresponding "argument_title", which is a brief statement of your argument (e.g., Better Efficiency for Training), a "description" explaining your argument and mentioning specific excerpts from your evidence pool, and finally, a list of all "evidence" IDs, which are the integers of the evidence in the input list, that best support your argument. For example, if Evidence #1 and #2 best support your argument, then evidence should be [1,2] (depending on your argument, this list can have more or less than two items). Each argument should make a unique point.

Output your list of arguments in the following format:
    "argument_title": <should be a brief, 10-15 word string where the value is the argument_title>,
    "description": <1-2 sentence string explaining the argument, including specific excerpts from the evidence pool>,
    "evidence": <list of integer IDs citing which evidence from the input list best support your argument>

Reply with a single JSON object inside one ```json fenced block and nothing else. The object has one key, "arguments", whose value is the list of argument objects described above.
)";

constexpr std::string_view kRelevance =
    R"(Your objective is to check if a given evidence is relevant to a claim or not (relevancy means evidence that helps either support, refute, or clarify the given claim).

Claim: {{claim}}
Description of Claim: {{claim_description}}
Evidence: {{evidence}}

Fill out the following schema:
"supports_claim": <"Yes"/"No" if the evidence supports the claim>,
"refutes_claim": <"Yes"/"No" if the evidence refutes the opposition's claim>
"clarifies_claim": <"Yes"/"No" if the evidence clarifies the claim>,
"irrelevant_to_claim": <"Yes"/"No" if the evidence is irrelevant to the claim>,

Reply with a single JSON object inside one ```json fenced block and nothing else, using exactly these four keys.
)";

constexpr std::string_view kPersonaHeader =
    R"(You are the author of the paper, '{{paper_title}}'. The abstract of your work is: {{paper_abstract}}.

You are debating another author (Opposition), whose work is titled, '{{opposition_title}}', and abstract is: {{opposition_abstract}}.

You are debating the other author on how and why your paper makes a better contribution towards the following topic:
Topic: {{topic}}
Topic Description: {{topic_description}}

Here are your claimed contributions towards the topic:
{{contributions}}

)";

constexpr std::string_view kPresentTail =
    R"(Given the above, make an argument for a specific reason why your contributions towards the topic, Topic: {{topic}}, are better than the opposition's. If you feel that you do not contribute to the given topic or your contributions ARE NOT better than the opposition's, then state so by conceding to the opposition (e.g., 'I do not believe my paper makes a better contribution than yours') and explain why.
)";

constexpr std::string_view kRespondTail =
    R"(Here is your conversation debate history with the opposition paper. You must respond to the last argument presented by your opposition in debate. A response may consist of (1) an acknowledgment of the opposition's previous response, (2) answering any of the questions about your paper brought up by the opposition, (3) asking any clarifying questions based on the opposition's claims and reasoning, (4) any clarifications of your own presented arguments based on the opposition, and/or (5) if you feel that the opposition's claim is strong and you do not have sufficient grounds to refute it, then a concession to your opposition.

conversation_history:
{{conversation_history}}
)";

constexpr std::string_view kReviseTail =
    R"(Based on the debate history and your/your opposition's arguments and evidence, you must construct a new, stronger argument related to the topic. This consists of an argument that addresses/is robust to any doubts or clarifying questions made by the opposition which you feel are valid. If based on the debate, you feel that you do not contribute to the given topic or your contributions ARE NOT better than the opposition's, then state so by conceding to the opposition (e.g., 'I do not believe my paper makes a better contribution than yours') and explain why.

conversation_history:
{{conversation_history}}
)";

constexpr std::string_view kComparativeInstruction =
    R"(Write a paragraph-long comparative summary of the two papers. Begin with their similarities (which ideas or aspects overlap between the two papers?) and then describe their differences (what makes each paper unique) in novelty. Focus more on the differences than the similarities.
)";

constexpr std::string_view kSingleStageHead =
    R"(You are given two scientific papers. For each paper you are given its title, abstract, and introduction.

Paper 0 Title: {{paper_0_title}}
Paper 0 Abstract: {{paper_0_abstract}}
Paper 0 Introduction: {{paper_0_introduction}}

Paper 1 Title: {{paper_1_title}}
Paper 1 Abstract: {{paper_1_abstract}}
Paper 1 Introduction: {{paper_1_introduction}}

)";

constexpr std::string_view kPaperSummary =
    R"(You are given the title, abstract, and introduction of a scientific paper.

Title: {{paper_title}}
Abstract: {{paper_abstract}}
Introduction: {{paper_introduction}}

Write a paragraph-long summary of the paper that states the task it addresses, the method it proposes, and its novel contributions.
)";

constexpr std::string_view kContrastiveHead =
    R"(You are given summaries of two scientific papers.

Paper 0 Title: {{paper_0_title}}
Paper 0 Summary: {{paper_0_summary}}

Paper 1 Title: {{paper_1_title}}
Paper 1 Summary: {{paper_1_summary}}

Using only these summaries, complete the following task.
)";

std::string concat(std::string_view a, std::string_view b) {
    std::string out(a);
    out.append(b);
    return out;
}

bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

struct Placeholder {
    std::size_t begin;
    std::size_t end;  // one past the closing braces
    std::string_view name;
};

std::vector<Placeholder> scan(std::string_view body) {
    std::vector<Placeholder> out;
    std::size_t pos = 0;
    while ((pos = body.find("{{", pos)) != std::string_view::npos) {
        std::size_t close = body.find("}}", pos + 2);
        if (close == std::string_view::npos) break;
        std::string_view name = body.substr(pos + 2, close - pos - 2);
        if (!name.empty() && std::all_of(name.begin(), name.end(), is_name_char)) {
            out.push_back({pos, close + 2, name});
            pos = close + 2;
        } else {
            pos += 2;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::mod_generate_topics: return "mod_generate_topics";
        case TemplateId::mod_is_expand: return "mod_is_expand";
        case TemplateId::mod_summarize: return "mod_summarize";
        case TemplateId::persona_generate_arguments: return "persona_generate_arguments";
        case TemplateId::persona_relevance: return "persona_relevance";
        case TemplateId::persona_present: return "persona_present";
        case TemplateId::persona_respond: return "persona_respond";
        case TemplateId::persona_revise: return "persona_revise";
        case TemplateId::baseline_single_stage: return "baseline_single_stage";
        case TemplateId::baseline_paper_summary: return "baseline_paper_summary";
        case TemplateId::baseline_contrastive_summary: return "baseline_contrastive_summary";
    }
    return "unknown";
}

std::optional<TemplateId> template_from_string(std::string_view name) {
    for (auto id : kDebateTemplates) {
        if (to_string(id) == name) return id;
    }
    for (auto id : kBaselineTemplates) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

std::span<const TemplateId> debate_templates() { return kDebateTemplates; }
std::span<const TemplateId> baseline_templates() { return kBaselineTemplates; }

std::string_view template_body(TemplateId id) {
    switch (id) {
        case TemplateId::mod_generate_topics: return kGenerateTopics;
        case TemplateId::mod_is_expand: return kIsExpand;
        case TemplateId::mod_summarize: return kSummarize;
        case TemplateId::persona_generate_arguments: return kGenerateArguments;
        case TemplateId::persona_relevance: return kRelevance;
        case TemplateId::persona_present: {
            static const std::string body = concat(kPersonaHeader, kPresentTail);
            return body;
        }
        case TemplateId::persona_respond: {
            static const std::string body = concat(kPersonaHeader, kRespondTail);
            return body;
        }
        case TemplateId::persona_revise: {
            static const std::string body = concat(kPersonaHeader, kReviseTail);
            return body;
        }
        case TemplateId::baseline_single_stage: {
            static const std::string body = concat(kSingleStageHead, kComparativeInstruction);
            return body;
        }
        case TemplateId::baseline_paper_summary: return kPaperSummary;
        case TemplateId::baseline_contrastive_summary: {
            static const std::string body = concat(kContrastiveHead, kComparativeInstruction);
            return body;
        }
    }
    return {};
}

std::vector<std::string> template_placeholders(TemplateId id) {
    std::vector<std::string> names;
    for (const auto& p : scan(template_body(id))) {
        if (std::find(names.begin(), names.end(), p.name) == names.end()) {
            names.emplace_back(p.name);
        }
    }
    return names;
}

RenderResult render_text(std::string_view body, const Bindings& bindings) {
    RenderResult result;
    std::set<std::string, std::less<>> used;
    std::size_t cursor = 0;
    for (const auto& p : scan(body)) {
        auto it = bindings.find(p.name);
        if (it == bindings.end()) {
            throw RenderError("unbound placeholder '" + std::string(p.name) + "'",
                              std::string(p.name));
        }
        result.text.append(body.substr(cursor, p.begin - cursor));
        result.text.append(it->second);
        used.emplace(p.name);
        cursor = p.end;
    }
    result.text.append(body.substr(cursor));
    for (const auto& [name, value] : bindings) {
        if (!used.contains(name)) result.unused_bindings.push_back(name);
    }
    return result;
}

RenderResult render_prompt_checked(TemplateId id, const Bindings& bindings) {
    try {
        return render_text(template_body(id), bindings);
    } catch (const RenderError& e) {
        throw RenderError(std::string(e.what()) + " in template " + std::string(to_string(id)),
                          e.placeholder());
    }
}

std::string render_prompt(TemplateId id, const Bindings& bindings) {
    return render_prompt_checked(id, bindings).text;
}

}  // namespace tod
