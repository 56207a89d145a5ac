#include "tod/schemas.hpp"

#include <cctype>
#include <string>

namespace tod {
namespace {

using nlohmann::json;

const json& require(const json& object, const std::string& key, const std::string& where) {
    if (!object.is_object()) throw ValidationError(where + " must be an object");
    auto it = object.find(key);
    if (it == object.end()) throw ValidationError(where + " is missing \"" + key + "\"");
    return *it;
}

std::string require_string(const json& object, const std::string& key, const std::string& where,
                           bool non_empty) {
    const auto& value = require(object, key, where);
    if (!value.is_string()) throw ValidationError(where + "." + key + " must be a string");
    auto text = value.get<std::string>();
    if (non_empty && text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ValidationError(where + "." + key + " must not be empty");
    }
    return text;
}

// JSON booleans, or case-insensitive yes/no/true/false strings.
bool parse_flag(const json& value, const std::string& where) {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_string()) {
        std::string s = value.get<std::string>();
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        auto first = s.find_first_not_of(" \t.");
        auto last = s.find_last_not_of(" \t.");
        s = first == std::string::npos ? "" : s.substr(first, last - first + 1);
        if (s == "yes" || s == "true") return true;
        if (s == "no" || s == "false") return false;
    }
    throw ValidationError(where + " must be Yes/No or True/False, got " + value.dump());
}

std::vector<int> parse_id_list(const json& value, const std::string& where) {
    if (!value.is_array()) throw ValidationError(where + " must be a list of integers");
    std::vector<int> ids;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const auto& item = value[i];
        if (!item.is_number_integer()) {
            throw ValidationError(where + "[" + std::to_string(i) + "] must be an integer");
        }
        ids.push_back(item.get<int>());
    }
    return ids;
}

const json& list_payload(const json& doc, const std::string& key) {
    if (doc.is_array()) return doc;
    const auto& list = require(doc, key, "reply");
    if (!list.is_array()) throw ValidationError("reply." + key + " must be a list");
    return list;
}

}  // namespace

Schema<RelevanceVerdict> relevance_schema() {
    return {"relevance", [](const json& doc) {
                RelevanceVerdict v;
                v.supports = parse_flag(require(doc, "supports_claim", "reply"), "supports_claim");
                v.refutes = parse_flag(require(doc, "refutes_claim", "reply"), "refutes_claim");
                v.clarifies = parse_flag(require(doc, "clarifies_claim", "reply"), "clarifies_claim");
                v.irrelevant =
                    parse_flag(require(doc, "irrelevant_to_claim", "reply"), "irrelevant_to_claim");
                return v;
            }};
}

Schema<std::vector<Claim>> arguments_schema(std::size_t evidence_count, int k) {
    return {"arguments", [evidence_count, k](const json& doc) {
                const auto& list = list_payload(doc, "arguments");
                if (list.empty()) throw ValidationError("reply lists no arguments");
                std::vector<Claim> claims;
                for (std::size_t i = 0; i < list.size() && static_cast<int>(i) < k; ++i) {
                    auto where = "arguments[" + std::to_string(i) + "]";
                    Claim claim;
                    claim.claim_id = static_cast<int>(i);
                    claim.title = require_string(list[i], "argument_title", where, true);
                    claim.description = require_string(list[i], "description", where, false);
                    claim.evidence_ids =
                        parse_id_list(require(list[i], "evidence", where), where + ".evidence");
                    if (claim.evidence_ids.empty()) {
                        throw ValidationError(where + ".evidence must cite at least one item");
                    }
                    for (int id : claim.evidence_ids) {
                        if (id < 0 || static_cast<std::size_t>(id) >= evidence_count) {
                            throw ValidationError(where + ".evidence cites id " + std::to_string(id) +
                                                  " but the evidence list has " +
                                                  std::to_string(evidence_count) + " items");
                        }
                    }
                    claims.push_back(std::move(claim));
                }
                return claims;
            }};
}

Schema<std::vector<SubtopicProposal>> subtopics_schema() {
    return {"subtopics", [](const json& doc) {
                const auto& list = list_payload(doc, "subtopics");
                std::vector<SubtopicProposal> out;
                for (std::size_t i = 0; i < list.size(); ++i) {
                    auto where = "subtopics[" + std::to_string(i) + "]";
                    SubtopicProposal p;
                    p.title = require_string(list[i], "topic_title", where, true);
                    p.description = require_string(list[i], "topic_description", where, false);
                    p.relevant_claims_a =
                        parse_id_list(require(list[i], "author_0_relevant_contributions", where),
                                      where + ".author_0_relevant_contributions");
                    p.relevant_claims_b =
                        parse_id_list(require(list[i], "author_1_relevant_contributions", where),
                                      where + ".author_1_relevant_contributions");
                    out.push_back(std::move(p));
                }
                return out;
            }};
}

Schema<ExpansionVerdict> expansion_schema() {
    return {"expansion", [](const json& doc) {
                ExpansionVerdict v;
                v.explanation = require_string(doc, "explanation", "reply", true);
                v.progression_of_arguments = parse_flag(
                    require(doc, "progression_of_arguments", "reply"), "progression_of_arguments");
                v.meaningful_questions =
                    parse_flag(require(doc, "meaningful_questions", "reply"), "meaningful_questions");
                v.clear_winner = parse_flag(require(doc, "clear_winner", "reply"), "clear_winner");
                return v;
            }};
}

}  // namespace tod
