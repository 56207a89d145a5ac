#include <set>

#include "tod/debate_tree.hpp"

namespace tod {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kFormatName = "tree-of-debate";

ordered_json optional_text(const std::optional<std::string>& value) {
    return value ? ordered_json(*value) : ordered_json(nullptr);
}

ordered_json paper_json(const PaperRecord& p) {
    ordered_json out;
    out["paper_id"] = p.paper_id;
    out["title"] = p.title;
    out["abstract"] = p.abstract;
    out["introduction"] = p.introduction;
    out["body"] = optional_text(p.body);
    out["source_link"] = optional_text(p.source_link);
    return out;
}

ordered_json segment_json(const Segment& s) {
    ordered_json out;
    out["segment_id"] = s.segment_id;
    out["paper_id"] = s.paper_id;
    out["text"] = s.text;
    out["sentence_count"] = s.sentence_count;
    return out;
}

ordered_json segments_json(const std::vector<Segment>& segments) {
    ordered_json out = ordered_json::array();
    for (const auto& s : segments) out.push_back(segment_json(s));
    return out;
}

ordered_json counter_json(const std::map<int, std::vector<Segment>>& counter) {
    ordered_json out = ordered_json::array();
    for (const auto& [claim_id, segments] : counter) {
        ordered_json item;
        item["claim_id"] = claim_id;
        item["segments"] = segments_json(segments);
        out.push_back(item);
    }
    return out;
}

ordered_json claims_json(const std::vector<Claim>& claims) {
    ordered_json out = ordered_json::array();
    for (const auto& c : claims) {
        ordered_json item;
        item["claim_id"] = c.claim_id;
        item["title"] = c.title;
        item["description"] = c.description;
        item["evidence_ids"] = c.evidence_ids;
        out.push_back(item);
    }
    return out;
}

ordered_json input_json(const DebateInput& in) {
    ordered_json out;
    out["claims"] = claims_json(in.claims);
    out["evidence"] = segments_json(in.evidence);
    out["counter"] = counter_json(in.counter);
    return out;
}

ordered_json pool_json(const EvidencePool& pool) {
    ordered_json out;
    out["supporting"] = segments_json(pool.supporting);
    out["counter"] = counter_json(pool.counter);
    out["unaddressed"] = std::vector<int>(pool.unaddressed.begin(), pool.unaddressed.end());
    return out;
}

ordered_json node_json(const TopicNode& n) {
    ordered_json out;
    out["id"] = n.node_id;
    out["title"] = n.title;
    out["description"] = n.description;
    out["depth"] = n.depth;
    out["parent"] = optional_text(n.parent);
    out["children"] = n.children;
    out["status"] = std::string(to_string(n.status));
    out["input_a"] = input_json(n.input_a);
    out["input_b"] = input_json(n.input_b);
    out["claims_a"] = claims_json(n.claims_a);
    out["claims_b"] = claims_json(n.claims_b);
    out["evidence_a"] = pool_json(n.evidence_a);
    out["evidence_b"] = pool_json(n.evidence_b);
    ordered_json turns = ordered_json::array();
    for (const auto& t : n.turns) {
        ordered_json item;
        item["speaker"] = std::string(to_string(t.speaker));
        item["stage"] = std::string(to_string(t.stage));
        item["text"] = t.text;
        turns.push_back(item);
    }
    out["turns"] = turns;
    out["revised_argument_a"] = optional_text(n.revised_argument_a);
    out["revised_argument_b"] = optional_text(n.revised_argument_b);
    if (n.verdict) {
        ordered_json v;
        v["explanation"] = n.verdict->explanation;
        v["progression_of_arguments"] = n.verdict->progression_of_arguments;
        v["meaningful_questions"] = n.verdict->meaningful_questions;
        v["clear_winner"] = n.verdict->clear_winner;
        v["degraded"] = n.verdict->degraded;
        out["verdict"] = v;
    } else {
        out["verdict"] = nullptr;
    }
    out["notes"] = n.notes;
    return out;
}

// Reader helpers; every failure names the JSON pointer of the bad value.

const json& get(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError("expected an object", path);
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing field \"" + key + "\"", path);
    return *it;
}

std::string read_string(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = get(obj, key, path);
    if (!v.is_string()) throw ParseError("expected a string", path + "/" + key);
    return v.get<std::string>();
}

std::optional<std::string> read_optional_string(const json& obj, const std::string& key,
                                                const std::string& path) {
    const auto& v = get(obj, key, path);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) throw ParseError("expected a string or null", path + "/" + key);
    return v.get<std::string>();
}

int read_int(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = get(obj, key, path);
    if (!v.is_number_integer()) throw ParseError("expected an integer", path + "/" + key);
    return v.get<int>();
}

bool read_bool(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = get(obj, key, path);
    if (!v.is_boolean()) throw ParseError("expected a boolean", path + "/" + key);
    return v.get<bool>();
}

const json& read_array(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = get(obj, key, path);
    if (!v.is_array()) throw ParseError("expected a list", path + "/" + key);
    return v;
}

std::vector<int> read_ints(const json& obj, const std::string& key, const std::string& path) {
    const auto& list = read_array(obj, key, path);
    std::vector<int> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (!list[i].is_number_integer()) {
            throw ParseError("expected an integer", path + "/" + key + "/" + std::to_string(i));
        }
        out.push_back(list[i].get<int>());
    }
    return out;
}

std::vector<std::string> read_strings(const json& obj, const std::string& key,
                                      const std::string& path) {
    const auto& list = read_array(obj, key, path);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (!list[i].is_string()) {
            throw ParseError("expected a string", path + "/" + key + "/" + std::to_string(i));
        }
        out.push_back(list[i].get<std::string>());
    }
    return out;
}

PaperRecord read_paper(const json& obj, const std::string& path) {
    PaperRecord p;
    p.paper_id = read_string(obj, "paper_id", path);
    p.title = read_string(obj, "title", path);
    p.abstract = read_string(obj, "abstract", path);
    p.introduction = read_string(obj, "introduction", path);
    p.body = read_optional_string(obj, "body", path);
    p.source_link = read_optional_string(obj, "source_link", path);
    return p;
}

std::vector<Segment> read_segments(const json& obj, const std::string& key, const std::string& path) {
    const auto& list = read_array(obj, key, path);
    std::vector<Segment> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto where = path + "/" + key + "/" + std::to_string(i);
        Segment s;
        s.segment_id = read_int(list[i], "segment_id", where);
        s.paper_id = read_string(list[i], "paper_id", where);
        s.text = read_string(list[i], "text", where);
        s.sentence_count = read_int(list[i], "sentence_count", where);
        out.push_back(std::move(s));
    }
    return out;
}

std::map<int, std::vector<Segment>> read_counter(const json& obj, const std::string& path) {
    const auto& list = read_array(obj, "counter", path);
    std::map<int, std::vector<Segment>> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto where = path + "/counter/" + std::to_string(i);
        int id = read_int(list[i], "claim_id", where);
        if (out.count(id)) throw ParseError("duplicate claim_id", where + "/claim_id");
        out[id] = read_segments(list[i], "segments", where);
    }
    return out;
}

std::vector<Claim> read_claims(const json& obj, const std::string& key, const std::string& path) {
    const auto& list = read_array(obj, key, path);
    std::vector<Claim> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto where = path + "/" + key + "/" + std::to_string(i);
        Claim c;
        c.claim_id = read_int(list[i], "claim_id", where);
        c.title = read_string(list[i], "title", where);
        c.description = read_string(list[i], "description", where);
        c.evidence_ids = read_ints(list[i], "evidence_ids", where);
        out.push_back(std::move(c));
    }
    return out;
}

DebateInput read_input(const json& obj, const std::string& key, const std::string& path) {
    auto where = path + "/" + key;
    const auto& v = get(obj, key, path);
    DebateInput in;
    in.claims = read_claims(v, "claims", where);
    in.evidence = read_segments(v, "evidence", where);
    in.counter = read_counter(v, where);
    return in;
}

EvidencePool read_pool(const json& obj, const std::string& key, const std::string& path) {
    auto where = path + "/" + key;
    const auto& v = get(obj, key, path);
    EvidencePool pool;
    pool.supporting = read_segments(v, "supporting", where);
    pool.counter = read_counter(v, where);
    for (int id : read_ints(v, "unaddressed", where)) pool.unaddressed.insert(id);
    return pool;
}

TopicNode read_node(const json& obj, const std::string& path) {
    TopicNode n;
    n.node_id = read_string(obj, "id", path);
    n.title = read_string(obj, "title", path);
    n.description = read_string(obj, "description", path);
    n.depth = read_int(obj, "depth", path);
    n.parent = read_optional_string(obj, "parent", path);
    n.children = read_strings(obj, "children", path);
    auto status_name = read_string(obj, "status", path);
    auto status = status_from_string(status_name);
    if (!status) throw ParseError("unknown status \"" + status_name + "\"", path + "/status");
    n.status = *status;
    n.input_a = read_input(obj, "input_a", path);
    n.input_b = read_input(obj, "input_b", path);
    n.claims_a = read_claims(obj, "claims_a", path);
    n.claims_b = read_claims(obj, "claims_b", path);
    n.evidence_a = read_pool(obj, "evidence_a", path);
    n.evidence_b = read_pool(obj, "evidence_b", path);
    const auto& turns = read_array(obj, "turns", path);
    for (std::size_t i = 0; i < turns.size(); ++i) {
        auto where = path + "/turns/" + std::to_string(i);
        auto speaker_name = read_string(turns[i], "speaker", where);
        auto stage_name = read_string(turns[i], "stage", where);
        auto speaker = side_from_string(speaker_name);
        auto stage = stage_from_string(stage_name);
        if (!speaker) throw ParseError("unknown speaker \"" + speaker_name + "\"", where + "/speaker");
        if (!stage) throw ParseError("unknown stage \"" + stage_name + "\"", where + "/stage");
        n.turns.push_back(DebateTurn{*speaker, *stage, read_string(turns[i], "text", where)});
    }
    n.revised_argument_a = read_optional_string(obj, "revised_argument_a", path);
    n.revised_argument_b = read_optional_string(obj, "revised_argument_b", path);
    const auto& verdict = get(obj, "verdict", path);
    if (!verdict.is_null()) {
        auto where = path + "/verdict";
        ExpansionVerdict v;
        v.explanation = read_string(verdict, "explanation", where);
        v.progression_of_arguments = read_bool(verdict, "progression_of_arguments", where);
        v.meaningful_questions = read_bool(verdict, "meaningful_questions", where);
        v.clear_winner = read_bool(verdict, "clear_winner", where);
        v.degraded = read_bool(verdict, "degraded", where);
        n.verdict = v;
    }
    n.notes = read_strings(obj, "notes", path);
    return n;
}

}  // namespace

ordered_json tree_to_json(const DebateTree& tree) {
    ordered_json doc;
    doc["format"] = std::string(kFormatName);
    doc["version"] = kTreeFormatVersion;
    doc["root"] = tree.root_id();
    doc["paper_a"] = paper_json(tree.paper_a());
    doc["paper_b"] = paper_json(tree.paper_b());
    doc["config"] = config_to_json(tree.config());
    auto nodes = tree.nodes();
    ordered_json list = ordered_json::array();
    std::set<std::string> written;
    for (const auto& id : tree.preorder()) {
        list.push_back(node_json(nodes.at(id)));
        written.insert(id);
    }
    for (const auto& [id, n] : nodes) {
        if (!written.count(id)) list.push_back(node_json(n));
    }
    doc["nodes"] = list;
    return doc;
}

std::string serialize_tree(const DebateTree& tree) { return tree_to_json(tree).dump(2) + "\n"; }

DebateTree tree_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("document must be an object", "");
    auto format = read_string(doc, "format", "");
    if (format != kFormatName) throw ParseError("unknown format \"" + format + "\"", "/format");
    const auto& version = get(doc, "version", "");
    if (!version.is_number_integer() || version.get<int>() != kTreeFormatVersion) {
        throw UnsupportedVersionError("unsupported tree document version " + version.dump() +
                                          "; this build reads version " +
                                          std::to_string(kTreeFormatVersion),
                                      "/version");
    }
    auto root = read_string(doc, "root", "");
    auto paper_a = read_paper(get(doc, "paper_a", ""), "/paper_a");
    auto paper_b = read_paper(get(doc, "paper_b", ""), "/paper_b");
    auto config = config_from_json(get(doc, "config", ""), "/config");

    std::map<std::string, TopicNode> nodes;
    std::map<std::string, std::string> where_of;
    const auto& list = read_array(doc, "nodes", "");
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto where = "/nodes/" + std::to_string(i);
        auto node = read_node(list[i], where);
        if (nodes.count(node.node_id)) throw ParseError("duplicate node id", where + "/id");
        where_of[node.node_id] = where;
        nodes.emplace(node.node_id, std::move(node));
    }
    if (!nodes.count(root)) throw ParseError("root node \"" + root + "\" is not listed", "/root");

    // Walk from the root: any revisit is a cycle or a shared child.
    std::set<std::string> visited;
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
        auto id = stack.back();
        stack.pop_back();
        if (!visited.insert(id).second) {
            throw ParseError("node \"" + id + "\" is reachable twice (cycle)", where_of.at(id));
        }
        const auto& n = nodes.at(id);
        for (std::size_t c = 0; c < n.children.size(); ++c) {
            const auto& child = n.children[c];
            auto where = where_of.at(id) + "/children/" + std::to_string(c);
            auto it = nodes.find(child);
            if (it == nodes.end()) throw ParseError("unknown child \"" + child + "\"", where);
            if (it->second.parent != id) {
                throw ParseError("child \"" + child + "\" names a different parent", where);
            }
            stack.push_back(child);
        }
    }
    for (const auto& [id, n] : nodes) {
        if (!visited.count(id)) throw ParseError("node is not connected to the root", where_of.at(id));
    }
    if (nodes.at(root).parent) throw ParseError("root has a parent", where_of.at(root) + "/parent");
    return DebateTree::restore(std::move(root), std::move(nodes), std::move(paper_a),
                               std::move(paper_b), std::move(config));
}

DebateTree deserialize_tree(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("not valid JSON: ") + e.what(), "");
    }
    return tree_from_json(doc);
}

}  // namespace tod
