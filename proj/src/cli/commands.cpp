#include "tod/commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include "tod/config.hpp"
#include "tod/http_providers.hpp"
#include "tod/mock.hpp"
#include "tod/pipeline.hpp"

namespace tod::cli {
namespace {

struct RunOptions {
    std::string dataset;
    int row = 1;
    std::string pair;
    std::string variant = "tod";
    std::string out = "out";
    std::string config_file;
    std::string mock;
    int delta = kDefaultDelta;
    int k = kDefaultK;
    int max_depth = kDefaultMaxDepth;
    int segment_sentences = kDefaultSegmentSentences;
    int concurrency = 1;
    int max_in_flight = 4;
    int repair_rounds = 2;
    int max_retries = 3;
    long retry_delay_ms = 500;
    std::string chat_url;
    std::string chat_model;
    std::string embed_url;
    std::string embed_model;
    std::string seed_label;

    // Flags given explicitly on the command line override the config file.
    std::map<std::string, CLI::Option*> flags;

    bool given(const std::string& name) const {
        auto it = flags.find(name);
        return it != flags.end() && it->second->count() > 0;
    }
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool with_variant) {
    auto flag = [&](const std::string& name, auto& target, const std::string& help) {
        o.flags[name] = cmd->add_option("--" + name, target, help);
    };
    flag("dataset", o.dataset, "Paper-pair TSV file");
    flag("row", o.row, "1-based data row of --dataset");
    flag("pair", o.pair, "YAML file with topic, topic_description, paper_a, paper_b (instead of --dataset)");
    if (with_variant) {
        o.flags["variant"] = cmd->add_option("--variant", o.variant, "Pipeline variant")
                                 ->check(CLI::IsMember({"tod", "tod_no_tree", "tod_no_sd",
                                                        "single_stage", "two_stage"}));
    }
    flag("out", o.out, "Output directory");
    flag("config", o.config_file, "YAML config file");
    flag("mock", o.mock, "Mock script (YAML); replaces both providers");
    flag("delta", o.delta, "Segments retrieved per query");
    flag("k", o.k, "Claims per persona and subtopics per node");
    flag("max-depth", o.max_depth, "Maximum tree depth");
    flag("segment-sentences", o.segment_sentences, "Sentences per retrieval segment");
    flag("concurrency", o.concurrency, "Sibling nodes debated at once");
    flag("max-in-flight", o.max_in_flight, "Provider requests at once");
    flag("repair-rounds", o.repair_rounds, "Re-prompts for an invalid structured reply");
    flag("max-retries", o.max_retries, "Transport retries per call");
    flag("retry-delay-ms", o.retry_delay_ms, "Base retry backoff in milliseconds");
    flag("chat-url", o.chat_url, "Chat endpoint base URL (env TOD_CHAT_BASE_URL)");
    flag("chat-model", o.chat_model, "Chat model name (env TOD_CHAT_MODEL)");
    flag("embed-url", o.embed_url, "Embedding endpoint base URL (env TOD_EMBED_BASE_URL)");
    flag("embed-model", o.embed_model, "Embedding model name (env TOD_EMBED_MODEL)");
    flag("seed-label", o.seed_label, "Label recorded with the run");
}

RunConfig resolve_config(const RunOptions& o) {
    RunConfig c;
    apply_env(c, process_env);
    if (!o.config_file.empty()) apply_config_file(c, o.config_file);
    if (o.given("variant")) c.variant = *variant_from_string(o.variant);
    if (o.given("delta")) c.delta = o.delta;
    if (o.given("k")) c.k = o.k;
    if (o.given("max-depth")) c.max_depth = o.max_depth;
    if (o.given("segment-sentences")) c.segment_sentences = o.segment_sentences;
    if (o.given("concurrency")) c.concurrency = o.concurrency;
    if (o.given("max-in-flight")) c.max_in_flight = o.max_in_flight;
    if (o.given("repair-rounds")) c.repair_rounds = o.repair_rounds;
    if (o.given("max-retries")) c.retry.max_retries = o.max_retries;
    if (o.given("retry-delay-ms")) c.retry.base_delay = std::chrono::milliseconds(o.retry_delay_ms);
    if (o.given("chat-url")) c.chat.base_url = o.chat_url;
    if (o.given("chat-model")) c.chat.model = o.chat_model;
    if (o.given("embed-url")) c.embedding.base_url = o.embed_url;
    if (o.given("embed-model")) c.embedding.model = o.embed_model;
    if (o.given("seed-label")) c.seed_label = o.seed_label;
    c.validate();
    return c;
}

PairSample select_pair(const RunOptions& o) {
    if (!o.pair.empty() && !o.dataset.empty()) throw ConfigError("use either --dataset or --pair");
    if (!o.pair.empty()) return load_pair_file(o.pair);
    if (o.dataset.empty()) throw ConfigError("one of --dataset or --pair is required");
    auto samples = load_dataset(o.dataset);
    if (o.row < 1 || o.row > static_cast<int>(samples.size())) {
        throw ConfigError("--row " + std::to_string(o.row) + " is outside 1.." +
                          std::to_string(samples.size()));
    }
    return samples[static_cast<std::size_t>(o.row - 1)];
}

Providers make_providers(const RunOptions& o, const RunConfig& c) {
    if (!o.mock.empty()) {
        auto script = load_mock_script(o.mock);
        return Providers{std::make_shared<ScriptedChatProvider>(script.chat),
                         std::make_shared<MockEmbeddingProvider>(script.embedding)};
    }
    if (c.chat.base_url.empty() || c.chat.model.empty()) {
        throw ConfigError("no chat endpoint: set --chat-url/--chat-model, the config file, or "
                          "TOD_CHAT_BASE_URL/TOD_CHAT_MODEL (or use --mock)");
    }
    Providers p{std::make_shared<HttpChatProvider>(c.chat), nullptr};
    if (builds_tree(c.variant) && c.variant != Variant::tod_no_sd) {
        if (c.embedding.base_url.empty() || c.embedding.model.empty()) {
            throw ConfigError("no embedding endpoint: set --embed-url/--embed-model, the config "
                              "file, or TOD_EMBED_BASE_URL/TOD_EMBED_MODEL");
        }
        p.embedding = std::make_shared<HttpEmbeddingProvider>(c.embedding);
    }
    return p;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

int cmd_run(const RunOptions& o, std::ostream& out) {
    auto config = resolve_config(o);
    auto pair = select_pair(o);
    auto artifacts = run_variant(pair, config, make_providers(o, config));
    auto dir = std::filesystem::path(o.out) / pair_id(pair) / std::string(to_string(config.variant));
    auto paths = write_artifacts(artifacts, pair, dir);
    out << "summary: " << paths.summary.string() << "\n";
    if (paths.tree) out << "tree: " << paths.tree->string() << "\n";
    out << "transcript: " << paths.transcript.string() << "\n";
    out << "manifest: " << paths.manifest.string() << "\n";
    return kExitOk;
}

int cmd_compare(const RunOptions& o, std::ostream& out, std::ostream& err) {
    auto base = resolve_config(o);
    auto pair = select_pair(o);
    auto pair_dir = std::filesystem::path(o.out) / pair_id(pair);
    nlohmann::ordered_json manifest;
    manifest["pair_id"] = pair_id(pair);
    manifest["topic"] = pair.topic_title;
    manifest["variants"] = nlohmann::ordered_json::array();
    std::string comparison = "# Comparison: " + pair.topic_title + "\n\n" + "- Paper A: " +
                             pair.paper_a.title + "\n- Paper B: " + pair.paper_b.title + "\n";
    bool failed = false;
    for (auto variant : kAllVariants) {
        auto name = std::string(to_string(variant));
        auto config = base;
        config.variant = variant;
        nlohmann::ordered_json entry;
        entry["variant"] = name;
        comparison += "\n## " + name + "\n\n";
        try {
            auto artifacts = run_variant(pair, config, make_providers(o, config));
            write_artifacts(artifacts, pair, pair_dir / name);
            entry["status"] = "ok";
            entry["summary"] = name + "/summary.txt";
            comparison += artifacts.summary + "\n";
            out << name << ": ok " << (pair_dir / name / "summary.txt").string() << "\n";
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            failed = true;
            entry["status"] = "failed";
            entry["error"] = e.what();
            comparison += "(failed: " + std::string(e.what()) + ")\n";
            err << name << ": failed: " << e.what() << "\n";
        }
        manifest["variants"].push_back(entry);
    }
    std::filesystem::create_directories(pair_dir);
    std::ofstream(pair_dir / "manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
    std::ofstream(pair_dir / "comparison.md", std::ios::binary) << comparison;
    out << "manifest: " << (pair_dir / "manifest.json").string() << "\n";
    return failed ? kExitFailure : kExitOk;
}

int cmd_validate_dataset(const std::string& path, std::ostream& out, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    auto report = validate_dataset(in);
    out << format_dataset_report(report);
    for (const auto& e : report.errors) err << "row " << e.row << ": " << e.message << "\n";
    return report.errors.empty() ? kExitOk : kExitFailure;
}

int cmd_inspect_tree(const std::string& path, const std::string& node, std::ostream& out) {
    auto tree = deserialize_tree(read_text(path));
    std::optional<std::string> selected;
    if (!node.empty()) selected = node;
    out << render_tree_text(tree, selected);
    return kExitOk;
}

int cmd_render_prompts(const std::vector<std::string>& ids, bool all, const std::string& bindings_path,
                       const std::string& out_dir, std::ostream& out, std::ostream& err) {
    std::vector<TemplateId> selected;
    if (all) {
        auto reg = debate_templates();
        selected.assign(reg.begin(), reg.end());
    }
    for (const auto& name : ids) {
        auto id = template_from_string(name);
        auto reg = debate_templates();
        if (!id || std::find(reg.begin(), reg.end(), *id) == reg.end()) {
            std::string valid;
            for (auto t : reg) valid += (valid.empty() ? "" : ", ") + std::string(to_string(t));
            throw ConfigError("unknown template \"" + name + "\"; valid ids: " + valid);
        }
        if (std::find(selected.begin(), selected.end(), *id) == selected.end()) selected.push_back(*id);
    }
    if (selected.empty()) throw ConfigError("name a template with --template or use --all");
    auto file = load_bindings(bindings_path);

    std::set<std::string> used;
    std::vector<std::pair<TemplateId, std::string>> rendered;
    for (auto id : selected) {
        auto bindings = bindings_for(file, id);
        auto result = render_prompt_checked(id, bindings);
        for (const auto& name : template_placeholders(id)) used.insert(name);
        rendered.emplace_back(id, std::move(result.text));
    }
    std::set<std::string> unused;
    for (const auto& [name, value] : file.common) {
        if (!used.count(name)) unused.insert(name);
    }
    for (const auto& [id, bindings] : file.per_template) {
        if (std::find(selected.begin(), selected.end(), id) == selected.end()) continue;
        auto names = template_placeholders(id);
        for (const auto& [name, value] : bindings) {
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                unused.insert(std::string(to_string(id)) + "." + name);
            }
        }
    }
    for (const auto& name : unused) err << "warning: binding \"" << name << "\" is not used\n";

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (const auto& [id, text] : rendered) {
            auto path = std::filesystem::path(out_dir) / (std::string(to_string(id)) + ".txt");
            std::ofstream(path, std::ios::binary) << text;
            out << path.string() << "\n";
        }
    } else if (rendered.size() == 1) {
        out << rendered.front().second;
    } else {
        for (const auto& [id, text] : rendered) {
            out << "=== " << to_string(id) << " ===\n" << text << "\n";
        }
    }
    return kExitOk;
}

std::string yaml_text(const YAML::Node& node, const std::string& key, const std::string& where,
                      bool required) {
    if (!node[key]) {
        if (required) throw ConfigError(where + " is missing \"" + key + "\"");
        return "";
    }
    return node[key].as<std::string>();
}

PaperRecord paper_from_yaml(const YAML::Node& node, const std::string& id, const std::string& where) {
    if (!node || !node.IsMap()) throw ConfigError(where + " must be a mapping");
    PaperRecord p;
    p.paper_id = id;
    p.title = yaml_text(node, "title", where, true);
    p.abstract = yaml_text(node, "abstract", where, true);
    p.introduction = yaml_text(node, "introduction", where, false);
    if (node["body"]) p.body = node["body"].as<std::string>();
    if (node["source_link"]) p.source_link = node["source_link"].as<std::string>();
    if (p.title.empty() || p.abstract.empty()) {
        throw ConfigError(where + " needs a non-empty title and abstract");
    }
    return p;
}

}  // namespace

PairSample load_pair_file(const std::string& path) {
    try {
        auto root = YAML::Load(read_text(path));
        if (!root.IsMap()) throw ConfigError(path + ": pair file must be a mapping");
        PairSample pair;
        pair.topic_title = yaml_text(root, "topic", path, true);
        if (root["topic_description"]) pair.topic_description = root["topic_description"].as<std::string>();
        pair.paper_a = paper_from_yaml(root["paper_a"], "pair.paper1", path + ": paper_a");
        pair.paper_b = paper_from_yaml(root["paper_b"], "pair.paper2", path + ": paper_b");
        return pair;
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

BindingsFile load_bindings(const std::string& path) {
    BindingsFile file;
    try {
        auto root = YAML::Load(read_text(path));
        if (root.IsNull()) return file;
        if (!root.IsMap()) throw ConfigError(path + ": bindings must be a mapping");
        for (const auto& kv : root) {
            auto key = kv.first.as<std::string>();
            if (kv.second.IsMap()) {
                auto id = template_from_string(key);
                if (!id) throw ConfigError(path + ": \"" + key + "\" is not a template id");
                for (const auto& b : kv.second) {
                    file.per_template[*id][b.first.as<std::string>()] = b.second.as<std::string>();
                }
            } else {
                file.common[key] = kv.second.IsNull() ? std::string() : kv.second.as<std::string>();
            }
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return file;
}

Bindings bindings_for(const BindingsFile& file, TemplateId id) {
    auto names = template_placeholders(id);
    Bindings out;
    for (const auto& [name, value] : file.common) {
        if (std::find(names.begin(), names.end(), name) != names.end()) out[name] = value;
    }
    if (auto it = file.per_template.find(id); it != file.per_template.end()) {
        for (const auto& [name, value] : it->second) out[name] = value;
    }
    return out;
}

std::string format_dataset_report(const DatasetReport& report) {
    const auto& c = report.counts;
    std::ostringstream s;
    s << report.data_rows << " rows";
    if (!report.errors.empty()) s << " (" << report.errors.size() << " invalid)";
    s << "\n\n";
    auto row = [&](const std::string& label, int method, int task, int total) {
        s << std::left << std::setw(10) << label << std::right << std::setw(8) << method
          << std::setw(6) << task << std::setw(7) << total << "\n";
    };
    s << std::left << std::setw(10) << "" << std::right << std::setw(8) << "Method" << std::setw(6)
      << "Task" << std::setw(7) << "Total" << "\n";
    row("Cited", c.cited_method, c.cited_task, c.cited());
    row("Not cited", c.not_cited_method, c.not_cited_task, c.not_cited());
    row("Total", c.method(), c.task(), c.total());
    return s.str();
}

std::string render_tree_text(const DebateTree& tree, const std::optional<std::string>& node) {
    std::vector<std::string> ids;
    if (node) {
        if (!tree.contains(*node)) {
            // Nearest existing ancestor, to list what can be selected.
            std::string parent = *node;
            while (!parent.empty() && !tree.contains(parent)) {
                auto dot = parent.rfind('.');
                parent = dot == std::string::npos ? "" : parent.substr(0, dot);
            }
            if (parent.empty()) parent = tree.root_id();
            auto children = tree.node(parent).children;
            std::string valid = parent;
            for (const auto& c : children) valid += ", " + c;
            throw ConfigError("no node \"" + *node + "\"; valid here: " + valid);
        }
        ids.push_back(*node);
    } else {
        ids = tree.preorder();
    }
    std::string out;
    for (const auto& id : ids) {
        auto n = tree.node(id);
        std::string pad(static_cast<std::size_t>(node ? 0 : 2 * n.depth), ' ');
        if (!out.empty()) out += "\n";
        out += pad + "[" + n.node_id + "] " + n.title + "\n";
        out += pad + "  status: " + std::string(to_string(n.status)) + ", depth " +
               std::to_string(n.depth) + "\n";
        if (!n.description.empty()) out += pad + "  description: " + n.description + "\n";
        if (n.revised_argument_a) out += pad + "  Author 0: " + *n.revised_argument_a + "\n";
        if (n.revised_argument_b) out += pad + "  Author 1: " + *n.revised_argument_b + "\n";
        if (n.verdict) {
            auto flag = [](bool b) { return b ? "true" : "false"; };
            out += pad + "  verdict: progression_of_arguments=" +
                   flag(n.verdict->progression_of_arguments) +
                   " meaningful_questions=" + flag(n.verdict->meaningful_questions) +
                   " clear_winner=" + flag(n.verdict->clear_winner) +
                   (n.verdict->degraded ? " (degraded)" : "") + "\n";
        }
        for (const auto& note : n.notes) out += pad + "  note: " + note + "\n";
    }
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tree-structured debate between two papers, with baselines and ablations.", "tod"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run one pipeline variant on a paper pair");
    add_run_options(run, run_opts, true);

    RunOptions compare_opts;
    auto* compare = app.add_subcommand("compare", "Run all five variants on a paper pair");
    add_run_options(compare, compare_opts, false);

    std::string dataset_path;
    auto* validate = app.add_subcommand("validate-dataset", "Check a paper-pair TSV and count categories");
    validate->add_option("path", dataset_path, "TSV file")->required();

    std::string tree_path;
    std::string node_id;
    auto* inspect = app.add_subcommand("inspect-tree", "Print a tree document as indented text");
    inspect->add_option("path", tree_path, "tree.json file")->required();
    inspect->add_option("--node", node_id, "Show only this node id (e.g. 0.1)");

    std::vector<std::string> template_ids;
    bool all_templates = false;
    std::string bindings_path;
    std::string prompts_out;
    auto* render = app.add_subcommand("render-prompts", "Render prompt templates with bindings");
    render->add_option("--template", template_ids, "Template id; repeatable");
    render->add_flag("--all", all_templates, "Render all eight templates");
    render->add_option("--bindings", bindings_path, "YAML bindings file")->required();
    render->add_option("--out", prompts_out, "Write <id>.txt files here instead of stdout");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) return cmd_run(run_opts, out);
        if (*compare) return cmd_compare(compare_opts, out, err);
        if (*validate) return cmd_validate_dataset(dataset_path, out, err);
        if (*inspect) return cmd_inspect_tree(tree_path, node_id, out);
        if (*render) {
            return cmd_render_prompts(template_ids, all_templates, bindings_path, prompts_out, out, err);
        }
    } catch (const TransportError& e) {
        err << "error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const ContentError& e) {
        err << "error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace tod::cli
