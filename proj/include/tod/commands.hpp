#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tod/corpus.hpp"
#include "tod/debate_tree.hpp"
#include "tod/prompts.hpp"

namespace tod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;     // configuration, input file or usage errors
inline constexpr int kExitProvider = 3;  // provider exhausted retries or refused

// Entry point; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Category counts laid out as a cited/not-cited by method/task table.
std::string format_dataset_report(const DatasetReport& report);

// Indented text render: title, description, both revised arguments and the
// verdict flags per node, preorder. With `node`, only that node's block.
std::string render_tree_text(const DebateTree& tree, const std::optional<std::string>& node = {});

// Bindings file: scalar top-level keys apply to every template; a top-level
// key naming a template holds bindings for that template only.
struct BindingsFile {
    Bindings common;
    std::map<TemplateId, Bindings> per_template;
};
BindingsFile load_bindings(const std::string& path);
Bindings bindings_for(const BindingsFile& file, TemplateId id);

// Paper pair from a YAML file with topic, topic_description, paper_a, paper_b.
PairSample load_pair_file(const std::string& path);

}  // namespace tod::cli
