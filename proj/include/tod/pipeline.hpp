#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tod/config.hpp"
#include "tod/corpus.hpp"
#include "tod/debate_tree.hpp"
#include "tod/gateway.hpp"
#include "tod/retrieval.hpp"
#include "tod/transcript.hpp"

namespace tod {

struct Providers {
    std::shared_ptr<ChatProvider> chat;
    std::shared_ptr<EmbeddingProvider> embedding;  // unused by baselines and tod_no_sd
};

struct RunArtifacts {
    Variant variant = Variant::tod;
    std::optional<DebateTree> tree;  // present iff the variant builds a tree
    std::string summary;
    Transcript transcript;
    RunConfig config_snapshot;  // credentials removed
};

// Each run_* requires config.variant to match and throws PreconditionError
// otherwise. Transport exhaustion and refusals propagate; per-node structured
// output failures degrade the node and are recorded.
RunArtifacts run_tree_of_debate(const PairSample& pair, const RunConfig& config,
                                const Providers& providers);
RunArtifacts run_no_tree(const PairSample& pair, const RunConfig& config, const Providers& providers);
RunArtifacts run_no_sd(const PairSample& pair, const RunConfig& config, const Providers& providers);
RunArtifacts run_single_stage(const PairSample& pair, const RunConfig& config,
                              const Providers& providers);
RunArtifacts run_two_stage(const PairSample& pair, const RunConfig& config, const Providers& providers);

RunArtifacts run_variant(const PairSample& pair, const RunConfig& config, const Providers& providers);

// Merges all proposals into one; descriptions become tagged blocks
// "<subtopic_N>title: description</subtopic_N>".
SubtopicProposal merge_proposals(const std::vector<SubtopicProposal>& proposals);

// "row-<n>" for dataset rows.
std::string pair_id(const PairSample& pair);

struct ArtifactPaths {
    std::filesystem::path directory;
    std::filesystem::path summary;
    std::optional<std::filesystem::path> tree;
    std::filesystem::path transcript;
    std::filesystem::path manifest;
};

// Writes summary.txt, tree.json (tree variants only), transcript.md and
// manifest.json into `directory`, creating it if needed.
ArtifactPaths write_artifacts(const RunArtifacts& artifacts, const PairSample& pair,
                              const std::filesystem::path& directory);

}  // namespace tod
