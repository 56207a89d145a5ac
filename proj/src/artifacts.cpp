#include <fstream>

#include "tod/pipeline.hpp"

namespace tod {
namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace

ArtifactPaths write_artifacts(const RunArtifacts& artifacts, const PairSample& pair,
                              const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw ConfigError("cannot create " + directory.string() + ": " + ec.message());

    ArtifactPaths paths;
    paths.directory = directory;
    paths.summary = directory / "summary.txt";
    paths.transcript = directory / "transcript.md";
    paths.manifest = directory / "manifest.json";

    write_file(paths.summary, artifacts.summary);
    write_file(paths.transcript, render_transcript_markdown(artifacts.transcript));
    if (artifacts.tree) {
        paths.tree = directory / "tree.json";
        write_file(*paths.tree, serialize_tree(*artifacts.tree));
    } else {
        std::filesystem::remove(directory / "tree.json", ec);
    }

    nlohmann::ordered_json manifest;
    manifest["pair_id"] = pair_id(pair);
    manifest["row"] = pair.row;
    manifest["topic"] = pair.topic_title;
    manifest["paper_a"] = pair.paper_a.title;
    manifest["paper_b"] = pair.paper_b.title;
    manifest["variant"] = std::string(to_string(artifacts.variant));
    manifest["status"] = "ok";
    nlohmann::ordered_json files;
    files["summary"] = "summary.txt";
    files["tree"] = artifacts.tree ? nlohmann::ordered_json("tree.json") : nlohmann::ordered_json();
    files["transcript"] = "transcript.md";
    manifest["files"] = files;
    nlohmann::ordered_json calls;
    calls["chat"] = artifacts.transcript.count(TranscriptEntry::Kind::chat);
    calls["embedding"] = artifacts.transcript.count(TranscriptEntry::Kind::embedding);
    calls["notes"] = artifacts.transcript.count(TranscriptEntry::Kind::note);
    manifest["calls"] = calls;
    if (artifacts.tree) {
        nlohmann::ordered_json tree;
        tree["node_count"] = artifacts.tree->size();
        tree["max_depth_reached"] = artifacts.tree->max_depth_reached();
        manifest["tree"] = tree;
    } else {
        manifest["tree"] = nullptr;
    }
    manifest["config"] = config_to_json(artifacts.config_snapshot);
    write_file(paths.manifest, manifest.dump(2));
    return paths;
}

}  // namespace tod
