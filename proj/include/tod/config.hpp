#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tod/gateway.hpp"
#include "tod/http_providers.hpp"
#include "tod/retry.hpp"

namespace tod {

enum class Variant { tod, tod_no_tree, tod_no_sd, single_stage, two_stage };

inline constexpr std::array<Variant, 5> kAllVariants = {
    Variant::tod, Variant::tod_no_tree, Variant::tod_no_sd, Variant::single_stage,
    Variant::two_stage};

std::string_view to_string(Variant variant);
std::optional<Variant> variant_from_string(std::string_view name);
bool builds_tree(Variant variant);

inline constexpr int kDefaultDelta = 5;
inline constexpr int kDefaultK = 3;
inline constexpr int kDefaultMaxDepth = 3;
inline constexpr int kDefaultSegmentSentences = 3;

struct RunConfig {
    int delta = kDefaultDelta;
    int k = kDefaultK;
    int max_depth = kDefaultMaxDepth;
    int segment_sentences = kDefaultSegmentSentences;
    SamplingTable sampling;
    Variant variant = Variant::tod;
    Endpoint chat;
    Endpoint embedding;
    int concurrency = 1;     // sibling nodes debated at once
    int max_in_flight = 4;   // provider requests at once
    int repair_rounds = 2;
    RetryPolicy retry;
    std::string seed_label;  // recorded only

    // Throws ConfigError naming the first bad field.
    void validate() const;
    // Copy with both API keys cleared.
    RunConfig redacted() const;

    bool operator==(const RunConfig&) const = default;
};

// Credentials are never written.
nlohmann::ordered_json config_to_json(const RunConfig& config);
// Inverse of config_to_json; `path` prefixes ParseError locations.
RunConfig config_from_json(const nlohmann::json& doc, const std::string& path = "");

// Layered sources, lowest precedence first: defaults, environment, YAML file,
// then flags applied by the caller.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

void apply_env(RunConfig& config, const EnvLookup& env);
void apply_config_text(RunConfig& config, std::string_view yaml, const std::string& origin);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

}  // namespace tod
