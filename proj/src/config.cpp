#include "tod/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace tod {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json endpoint_json(const Endpoint& e) {
    ordered_json out;
    out["base_url"] = e.base_url;
    out["model"] = e.model;
    out["timeout_s"] = e.timeout_s;
    return out;
}

const json& field(const json& doc, const std::string& key, const std::string& path) {
    if (!doc.is_object()) throw ParseError("expected an object", path);
    auto it = doc.find(key);
    if (it == doc.end()) throw ParseError("missing field \"" + key + "\"", path);
    return *it;
}

template <class T>
T typed(const json& doc, const std::string& key, const std::string& path) {
    const auto& value = field(doc, key, path);
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!value.is_string()) throw ParseError("expected a string", path + "/" + key);
        } else if constexpr (std::is_integral_v<T>) {
            if (!value.is_number_integer()) throw ParseError("expected an integer", path + "/" + key);
        } else {
            if (!value.is_number()) throw ParseError("expected a number", path + "/" + key);
        }
        return value.get<T>();
    } catch (const json::exception& e) {
        throw ParseError(e.what(), path + "/" + key);
    }
}

Endpoint endpoint_from_json(const json& doc, const std::string& path) {
    Endpoint e;
    e.base_url = typed<std::string>(doc, "base_url", path);
    e.model = typed<std::string>(doc, "model", path);
    e.timeout_s = typed<long>(doc, "timeout_s", path);
    return e;
}

void apply_endpoint_yaml(Endpoint& e, const YAML::Node& node, const std::string& where) {
    if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
    for (const auto& kv : node) {
        auto key = kv.first.as<std::string>();
        if (key == "base_url") {
            e.base_url = kv.second.as<std::string>();
        } else if (key == "model") {
            e.model = kv.second.as<std::string>();
        } else if (key == "api_key") {
            e.api_key = kv.second.as<std::string>();
        } else if (key == "timeout_s") {
            e.timeout_s = kv.second.as<long>();
        } else {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }
}

void apply_yaml(RunConfig& c, const YAML::Node& root, const std::string& origin) {
    if (root.IsNull()) return;
    if (!root.IsMap()) throw ConfigError(origin + ": config must be a mapping");
    for (const auto& kv : root) {
        auto key = kv.first.as<std::string>();
        const auto& v = kv.second;
        if (key == "delta") {
            c.delta = v.as<int>();
        } else if (key == "k") {
            c.k = v.as<int>();
        } else if (key == "max_depth") {
            c.max_depth = v.as<int>();
        } else if (key == "segment_sentences") {
            c.segment_sentences = v.as<int>();
        } else if (key == "variant") {
            auto name = v.as<std::string>();
            auto parsed = variant_from_string(name);
            if (!parsed) throw ConfigError(origin + ": unknown variant \"" + name + "\"");
            c.variant = *parsed;
        } else if (key == "concurrency") {
            c.concurrency = v.as<int>();
        } else if (key == "max_in_flight") {
            c.max_in_flight = v.as<int>();
        } else if (key == "repair_rounds") {
            c.repair_rounds = v.as<int>();
        } else if (key == "seed_label") {
            c.seed_label = v.as<std::string>();
        } else if (key == "chat") {
            apply_endpoint_yaml(c.chat, v, origin + ": chat");
        } else if (key == "embedding") {
            apply_endpoint_yaml(c.embedding, v, origin + ": embedding");
        } else if (key == "retry") {
            for (const auto& r : v) {
                auto rk = r.first.as<std::string>();
                if (rk == "max_retries") {
                    c.retry.max_retries = r.second.as<int>();
                } else if (rk == "base_delay_ms") {
                    c.retry.base_delay = std::chrono::milliseconds(r.second.as<long>());
                } else if (rk == "jitter") {
                    c.retry.jitter = r.second.as<double>();
                } else {
                    throw ConfigError(origin + ": retry: unknown key \"" + rk + "\"");
                }
            }
        } else if (key == "sampling") {
            if (!v.IsMap()) throw ConfigError(origin + ": sampling must be a mapping");
            for (const auto& s : v) {
                auto name = s.first.as<std::string>();
                auto task = template_from_string(name);
                if (!task) throw ConfigError(origin + ": sampling: unknown task \"" + name + "\"");
                auto profile = c.sampling.get(*task);
                for (const auto& p : s.second) {
                    auto pk = p.first.as<std::string>();
                    if (pk == "temperature") {
                        profile.temperature = p.second.as<double>();
                    } else if (pk == "nucleus_mass") {
                        profile.nucleus_mass = p.second.as<double>();
                    } else if (pk == "max_tokens") {
                        profile.max_tokens = p.second.as<int>();
                    } else {
                        throw ConfigError(origin + ": sampling." + name + ": unknown key \"" + pk +
                                          "\"");
                    }
                }
                c.sampling.set(profile);
            }
        } else {
            throw ConfigError(origin + ": unknown key \"" + key + "\"");
        }
    }
}

}  // namespace

std::string_view to_string(Variant variant) {
    switch (variant) {
        case Variant::tod: return "tod";
        case Variant::tod_no_tree: return "tod_no_tree";
        case Variant::tod_no_sd: return "tod_no_sd";
        case Variant::single_stage: return "single_stage";
        case Variant::two_stage: return "two_stage";
    }
    return "tod";
}

std::optional<Variant> variant_from_string(std::string_view name) {
    for (auto v : kAllVariants) {
        if (to_string(v) == name) return v;
    }
    return std::nullopt;
}

bool builds_tree(Variant variant) {
    return variant == Variant::tod || variant == Variant::tod_no_tree ||
           variant == Variant::tod_no_sd;
}

void RunConfig::validate() const {
    if (delta < 1) throw ConfigError("delta must be >= 1");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (segment_sentences < 1) throw ConfigError("segment_sentences must be >= 1");
    if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
    if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (repair_rounds < 0) throw ConfigError("repair_rounds must be >= 0");
    if (retry.max_retries < 0) throw ConfigError("retry.max_retries must be >= 0");
    if (retry.base_delay.count() < 0) throw ConfigError("retry.base_delay_ms must be >= 0");
    if (retry.jitter < 0) throw ConfigError("retry.jitter must be >= 0");
    if (chat.timeout_s < 1 || embedding.timeout_s < 1) throw ConfigError("timeout_s must be >= 1");
    for (const auto& p : sampling.all()) {
        SamplingTable probe;
        probe.set(p);
    }
}

RunConfig RunConfig::redacted() const {
    RunConfig copy = *this;
    copy.chat.api_key.clear();
    copy.embedding.api_key.clear();
    return copy;
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json out;
    out["variant"] = std::string(to_string(c.variant));
    out["delta"] = c.delta;
    out["k"] = c.k;
    out["max_depth"] = c.max_depth;
    out["segment_sentences"] = c.segment_sentences;
    out["concurrency"] = c.concurrency;
    out["max_in_flight"] = c.max_in_flight;
    out["repair_rounds"] = c.repair_rounds;
    ordered_json retry;
    retry["max_retries"] = c.retry.max_retries;
    retry["base_delay_ms"] = c.retry.base_delay.count();
    retry["jitter"] = c.retry.jitter;
    out["retry"] = retry;
    out["chat"] = endpoint_json(c.chat);
    out["embedding"] = endpoint_json(c.embedding);
    ordered_json sampling = ordered_json::array();
    for (const auto& p : c.sampling.all()) {
        ordered_json item;
        item["task"] = std::string(to_string(p.task));
        item["temperature"] = p.temperature;
        item["nucleus_mass"] = p.nucleus_mass;
        item["max_tokens"] = p.max_tokens;
        sampling.push_back(item);
    }
    out["sampling"] = sampling;
    out["seed_label"] = c.seed_label;
    return out;
}

RunConfig config_from_json(const json& doc, const std::string& path) {
    RunConfig c;
    auto variant_name = typed<std::string>(doc, "variant", path);
    auto variant = variant_from_string(variant_name);
    if (!variant) throw ParseError("unknown variant \"" + variant_name + "\"", path + "/variant");
    c.variant = *variant;
    c.delta = typed<int>(doc, "delta", path);
    c.k = typed<int>(doc, "k", path);
    c.max_depth = typed<int>(doc, "max_depth", path);
    c.segment_sentences = typed<int>(doc, "segment_sentences", path);
    c.concurrency = typed<int>(doc, "concurrency", path);
    c.max_in_flight = typed<int>(doc, "max_in_flight", path);
    c.repair_rounds = typed<int>(doc, "repair_rounds", path);
    const auto& retry = field(doc, "retry", path);
    c.retry.max_retries = typed<int>(retry, "max_retries", path + "/retry");
    c.retry.base_delay = std::chrono::milliseconds(typed<long>(retry, "base_delay_ms", path + "/retry"));
    c.retry.jitter = typed<double>(retry, "jitter", path + "/retry");
    c.chat = endpoint_from_json(field(doc, "chat", path), path + "/chat");
    c.embedding = endpoint_from_json(field(doc, "embedding", path), path + "/embedding");
    const auto& sampling = field(doc, "sampling", path);
    if (!sampling.is_array()) throw ParseError("expected a list", path + "/sampling");
    for (std::size_t i = 0; i < sampling.size(); ++i) {
        auto where = path + "/sampling/" + std::to_string(i);
        auto name = typed<std::string>(sampling[i], "task", where);
        auto task = template_from_string(name);
        if (!task) throw ParseError("unknown task \"" + name + "\"", where + "/task");
        SamplingProfile p{*task, typed<double>(sampling[i], "temperature", where),
                          typed<double>(sampling[i], "nucleus_mass", where),
                          typed<int>(sampling[i], "max_tokens", where)};
        try {
            c.sampling.set(p);
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), where);
        }
    }
    c.seed_label = typed<std::string>(doc, "seed_label", path);
    return c;
}

std::optional<std::string> process_env(const std::string& name) {
    const char* value = std::getenv(name.c_str());
    if (!value) return std::nullopt;
    return std::string(value);
}

void apply_env(RunConfig& config, const EnvLookup& env) {
    auto take = [&](const char* name, std::string& target) {
        if (auto v = env(name)) target = *v;
    };
    take("TOD_CHAT_BASE_URL", config.chat.base_url);
    take("TOD_CHAT_MODEL", config.chat.model);
    take("TOD_API_KEY", config.chat.api_key);
    take("TOD_EMBED_BASE_URL", config.embedding.base_url);
    take("TOD_EMBED_MODEL", config.embedding.model);
    take("TOD_EMBED_API_KEY", config.embedding.api_key);
    // One key commonly serves both endpoints.
    if (!env("TOD_EMBED_API_KEY") && config.embedding.api_key.empty()) {
        config.embedding.api_key = config.chat.api_key;
    }
    if (!env("TOD_EMBED_BASE_URL") && config.embedding.base_url.empty()) {
        config.embedding.base_url = config.chat.base_url;
    }
}

void apply_config_text(RunConfig& config, std::string_view yaml, const std::string& origin) {
    try {
        apply_yaml(config, YAML::Load(std::string(yaml)), origin);
    } catch (const YAML::Exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    apply_config_text(config, text.str(), path.string());
}

}  // namespace tod
