#include <cctype>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "tod/error.hpp"
#include "tod/mock.hpp"

namespace tod {
namespace {

std::string entry_where(std::size_t i) { return "chat[" + std::to_string(i) + "]"; }

void reject_unknown_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    for (const auto& kv : node) {
        auto key = kv.first.as<std::string>();
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError("mock script " + where + ": unknown key \"" + key + "\"");
    }
}

MockChatEntry parse_chat_entry(const YAML::Node& node, std::size_t index) {
    auto where = entry_where(index);
    if (!node.IsMap()) throw ConfigError("mock script " + where + " must be a mapping");
    reject_unknown_keys(node, {"template", "node", "speaker", "reply", "times", "repeat", "fail"},
                        where);
    MockChatEntry entry;
    if (node["template"]) {
        auto name = node["template"].as<std::string>();
        entry.template_id = template_from_string(name);
        if (!entry.template_id) {
            throw ConfigError("mock script " + where + ": unknown template \"" + name + "\"");
        }
    }
    if (node["node"]) entry.node = node["node"].as<std::string>();
    if (node["speaker"]) entry.speaker = node["speaker"].as<std::string>();
    if (node["reply"]) entry.reply = node["reply"].as<std::string>();
    if (node["times"]) entry.times = node["times"].as<int>();
    if (node["repeat"]) entry.repeat = node["repeat"].as<bool>();
    if (node["fail"]) {
        auto kind = node["fail"].as<std::string>();
        if (kind == "transport") {
            entry.fail = MockChatEntry::Failure::transport;
        } else if (kind == "refusal") {
            entry.fail = MockChatEntry::Failure::refusal;
        } else {
            throw ConfigError("mock script " + where + ": fail must be transport or refusal");
        }
    }
    if (entry.times < 1) throw ConfigError("mock script " + where + ": times must be >= 1");
    if (!node["reply"] && entry.fail == MockChatEntry::Failure::none) {
        throw ConfigError("mock script " + where + " needs a reply or a fail kind");
    }
    return entry;
}

bool matches(const MockChatEntry& e, const ChatRequest& r) {
    if (e.template_id && *e.template_id != r.template_id) return false;
    if (e.node && *e.node != r.tag.node_id) return false;
    if (e.speaker && *e.speaker != r.tag.speaker) return false;
    return true;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

MockScript parse_mock_script(std::string_view yaml) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("mock script is not valid YAML: ") + e.what());
    }
    MockScript script;
    if (root.IsNull()) return script;
    if (!root.IsMap()) throw ConfigError("mock script must be a mapping");
    try {
        reject_unknown_keys(root, {"chat", "embedding"}, "top level");
        if (auto chat = root["chat"]) {
            if (!chat.IsSequence()) throw ConfigError("mock script chat must be a list");
            for (std::size_t i = 0; i < chat.size(); ++i) {
                script.chat.push_back(parse_chat_entry(chat[i], i));
            }
        }
        if (auto emb = root["embedding"]) {
            reject_unknown_keys(emb, {"dimension", "vectors"}, "embedding");
            if (emb["dimension"]) script.embedding.dimension = emb["dimension"].as<int>();
            if (script.embedding.dimension < 2) {
                throw ConfigError("mock script embedding.dimension must be >= 2");
            }
            if (auto vectors = emb["vectors"]) {
                for (const auto& kv : vectors) {
                    script.embedding.overrides[kv.first.as<std::string>()] =
                        EmbeddingVector{kv.second.as<std::vector<double>>()};
                }
            }
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("mock script has a bad value: ") + e.what());
    }
    return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open mock script " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_mock_script(text.str());
}

ScriptedChatProvider::ScriptedChatProvider(std::vector<MockChatEntry> entries)
    : entries_(std::move(entries)), used_(entries_.size(), 0) {}

ChatReply ScriptedChatProvider::send(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    const MockChatEntry* chosen = nullptr;
    for (std::size_t i = 0; i < entries_.size() && !chosen; ++i) {
        if (!entries_[i].repeat && used_[i] < entries_[i].times && matches(entries_[i], request)) {
            ++used_[i];
            chosen = &entries_[i];
        }
    }
    for (std::size_t i = 0; i < entries_.size() && !chosen; ++i) {
        if (entries_[i].repeat && matches(entries_[i], request)) chosen = &entries_[i];
    }
    auto where = std::string(to_string(request.template_id)) + " at node \"" + request.tag.node_id +
                 "\" speaker \"" + request.tag.speaker + "\"";
    if (!chosen) throw TransportError("mock script has no reply for " + where, false);
    if (chosen->fail == MockChatEntry::Failure::transport) {
        throw TransportError("scripted transport failure for " + where, true);
    }
    if (chosen->fail == MockChatEntry::Failure::refusal) {
        throw ContentError("scripted refusal for " + where);
    }
    return ChatReply{chosen->reply, count_words(request.prompt), count_words(chosen->reply), 0};
}

std::size_t ScriptedChatProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return requests_.size();
}

std::vector<ChatRequest> ScriptedChatProvider::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

EmbeddingVector hashed_embedding(std::string_view text, int dimension) {
    if (dimension < 2) throw PreconditionError("hashed_embedding needs dimension >= 2");
    EmbeddingVector v{std::vector<double>(static_cast<std::size_t>(dimension), 0.0)};
    v.values[0] = 1.0;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        auto slot = 1 + fnv1a(token) % static_cast<std::uint64_t>(dimension - 1);
        v.values[slot] += 1.0;
        token.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return v;
}

MockEmbeddingProvider::MockEmbeddingProvider(MockEmbeddingConfig config)
    : config_(std::move(config)) {}

EmbeddingBatch MockEmbeddingProvider::embed(std::span<const std::string> texts) {
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        seen_.insert(seen_.end(), texts.begin(), texts.end());
    }
    EmbeddingBatch batch;
    for (const auto& text : texts) {
        auto it = config_.overrides.find(text);
        batch.vectors.push_back(it != config_.overrides.end()
                                    ? it->second
                                    : hashed_embedding(text, config_.dimension));
    }
    return batch;
}

std::size_t MockEmbeddingProvider::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::vector<std::string> MockEmbeddingProvider::texts_seen() const {
    std::lock_guard lock(mutex_);
    return seen_;
}

int count_words(std::string_view text) {
    int words = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        bool space = std::isspace(c);
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

}  // namespace tod
