#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

namespace tod {

// Where in the run a provider call originated.
struct CallTag {
    std::string node_id;
    std::string speaker;  // "author_0", "author_1" or empty for the moderator

    bool operator==(const CallTag&) const = default;
};

struct TranscriptEntry {
    enum class Kind { chat, embedding, note };

    Kind kind = Kind::chat;
    CallTag tag;

    // chat
    std::string template_id;
    std::string prompt;
    std::string reply;
    double temperature = 0.0;
    double nucleus_mass = 1.0;
    int max_tokens = 0;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    long latency_ms = 0;
    int repair_round = 0;

    // embedding
    std::string provider;
    int batch_size = 0;

    // note
    std::string note;

    bool operator==(const TranscriptEntry&) const = default;
};

// Append-only call log. Appends are serialized; readers get snapshots.
class Transcript {
public:
    Transcript() = default;
    Transcript(const Transcript& other);
    Transcript(Transcript&& other) noexcept;
    Transcript& operator=(const Transcript& other);
    Transcript& operator=(Transcript&& other) noexcept;

    void append(TranscriptEntry entry);
    void note(const CallTag& tag, std::string text);

    // Appends every entry of `other` in order.
    void merge(const Transcript& other);

    std::vector<TranscriptEntry> entries() const;
    std::size_t size() const;
    std::size_t count(TranscriptEntry::Kind kind) const;
    std::size_t count_chat(const std::string& template_id) const;

private:
    mutable std::mutex mutex_;
    std::vector<TranscriptEntry> entries_;
};

std::string render_transcript_markdown(const Transcript& transcript);

}  // namespace tod
