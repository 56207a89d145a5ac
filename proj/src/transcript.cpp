#include "tod/transcript.hpp"

#include <algorithm>
#include <sstream>

namespace tod {

Transcript::Transcript(const Transcript& other) : entries_(other.entries()) {}

Transcript::Transcript(Transcript&& other) noexcept {
    std::lock_guard lock(other.mutex_);
    entries_ = std::move(other.entries_);
}

Transcript& Transcript::operator=(const Transcript& other) {
    if (this != &other) {
        auto copy = other.entries();
        std::lock_guard lock(mutex_);
        entries_ = std::move(copy);
    }
    return *this;
}

Transcript& Transcript::operator=(Transcript&& other) noexcept {
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        entries_ = std::move(other.entries_);
    }
    return *this;
}

void Transcript::append(TranscriptEntry entry) {
    std::lock_guard lock(mutex_);
    entries_.push_back(std::move(entry));
}

void Transcript::note(const CallTag& tag, std::string text) {
    TranscriptEntry entry;
    entry.kind = TranscriptEntry::Kind::note;
    entry.tag = tag;
    entry.note = std::move(text);
    append(std::move(entry));
}

void Transcript::merge(const Transcript& other) {
    auto incoming = other.entries();
    std::lock_guard lock(mutex_);
    entries_.insert(entries_.end(), std::make_move_iterator(incoming.begin()),
                    std::make_move_iterator(incoming.end()));
}

std::vector<TranscriptEntry> Transcript::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t Transcript::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::size_t Transcript::count(TranscriptEntry::Kind kind) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(std::count_if(
        entries_.begin(), entries_.end(), [kind](const auto& e) { return e.kind == kind; }));
}

std::size_t Transcript::count_chat(const std::string& template_id) const {
    std::lock_guard lock(mutex_);
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [&](const auto& e) {
            return e.kind == TranscriptEntry::Kind::chat && e.template_id == template_id;
        }));
}

namespace {

std::string format_tag(const CallTag& tag) {
    std::string out;
    if (!tag.node_id.empty()) out += "node " + tag.node_id;
    if (!tag.speaker.empty()) {
        if (!out.empty()) out += ", ";
        out += tag.speaker;
    }
    return out.empty() ? std::string("run") : out;
}

std::string format_real(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::string render_transcript_markdown(const Transcript& transcript) {
    std::ostringstream os;
    os << "# Transcript\n";
    int index = 0;
    for (const auto& e : transcript.entries()) {
        ++index;
        os << "\n";
        switch (e.kind) {
            case TranscriptEntry::Kind::chat:
                os << "## " << index << ". chat " << e.template_id << " [" << format_tag(e.tag)
                   << "]\n\n";
                os << "- temperature: " << format_real(e.temperature) << "\n";
                os << "- nucleus_mass: " << format_real(e.nucleus_mass) << "\n";
                os << "- max_tokens: " << e.max_tokens << "\n";
                os << "- repair_round: " << e.repair_round << "\n";
                os << "- prompt_tokens: " << e.prompt_tokens << "\n";
                os << "- completion_tokens: " << e.completion_tokens << "\n";
                os << "- latency_ms: " << e.latency_ms << "\n\n";
                os << "### Prompt\n\n~~~~\n" << e.prompt << "\n~~~~\n\n";
                os << "### Reply\n\n~~~~\n" << e.reply << "\n~~~~\n";
                break;
            case TranscriptEntry::Kind::embedding:
                os << "## " << index << ". embedding [" << format_tag(e.tag) << "]\n\n";
                os << "- provider: " << e.provider << "\n";
                os << "- batch_size: " << e.batch_size << "\n";
                os << "- latency_ms: " << e.latency_ms << "\n";
                break;
            case TranscriptEntry::Kind::note:
                os << "## " << index << ". note [" << format_tag(e.tag) << "]\n\n";
                os << e.note << "\n";
                break;
        }
    }
    return os.str();
}

}  // namespace tod
