#include <cmath>
#include <mutex>
#include <unordered_map>

#include "tod/error.hpp"
#include "tod/retrieval.hpp"

namespace tod {

std::optional<EmbeddingVector> EmbeddingCache::find(const std::string& provider,
                                                    const std::string& text) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(std::pair{provider, text});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::store(const std::string& provider, const std::string& text,
                           EmbeddingVector vector) {
    std::unique_lock lock(mutex_);
    entries_.insert_or_assign(std::pair{provider, text}, std::move(vector));
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

EmbeddingService::EmbeddingService(std::shared_ptr<EmbeddingProvider> provider, RetryPolicy retry)
    : provider_(std::move(provider)), provider_id_(provider_->id()), retry_(retry) {}

void EmbeddingService::check_vector(const EmbeddingVector& v) {
    if (v.dimension() == 0) throw ShapeError("provider " + provider_id_ + " returned an empty vector");
    for (double x : v.values) {
        if (!std::isfinite(x)) {
            throw DomainError("provider " + provider_id_ + " returned a non-finite value");
        }
    }
    std::lock_guard lock(dimension_mutex_);
    if (dimension_ == 0) dimension_ = v.dimension();
    if (v.dimension() != dimension_) {
        throw ShapeError("provider " + provider_id_ + " returned dimension " +
                         std::to_string(v.dimension()) + ", expected " + std::to_string(dimension_));
    }
}

std::vector<EmbeddingVector> EmbeddingService::embed_texts(std::span<const std::string> texts,
                                                           Transcript& log, const CallTag& tag) {
    if (texts.empty()) throw PreconditionError("embed_texts needs at least one text");
    std::vector<std::optional<EmbeddingVector>> out(texts.size());
    std::vector<std::string> missing;
    std::unordered_map<std::string, std::vector<std::size_t>> positions;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (auto hit = cache_.find(provider_id_, texts[i])) {
            out[i] = std::move(*hit);
            continue;
        }
        auto [it, inserted] = positions.try_emplace(texts[i]);
        if (inserted) missing.push_back(texts[i]);
        it->second.push_back(i);
    }
    if (!missing.empty()) {
        auto batch = with_retries(retry_, "embedding provider " + provider_id_,
                                  [&] { return provider_->embed(missing); });
        auto& vectors = batch.vectors;
        if (vectors.size() != missing.size()) {
            throw TransportError("embedding provider " + provider_id_ + " returned " +
                                     std::to_string(vectors.size()) + " vectors for " +
                                     std::to_string(missing.size()) + " inputs",
                                 false);
        }
        TranscriptEntry entry;
        entry.kind = TranscriptEntry::Kind::embedding;
        entry.tag = tag;
        entry.provider = provider_id_;
        entry.batch_size = static_cast<int>(missing.size());
        entry.latency_ms = batch.latency_ms;
        log.append(std::move(entry));
        for (std::size_t m = 0; m < missing.size(); ++m) {
            check_vector(vectors[m]);
            cache_.store(provider_id_, missing[m], vectors[m]);
            for (auto i : positions[missing[m]]) out[i] = vectors[m];
        }
    }
    std::vector<EmbeddingVector> result;
    result.reserve(out.size());
    for (auto& v : out) result.push_back(std::move(*v));
    return result;
}

std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts,
                                         EmbeddingService& service, Transcript& log) {
    return service.embed_texts(texts, log);
}

}  // namespace tod
