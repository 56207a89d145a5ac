#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tod/corpus.hpp"
#include "tod/retry.hpp"
#include "tod/transcript.hpp"

namespace tod {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dimension() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

struct RankedSegment {
    Segment segment;
    double score = 0.0;
};

struct PoolEntry {
    Segment segment;
    EmbeddingVector vector;
};

// "<title> : <description>", or the title alone when there is no description.
std::string format_topic_query(std::string_view title,
                               const std::optional<std::string>& description);

// Throws ShapeError on dimension mismatch and DomainError on zero norm or
// non-finite input. Result is clamped to [-1, 1].
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// The min(delta, |pool|) best segments by cosine, score descending, ties by
// ascending segment_id.
std::vector<RankedSegment> top_delta(const EmbeddingVector& query, std::span<const PoolEntry> pool,
                                     int delta);

struct EmbeddingBatch {
    std::vector<EmbeddingVector> vectors;
    long latency_ms = 0;  // as measured by the provider
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    // One vector per text, same order. Throws TransportError.
    virtual EmbeddingBatch embed(std::span<const std::string> texts) = 0;
};

// Content-addressed (provider id, text) -> vector map, safe for concurrent use.
class EmbeddingCache {
public:
    std::optional<EmbeddingVector> find(const std::string& provider, const std::string& text) const;
    void store(const std::string& provider, const std::string& text, EmbeddingVector vector);
    std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::pair<std::string, std::string>, EmbeddingVector, std::less<>> entries_;
};

class EmbeddingService {
public:
    explicit EmbeddingService(std::shared_ptr<EmbeddingProvider> provider, RetryPolicy retry = {});

    // Cached lookups first; misses go to the provider in one batch with
    // duplicates collapsed. Each provider invocation is logged to `log`.
    std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts, Transcript& log,
                                             const CallTag& tag = {});

    const std::string& provider_id() const { return provider_id_; }
    std::size_t cache_size() const { return cache_.size(); }

private:
    void check_vector(const EmbeddingVector& v);

    std::shared_ptr<EmbeddingProvider> provider_;
    std::string provider_id_;
    RetryPolicy retry_;
    EmbeddingCache cache_;
    std::mutex dimension_mutex_;
    std::size_t dimension_ = 0;
};

std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts,
                                         EmbeddingService& service, Transcript& log);

}  // namespace tod
