#include "tod/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "tod/error.hpp"

namespace tod {

std::string format_topic_query(std::string_view title,
                               const std::optional<std::string>& description) {
    if (title.empty()) throw PreconditionError("topic title must be non-empty");
    if (!description || description->empty()) return std::string(title);
    return std::string(title) + " : " + *description;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw ShapeError("cosine of vectors with dimensions " + std::to_string(a.dimension()) +
                         " and " + std::to_string(b.dimension()));
    }
    if (a.dimension() == 0) throw ShapeError("cosine of empty vectors");
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        norm_a += a.values[i] * a.values[i];
        norm_b += b.values[i] * b.values[i];
    }
    if (!std::isfinite(dot) || !std::isfinite(norm_a) || !std::isfinite(norm_b)) {
        throw DomainError("cosine of non-finite vector");
    }
    if (norm_a == 0.0 || norm_b == 0.0) throw DomainError("cosine of zero-norm vector");
    double c = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
    return std::clamp(c, -1.0, 1.0);
}

std::vector<RankedSegment> top_delta(const EmbeddingVector& query, std::span<const PoolEntry> pool,
                                     int delta) {
    if (delta < 1) throw PreconditionError("delta must be at least 1");
    std::vector<RankedSegment> ranked;
    ranked.reserve(pool.size());
    for (const auto& entry : pool) {
        ranked.push_back({entry.segment, cosine(query, entry.vector)});
    }
    auto keep = std::min(ranked.size(), static_cast<std::size_t>(delta));
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      ranked.end(), [](const RankedSegment& l, const RankedSegment& r) {
                          if (l.score != r.score) return l.score > r.score;
                          return l.segment.segment_id < r.segment.segment_id;
                      });
    ranked.resize(keep);
    return ranked;
}

}  // namespace tod
