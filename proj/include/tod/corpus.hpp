#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tod {

struct PaperRecord {
    std::string paper_id;
    std::string title;
    std::string abstract;
    std::string introduction;
    std::optional<std::string> body;
    std::optional<std::string> source_link;

    bool operator==(const PaperRecord&) const = default;
};

// A run of consecutive sentences from one paper; the unit of retrieval and
// evidence citation.
struct Segment {
    int segment_id = 0;
    std::string paper_id;
    std::string text;
    int sentence_count = 1;

    bool operator==(const Segment&) const = default;
};

enum class DiffersBy { method, task };
enum class CitationLink { not_cited, cited };

std::string_view to_string(DiffersBy value);
std::string_view to_string(CitationLink value);

struct PairSample {
    int row = 0;  // 1-based data row in the source file
    std::string topic_title;
    std::optional<std::string> topic_description;
    PaperRecord paper_a;
    PaperRecord paper_b;
    DiffersBy differs_by = DiffersBy::method;
    CitationLink citation_link = CitationLink::not_cited;

    bool operator==(const PairSample&) const = default;
};

// Canonical header of the paper-pair TSV, in column order.
inline constexpr std::array<std::string_view, 11> kDatasetColumns = {
    "Topic",
    "Paper #1 arXiv Link",
    "Paper #1 Title",
    "Paper #1 Abstract",
    "Paper #1 Introduction",
    "Paper #2 arXiv Link",
    "Paper #2 Title",
    "Paper #2 Abstract",
    "Paper #2 Introduction",
    "Method/Task",
    "Cite/No",
};

struct DatasetRowError {
    int row = 0;
    std::string message;
};

struct CategoryCounts {
    int cited_method = 0;
    int cited_task = 0;
    int not_cited_method = 0;
    int not_cited_task = 0;

    int cited() const { return cited_method + cited_task; }
    int not_cited() const { return not_cited_method + not_cited_task; }
    int method() const { return cited_method + not_cited_method; }
    int task() const { return cited_task + not_cited_task; }
    int total() const { return cited() + not_cited(); }
};

struct DatasetReport {
    std::vector<PairSample> samples;
    std::vector<DatasetRowError> errors;
    int data_rows = 0;
    CategoryCounts counts;
};

// Throws SchemaError on a bad header and ValueError on the first bad row.
std::vector<PairSample> load_dataset(const std::filesystem::path& path);
std::vector<PairSample> parse_dataset(std::istream& in);

// Like parse_dataset but collects row-level errors instead of stopping.
// Header problems still throw SchemaError.
DatasetReport validate_dataset(std::istream& in);

CategoryCounts count_categories(const std::vector<PairSample>& samples);

// Header plus one line per sample, canonical column order, '\n' line endings.
std::string serialize_dataset(const std::vector<PairSample>& samples);

std::string normalize_whitespace(std::string_view text);

// Rule-based splitter over whitespace-normalized text. Boundaries are terminal
// punctuation followed by a space and an uppercase letter or digit, except
// after known abbreviations and single-letter initials.
std::vector<std::string> split_sentences(std::string_view normalized);

// Abstract, introduction and body joined and normalized; the title is excluded.
std::string segmentation_source(const PaperRecord& paper);

std::vector<Segment> segment_paper(const PaperRecord& paper, int target);

}  // namespace tod
