#include "tod/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "tod/error.hpp"

namespace tod {
namespace {

constexpr std::size_t kColumnCount = kDatasetColumns.size();

enum Column : std::size_t {
    kTopic,
    kLink1,
    kTitle1,
    kAbstract1,
    kIntro1,
    kLink2,
    kTitle2,
    kAbstract2,
    kIntro2,
    kMethodTask,
    kCiteNo,
};

std::string header_key(std::string_view name) {
    std::string key;
    for (char c : name) {
        auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            key.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    return key;
}

// Normalized header spellings accepted for each column.
const std::map<std::string, std::size_t>& header_aliases() {
    static const std::map<std::string, std::size_t> aliases = [] {
        std::map<std::string, std::size_t> m;
        for (std::size_t i = 0; i < kColumnCount; ++i) {
            m.emplace(header_key(kDatasetColumns[i]), i);
        }
        m.emplace("paper1arxiv", kLink1);
        m.emplace("paper1link", kLink1);
        m.emplace("paper2arxiv", kLink2);
        m.emplace("paper2link", kLink2);
        m.emplace("paper1intro", kIntro1);
        m.emplace("paper2intro", kIntro2);
        m.emplace("cite", kCiteNo);
        return m;
    }();
    return aliases;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            cells.emplace_back(line.substr(start));
            break;
        }
        cells.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

// Maps canonical column index -> position in the file.
std::array<std::size_t, kColumnCount> resolve_header(std::string header_line) {
    if (header_line.rfind("\xEF\xBB\xBF", 0) == 0) header_line.erase(0, 3);
    auto names = split_tabs(header_line);
    std::array<std::size_t, kColumnCount> position{};
    std::array<bool, kColumnCount> seen{};
    const auto& aliases = header_aliases();
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto it = aliases.find(header_key(names[i]));
        if (it == aliases.end()) {
            throw SchemaError("unexpected column '" + names[i] + "' in dataset header");
        }
        if (seen[it->second]) {
            throw SchemaError("duplicate column '" + std::string(kDatasetColumns[it->second]) +
                              "' in dataset header");
        }
        seen[it->second] = true;
        position[it->second] = i;
    }
    for (std::size_t c = 0; c < kColumnCount; ++c) {
        if (!seen[c]) {
            throw SchemaError("missing column '" + std::string(kDatasetColumns[c]) +
                              "' in dataset header");
        }
    }
    return position;
}

int parse_flag(std::string_view cell, std::string_view column, int row) {
    auto value = trim(cell);
    if (value == "0") return 0;
    if (value == "1") return 1;
    throw ValueError("row " + std::to_string(row) + ": column '" + std::string(column) +
                     "' must be 0 or 1, found '" + std::string(value) + "'");
}

PaperRecord make_paper(const std::vector<std::string>& cells,
                       const std::array<std::size_t, kColumnCount>& pos, std::size_t link,
                       std::size_t title, std::size_t abstract, std::size_t intro, int row,
                       std::string_view suffix) {
    PaperRecord paper;
    paper.paper_id = "row" + std::to_string(row) + "." + std::string(suffix);
    paper.title = cells[pos[title]];
    paper.abstract = cells[pos[abstract]];
    paper.introduction = cells[pos[intro]];
    if (!cells[pos[link]].empty()) paper.source_link = cells[pos[link]];
    for (auto [column, text] : {std::pair{title, &paper.title}, std::pair{abstract, &paper.abstract}}) {
        if (trim(*text).empty()) {
            throw ValueError("row " + std::to_string(row) + ": column '" +
                             std::string(kDatasetColumns[column]) + "' is empty");
        }
    }
    return paper;
}

PairSample parse_row(const std::string& line, const std::array<std::size_t, kColumnCount>& pos,
                     int row) {
    auto cells = split_tabs(line);
    if (cells.size() != kColumnCount) {
        throw ValueError("row " + std::to_string(row) + ": expected " +
                         std::to_string(kColumnCount) + " tab-separated fields, found " +
                         std::to_string(cells.size()) + " (cells may not contain tabs)");
    }
    PairSample sample;
    sample.row = row;
    sample.topic_title = cells[pos[kTopic]];
    if (trim(sample.topic_title).empty()) {
        throw ValueError("row " + std::to_string(row) + ": column 'Topic' is empty");
    }
    sample.paper_a = make_paper(cells, pos, kLink1, kTitle1, kAbstract1, kIntro1, row, "paper1");
    sample.paper_b = make_paper(cells, pos, kLink2, kTitle2, kAbstract2, kIntro2, row, "paper2");
    sample.differs_by = parse_flag(cells[pos[kMethodTask]], kDatasetColumns[kMethodTask], row) == 0
                            ? DiffersBy::method
                            : DiffersBy::task;
    sample.citation_link = parse_flag(cells[pos[kCiteNo]], kDatasetColumns[kCiteNo], row) == 0
                               ? CitationLink::not_cited
                               : CitationLink::cited;
    return sample;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == ')' || c == ']' || c == '"' || c == '\''; }
bool is_opener(char c) { return c == '(' || c == '[' || c == '"' || c == '\''; }

bool is_abbreviation(std::string_view text, std::size_t dot) {
    static const std::array<std::string_view, 20> kStopList = {
        "al.",  "fig.", "figs.", "eq.",  "eqs.", "e.g.", "i.e.", "vs.",  "cf.",   "sec.",
        "tab.", "no.",  "dr.",   "mr.",  "mrs.", "ms.",  "prof.", "approx.", "resp.", "ref.",
    };
    std::size_t start = text.rfind(' ', dot);
    start = start == std::string_view::npos ? 0 : start + 1;
    std::string_view token = text.substr(start, dot - start + 1);
    while (!token.empty() && is_opener(token.front())) token.remove_prefix(1);
    // Single-letter initial such as "J."
    if (token.size() == 2 && std::isupper(static_cast<unsigned char>(token[0]))) return true;
    std::string lower;
    for (char c : token) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return std::find(kStopList.begin(), kStopList.end(), lower) != kStopList.end();
}

}  // namespace

std::string_view to_string(DiffersBy value) {
    return value == DiffersBy::method ? "method" : "task";
}

std::string_view to_string(CitationLink value) {
    return value == CitationLink::cited ? "cited" : "not_cited";
}

std::vector<PairSample> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValueError("cannot open dataset file '" + path.string() + "'");
    return parse_dataset(in);
}

std::vector<PairSample> parse_dataset(std::istream& in) {
    auto lines = read_lines(in);
    if (lines.empty()) throw SchemaError("dataset file has no header row");
    auto pos = resolve_header(lines.front());
    std::vector<PairSample> samples;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        samples.push_back(parse_row(lines[i], pos, static_cast<int>(i)));
    }
    return samples;
}

DatasetReport validate_dataset(std::istream& in) {
    auto lines = read_lines(in);
    if (lines.empty()) throw SchemaError("dataset file has no header row");
    auto pos = resolve_header(lines.front());
    DatasetReport report;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        int row = static_cast<int>(i);
        ++report.data_rows;
        try {
            report.samples.push_back(parse_row(lines[i], pos, row));
        } catch (const ValueError& e) {
            report.errors.push_back({row, e.what()});
        }
    }
    report.counts = count_categories(report.samples);
    return report;
}

CategoryCounts count_categories(const std::vector<PairSample>& samples) {
    CategoryCounts counts;
    for (const auto& s : samples) {
        bool cited = s.citation_link == CitationLink::cited;
        bool method = s.differs_by == DiffersBy::method;
        if (cited && method) ++counts.cited_method;
        if (cited && !method) ++counts.cited_task;
        if (!cited && method) ++counts.not_cited_method;
        if (!cited && !method) ++counts.not_cited_task;
    }
    return counts;
}

std::string serialize_dataset(const std::vector<PairSample>& samples) {
    std::string out;
    for (std::size_t i = 0; i < kColumnCount; ++i) {
        if (i) out.push_back('\t');
        out.append(kDatasetColumns[i]);
    }
    out.push_back('\n');
    for (const auto& s : samples) {
        const std::array<std::string, kColumnCount> cells = {
            s.topic_title,
            s.paper_a.source_link.value_or(""),
            s.paper_a.title,
            s.paper_a.abstract,
            s.paper_a.introduction,
            s.paper_b.source_link.value_or(""),
            s.paper_b.title,
            s.paper_b.abstract,
            s.paper_b.introduction,
            s.differs_by == DiffersBy::method ? "0" : "1",
            s.citation_link == CitationLink::not_cited ? "0" : "1",
        };
        for (std::size_t i = 0; i < kColumnCount; ++i) {
            if (i) out.push_back('\t');
            out.append(cells[i]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_terminal(text[i])) continue;
        std::size_t j = i + 1;
        while (j < n && is_terminal(text[j])) ++j;
        while (j < n && is_closer(text[j])) ++j;
        if (j >= n || text[j] != ' ') continue;
        std::size_t k = j + 1;
        while (k < n && is_opener(text[k])) ++k;
        if (k >= n) continue;
        auto next = static_cast<unsigned char>(text[k]);
        if (!std::isupper(next) && !std::isdigit(next)) continue;
        if (text[i] == '.' && j == i + 1 && is_abbreviation(text, i)) continue;
        sentences.emplace_back(text.substr(start, j - start));
        start = j + 1;
        i = j;
    }
    if (start < n) sentences.emplace_back(text.substr(start));
    return sentences;
}

std::string segmentation_source(const PaperRecord& paper) {
    std::string joined = paper.abstract;
    joined.push_back(' ');
    joined += paper.introduction;
    if (paper.body) {
        joined.push_back(' ');
        joined += *paper.body;
    }
    return normalize_whitespace(joined);
}

std::vector<Segment> segment_paper(const PaperRecord& paper, int target) {
    if (target < 1) throw PreconditionError("segment target must be at least 1");
    auto sentences = split_sentences(segmentation_source(paper));
    std::vector<Segment> segments;
    for (std::size_t i = 0; i < sentences.size(); i += static_cast<std::size_t>(target)) {
        std::size_t end = std::min(sentences.size(), i + static_cast<std::size_t>(target));
        Segment seg;
        seg.segment_id = static_cast<int>(segments.size());
        seg.paper_id = paper.paper_id;
        seg.sentence_count = static_cast<int>(end - i);
        for (std::size_t s = i; s < end; ++s) {
            if (s > i) seg.text.push_back(' ');
            seg.text += sentences[s];
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

}  // namespace tod
