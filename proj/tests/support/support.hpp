#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tod/debate_tree.hpp"
#include "tod/mock.hpp"
#include "tod/moderator.hpp"
#include "tod/pipeline.hpp"

namespace tod::test {

inline std::filesystem::path source_path(const std::string& relative) {
    return std::filesystem::path(TOD_SOURCE_DIR) / relative;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << text;
}

inline bool update_goldens() {
    const char* v = std::getenv("TOD_UPDATE_GOLDENS");
    return v && std::string(v) == "1";
}

// Fresh directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("tod-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline PairSample fixture_pair() { return load_dataset(source_path("tests/fixtures/pair.tsv")).at(0); }

inline MockScript fixture_script() {
    return load_mock_script(source_path("tests/fixtures/mock_script.yaml"));
}

struct MockSet {
    std::shared_ptr<ScriptedChatProvider> chat;
    std::shared_ptr<MockEmbeddingProvider> embedding;

    Providers providers() const { return Providers{chat, embedding}; }
};

inline MockSet make_mocks(const MockScript& script) {
    return MockSet{std::make_shared<ScriptedChatProvider>(script.chat),
                   std::make_shared<MockEmbeddingProvider>(script.embedding)};
}

inline RunConfig config_for(Variant variant) {
    RunConfig c;
    c.variant = variant;
    c.retry.base_delay = std::chrono::milliseconds(0);
    return c;
}

// Brute-force ranking oracle: every cosine in long double, full sort, then
// truncate. Independent of the library's cosine and top_delta.
inline std::vector<std::pair<int, long double>> oracle_ranking(const std::vector<double>& query,
                                                               const std::vector<PoolEntry>& pool,
                                                               int delta) {
    auto norm = [](const std::vector<double>& v) {
        long double s = 0;
        for (double x : v) s += static_cast<long double>(x) * x;
        return std::sqrt(s);
    };
    std::vector<std::pair<int, long double>> all;
    long double nq = norm(query);
    for (const auto& e : pool) {
        long double dot = 0;
        for (std::size_t i = 0; i < query.size(); ++i) {
            dot += static_cast<long double>(query[i]) * e.vector.values[i];
        }
        all.emplace_back(e.segment.segment_id, dot / (nq * norm(e.vector.values)));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    all.resize(std::min(all.size(), static_cast<std::size_t>(delta)));
    return all;
}

// Random pool with exact duplicate vectors under distinct ids, in shuffled
// order, so the tie-break is exercised.
struct RandomPool {
    std::vector<double> query;
    std::vector<PoolEntry> pool;
    int delta = 1;
};

inline RandomPool random_pool(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim_dist(1, 64);
    std::uniform_int_distribution<int> size_dist(1, 200);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    RandomPool out;
    int dim = dim_dist(rng);
    int size = size_dist(rng);
    auto draw = [&] {
        std::vector<double> v(static_cast<std::size_t>(dim));
        do {
            for (auto& x : v) x = value(rng);
        } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
        return v;
    };
    out.query = draw();
    for (int i = 0; i < size; ++i) {
        std::vector<double> v;
        if (i > 0 && std::bernoulli_distribution(0.2)(rng)) {
            v = out.pool[std::uniform_int_distribution<std::size_t>(0, out.pool.size() - 1)(rng)]
                    .vector.values;
        } else {
            v = draw();
        }
        out.pool.push_back(PoolEntry{Segment{i, "p", "s" + std::to_string(i), 1}, EmbeddingVector{v}});
    }
    std::shuffle(out.pool.begin(), out.pool.end(), rng);
    out.delta = std::uniform_int_distribution<int>(1, size + 5)(rng);
    return out;
}

// Dataset with the given number of cited and method-differing rows, spread
// so that all four cells are exercised.
inline std::vector<PairSample> synthetic_dataset(int total, int cited, int method) {
    std::vector<PairSample> rows;
    for (int i = 0; i < total; ++i) {
        PairSample s;
        s.row = i + 1;
        s.topic_title = "Topic " + std::to_string(i);
        s.paper_a = PaperRecord{"", "First " + std::to_string(i), "Abstract one. Two.", "Intro.",
                                std::nullopt, "https://example.org/a/" + std::to_string(i)};
        s.paper_b = PaperRecord{"", "Second " + std::to_string(i), "Abstract b.", "Intro b.",
                                std::nullopt, "https://example.org/b/" + std::to_string(i)};
        s.citation_link = i < cited ? CitationLink::cited : CitationLink::not_cited;
        s.differs_by = (i * 7) % total < method ? DiffersBy::method : DiffersBy::task;
        rows.push_back(s);
    }
    return rows;
}

inline std::vector<DebateTurn> scripted_turns(const std::string& node_id) {
    std::vector<DebateTurn> turns;
    for (const auto& [side, stage] : kTurnOrder) {
        turns.push_back(DebateTurn{side, stage,
                                   std::string(to_string(side)) + " " +
                                       std::string(to_string(stage)) + " at " + node_id});
    }
    return turns;
}

inline SubtopicProposal proposal(const std::string& title) {
    return SubtopicProposal{title, title + " description", {0}, {0}};
}

inline PaperRecord paper(const std::string& id, const std::string& title) {
    return PaperRecord{id, title, title + " abstract.", title + " introduction.", std::nullopt,
                       std::nullopt};
}

struct FuzzOutcome {
    DebateTree tree;
    int k = 0;
    int max_depth = 0;
    int illegal_rejected = 0;
};

// Grows a tree through a random legal event sequence: pending nodes are
// picked in random order, verdicts are random, the expansion gate decides,
// and expanding nodes get 0..k children. Illegal events are attempted along
// the way and must be rejected without changing the tree.
inline FuzzOutcome fuzz_tree(std::mt19937_64& rng) {
    RunConfig config;
    config.k = std::uniform_int_distribution<int>(1, 4)(rng);
    config.max_depth = std::uniform_int_distribution<int>(1, 4)(rng);
    auto tree = DebateTree::create_root("topic", "description", paper("a", "A"), paper("b", "B"),
                                        config);
    FuzzOutcome out{tree, config.k, config.max_depth, 0};
    auto& t = out.tree;
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    auto children = [&] {
        std::vector<SubtopicProposal> ps;
        int n = std::uniform_int_distribution<int>(0, config.k)(rng);
        for (int i = 0; i < n; ++i) ps.push_back(proposal("sub " + std::to_string(i)));
        return ps;
    };
    auto try_illegal = [&](const std::string& id) {
        auto before = t;
        static constexpr NodeEvent kEvents[] = {NodeEvent::deliberation_complete,
                                                NodeEvent::debate_complete,
                                                NodeEvent::verdict_recorded, NodeEvent::stop_decision};
        auto status = t.node(id).status;
        for (auto e : kEvents) {
            bool legal = (status == NodeStatus::created && e == NodeEvent::debate_complete) ||
                         (status == NodeStatus::debated && e == NodeEvent::verdict_recorded) ||
                         (status == NodeStatus::judged && e == NodeEvent::stop_decision);
            if (legal) continue;
            try {
                t.advance_status(id, e);
            } catch (const StateError&) {
                ++out.illegal_rejected;
                continue;
            }
            throw std::logic_error("illegal event accepted at " + id);
        }
        if (!(t == before)) throw std::logic_error("rejected event changed the tree at " + id);
    };

    auto root = t.advance_status(t.root_id(), NodeEvent::deliberation_complete);
    std::vector<std::string> pending = t.attach_children(root.node_id, children());
    while (!pending.empty()) {
        auto pick = std::uniform_int_distribution<std::size_t>(0, pending.size() - 1)(rng);
        auto id = pending[pick];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
        if (coin(0.3)) try_illegal(id);

        auto work = t.checkout(id);
        work.turns = scripted_turns(id);
        work.revised_argument_a = work.turns[4].text;
        work.revised_argument_b = work.turns[5].text;
        t.store_work(work);
        t.advance_status(id, NodeEvent::debate_complete);
        if (coin(0.2)) try_illegal(id);

        work = t.checkout(id);
        work.verdict = ExpansionVerdict{"scripted", coin(0.5), coin(0.5), coin(0.5), false};
        t.store_work(work);
        work = t.advance_status(id, NodeEvent::verdict_recorded);
        if (coin(0.2)) try_illegal(id);

        if (should_expand(*work.verdict, work.depth, config.max_depth)) {
            auto ids = t.attach_children(id, children());
            pending.insert(pending.end(), ids.begin(), ids.end());
        } else {
            t.advance_status(id, NodeEvent::stop_decision);
        }
    }
    return out;
}

// Invariants checked independently of audit_tree.
inline std::vector<std::string> independent_audit(const DebateTree& tree, int k, int max_depth) {
    std::vector<std::string> problems;
    auto nodes = tree.nodes();
    for (const auto& [id, n] : nodes) {
        if (n.depth > max_depth) problems.push_back(id + ": depth above max");
        if (static_cast<int>(n.children.size()) > k) problems.push_back(id + ": too many children");
        if (n.status != NodeStatus::leaf && n.status != NodeStatus::expanded) {
            problems.push_back(id + ": unfinished status");
        }
        if ((n.status == NodeStatus::expanded) != !n.children.empty()) {
            problems.push_back(id + ": expanded iff children violated");
        }
        if (n.depth == 0) {
            if (!n.turns.empty()) problems.push_back(id + ": root has turns");
            continue;
        }
        if (!canonical_turns(n.turns)) problems.push_back(id + ": turns not canonical");
        if (!n.verdict) problems.push_back(id + ": no verdict");
        if (n.turns.size() != 6 || n.revised_argument_a != n.turns[4].text ||
            n.revised_argument_b != n.turns[5].text) {
            problems.push_back(id + ": revised arguments do not match revise turns");
        }
        if (n.status == NodeStatus::expanded && n.verdict &&
            !should_expand(*n.verdict, n.depth, max_depth)) {
            problems.push_back(id + ": expanded against the gate");
        }
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (n.children[i] != id + "." + std::to_string(i + 1)) problems.push_back(id + ": child id");
            if (nodes.at(n.children[i]).depth != n.depth + 1) problems.push_back(id + ": child depth");
        }
    }
    return problems;
}

}  // namespace tod::test
