#include "tod/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <thread>

#include "tod/moderator.hpp"
#include "tod/persona.hpp"

namespace tod {
namespace {

constexpr Side kSides[2] = {Side::author_0, Side::author_1};

std::size_t index_of(Side side) { return side == Side::author_0 ? 0 : 1; }

CallTag tag_for(const std::string& node_id, Side side) {
    return CallTag{node_id, std::string(to_string(side))};
}

void require_variant(const RunConfig& config, Variant expected) {
    config.validate();
    if (config.variant != expected) {
        throw PreconditionError("configuration selects variant " +
                                std::string(to_string(config.variant)) + ", not " +
                                std::string(to_string(expected)));
    }
}

ChatGateway make_gateway(const RunConfig& config, const Providers& providers) {
    if (!providers.chat) throw ConfigError("no chat provider configured");
    return ChatGateway(providers.chat, config.sampling,
                       GatewayOptions{config.retry, config.max_in_flight, config.repair_rounds});
}

// Drives self-deliberation, debate, judgment and expansion over one tree.
class TreeBuilder {
public:
    TreeBuilder(const RunConfig& config, ChatGateway& gateway, EvidenceSource& source_a,
                EvidenceSource& source_b, DebateTree& tree, bool single_child)
        : config_(config),
          gateway_(gateway),
          sources_{&source_a, &source_b},
          tree_(tree),
          single_child_(single_child) {}

    void build(Transcript& log) {
        auto root = tree_.checkout(tree_.root_id());
        deliberate(root, log);
        tree_.store_work(root);
        root = tree_.advance_status(root.node_id, NodeEvent::deliberation_complete);
        auto proposals = propose(root, log);
        tree_.store_work(root);
        process_children(expand(root, proposals), log);
    }

private:
    Persona persona(Side side) const { return Persona{side, tree_.paper(side)}; }

    void deliberate(TopicNode& work, Transcript& log) {
        std::optional<std::string> description;
        if (!work.description.empty()) description = work.description;
        auto query = format_topic_query(work.title, description);
        std::vector<Segment> pools[2];
        std::vector<Claim> claims[2];
        for (auto side : kSides) {
            auto i = index_of(side);
            auto tag = tag_for(work.node_id, side);
            pools[i] = sources_[i]->retrieve(query, config_.delta, log, tag);
            claims[i] = generate_claims(gateway_, persona(side), query, pools[i], config_.k, log, tag);
            if (claims[i].empty()) {
                work.notes.push_back(std::string(to_string(side)) + " has no claims at this node");
            }
        }
        Preemption preemptions[2];
        for (auto side : kSides) {
            auto i = index_of(side);
            preemptions[i] = preempt(gateway_, *sources_[i], claims[1 - i], config_.delta, log,
                                     tag_for(work.node_id, side));
        }
        work.claims_a = std::move(claims[0]);
        work.claims_b = std::move(claims[1]);
        work.evidence_a = EvidencePool{std::move(pools[0]), std::move(preemptions[0].counter),
                                       std::move(preemptions[0].unaddressed)};
        work.evidence_b = EvidencePool{std::move(pools[1]), std::move(preemptions[1].counter),
                                       std::move(preemptions[1].unaddressed)};
    }

    // A persona's claims at `node` (optionally a subset), its evidence list,
    // and the opponent's counter-evidence against those claims.
    static DebateInput view(const TopicNode& node, Side side, const std::vector<int>* subset) {
        DebateInput in;
        in.evidence = node.evidence(side).supporting;
        const auto& counter = node.evidence(opponent(side)).counter;
        for (const auto& claim : node.claims(side)) {
            if (subset && std::find(subset->begin(), subset->end(), claim.claim_id) == subset->end()) {
                continue;
            }
            in.claims.push_back(claim);
            if (auto it = counter.find(claim.claim_id); it != counter.end()) {
                in.counter[claim.claim_id] = it->second;
            }
        }
        return in;
    }

    std::vector<SubtopicProposal> propose(TopicNode& work, Transcript& log) {
        if (work.claims_a.empty() && work.claims_b.empty()) {
            work.notes.push_back("no viable subtopics: neither persona has claims");
            log.note(CallTag{work.node_id, ""}, work.notes.back());
            return {};
        }
        SubtopicRequest request{work.title,
                                work.description,
                                tree_.paper_a(),
                                tree_.paper_b(),
                                view(work, Side::author_0, nullptr),
                                view(work, Side::author_1, nullptr)};
        auto result = generate_subtopics(gateway_, request, config_.k, log, CallTag{work.node_id, ""});
        for (auto& reason : result.dropped) work.notes.push_back(std::move(reason));
        if (result.proposals.empty()) {
            work.notes.push_back("no viable subtopics");
            return {};
        }
        if (single_child_) return {merge_proposals(result.proposals)};
        return result.proposals;
    }

    std::vector<std::string> expand(const TopicNode& parent,
                                    const std::vector<SubtopicProposal>& proposals) {
        auto ids = tree_.attach_children(parent.node_id, proposals);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            auto child = tree_.checkout(ids[i]);
            child.input_a = view(parent, Side::author_0, &proposals[i].relevant_claims_a);
            child.input_b = view(parent, Side::author_1, &proposals[i].relevant_claims_b);
            tree_.store_work(child);
        }
        return ids;
    }

    void process_children(const std::vector<std::string>& ids, Transcript& log) {
        std::vector<Transcript> locals(ids.size());
        std::vector<std::exception_ptr> errors(ids.size());
        auto work = [&](std::size_t i) {
            try {
                process_node(ids[i], locals[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        };
        auto width = static_cast<std::size_t>(std::max(1, config_.concurrency));
        for (std::size_t start = 0; start < ids.size(); start += width) {
            auto end = std::min(ids.size(), start + width);
            if (end - start == 1) {
                work(start);
                continue;
            }
            std::vector<std::thread> threads;
            for (std::size_t i = start; i < end; ++i) threads.emplace_back(work, i);
            for (auto& t : threads) t.join();
        }
        for (std::size_t i = 0; i < ids.size(); ++i) {
            log.merge(locals[i]);
            if (errors[i]) std::rethrow_exception(errors[i]);
        }
    }

    void process_node(const std::string& id, Transcript& log) {
        auto work = tree_.checkout(id);
        const auto& paper_a = tree_.paper_a();
        const auto& paper_b = tree_.paper_b();
        DebateContext a{persona(Side::author_0), paper_b, work.title, work.description, work.input_a};
        DebateContext b{persona(Side::author_1), paper_a, work.title, work.description, work.input_b};
        work.turns = run_debate(gateway_, a, b, log, id);
        work.revised_argument_a = work.turns[4].text;
        work.revised_argument_b = work.turns[5].text;
        tree_.store_work(work);
        work = tree_.advance_status(id, NodeEvent::debate_complete);

        std::string previous;
        if (work.depth == 1) {
            previous = render_entering_claims(work.input_a, work.input_b);
        } else {
            auto parent = tree_.node(*work.parent);
            previous = render_argument_pair(parent.revised_argument_a.value_or(""),
                                            parent.revised_argument_b.value_or(""));
        }
        JudgeRequest judge{work.title, work.description, work.turns, previous,
                           render_argument_pair(*work.revised_argument_a, *work.revised_argument_b)};
        work.verdict = judge_expansion(gateway_, judge, log, CallTag{id, ""});
        if (work.verdict->degraded) work.notes.push_back("expansion verdict degraded to stop");
        tree_.store_work(work);
        work = tree_.advance_status(id, NodeEvent::verdict_recorded);

        if (single_child_ || !should_expand(*work.verdict, work.depth, config_.max_depth)) {
            tree_.advance_status(id, NodeEvent::stop_decision);
            return;
        }
        deliberate(work, log);
        auto proposals = propose(work, log);
        tree_.store_work(work);
        process_children(expand(work, proposals), log);
    }

    const RunConfig& config_;
    ChatGateway& gateway_;
    EvidenceSource* sources_[2];
    DebateTree& tree_;
    bool single_child_;
};

RunArtifacts run_tree_variant(const PairSample& pair, const RunConfig& config,
                              const Providers& providers, Variant variant) {
    require_variant(config, variant);
    auto gateway = make_gateway(config, providers);
    RunArtifacts out;
    out.variant = variant;
    out.config_snapshot = config.redacted();
    auto tree = DebateTree::create_root(pair.topic_title, pair.topic_description.value_or(""),
                                        pair.paper_a, pair.paper_b, config);
    const std::string root = tree.root_id();

    std::unique_ptr<EmbeddingService> embeddings;
    std::unique_ptr<EvidenceSource> sources[2];
    if (variant == Variant::tod_no_sd) {
        sources[0] = std::make_unique<FixedContextSource>(pair.paper_a);
        sources[1] = std::make_unique<FixedContextSource>(pair.paper_b);
    } else {
        if (!providers.embedding) throw ConfigError("no embedding provider configured");
        embeddings = std::make_unique<EmbeddingService>(providers.embedding, config.retry);
        for (auto side : kSides) {
            const auto& paper = side == Side::author_0 ? pair.paper_a : pair.paper_b;
            auto source = std::make_unique<RetrievalSource>(
                segment_paper(paper, config.segment_sentences), *embeddings);
            source->prepare(out.transcript, tag_for(root, side));
            sources[index_of(side)] = std::move(source);
        }
    }

    TreeBuilder builder(config, gateway, *sources[0], *sources[1], tree,
                        variant == Variant::tod_no_tree);
    builder.build(out.transcript);
    out.summary = synthesize(gateway, tree, out.transcript).summary;
    out.tree = std::move(tree);
    return out;
}

}  // namespace

SubtopicProposal merge_proposals(const std::vector<SubtopicProposal>& proposals) {
    if (proposals.empty()) throw PreconditionError("merge_proposals needs at least one proposal");
    SubtopicProposal merged;
    std::set<int> a;
    std::set<int> b;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        const auto& p = proposals[i];
        auto tag = "subtopic_" + std::to_string(i + 1);
        if (i) {
            merged.title += "; ";
            merged.description += "\n";
        }
        merged.title += p.title;
        merged.description += "<" + tag + ">" + p.title + ": " + p.description + "</" + tag + ">";
        a.insert(p.relevant_claims_a.begin(), p.relevant_claims_a.end());
        b.insert(p.relevant_claims_b.begin(), p.relevant_claims_b.end());
    }
    merged.relevant_claims_a.assign(a.begin(), a.end());
    merged.relevant_claims_b.assign(b.begin(), b.end());
    return merged;
}

RunArtifacts run_tree_of_debate(const PairSample& pair, const RunConfig& config,
                                const Providers& providers) {
    return run_tree_variant(pair, config, providers, Variant::tod);
}

RunArtifacts run_no_tree(const PairSample& pair, const RunConfig& config, const Providers& providers) {
    return run_tree_variant(pair, config, providers, Variant::tod_no_tree);
}

RunArtifacts run_no_sd(const PairSample& pair, const RunConfig& config, const Providers& providers) {
    return run_tree_variant(pair, config, providers, Variant::tod_no_sd);
}

RunArtifacts run_single_stage(const PairSample& pair, const RunConfig& config,
                              const Providers& providers) {
    require_variant(config, Variant::single_stage);
    auto gateway = make_gateway(config, providers);
    RunArtifacts out;
    out.variant = Variant::single_stage;
    out.config_snapshot = config.redacted();
    auto prompt = render_prompt(TemplateId::baseline_single_stage,
                                {{"paper_0_title", pair.paper_a.title},
                                 {"paper_0_abstract", pair.paper_a.abstract},
                                 {"paper_0_introduction", pair.paper_a.introduction},
                                 {"paper_1_title", pair.paper_b.title},
                                 {"paper_1_abstract", pair.paper_b.abstract},
                                 {"paper_1_introduction", pair.paper_b.introduction}});
    out.summary = gateway.complete(
        gateway.make_request(TemplateId::baseline_single_stage, std::move(prompt)), out.transcript);
    return out;
}

RunArtifacts run_two_stage(const PairSample& pair, const RunConfig& config, const Providers& providers) {
    require_variant(config, Variant::two_stage);
    auto gateway = make_gateway(config, providers);
    RunArtifacts out;
    out.variant = Variant::two_stage;
    out.config_snapshot = config.redacted();
    std::string summaries[2];
    for (auto side : kSides) {
        const auto& paper = side == Side::author_0 ? pair.paper_a : pair.paper_b;
        auto prompt = render_prompt(TemplateId::baseline_paper_summary,
                                    {{"paper_title", paper.title},
                                     {"paper_abstract", paper.abstract},
                                     {"paper_introduction", paper.introduction}});
        summaries[index_of(side)] = gateway.complete(
            gateway.make_request(TemplateId::baseline_paper_summary, std::move(prompt),
                                 tag_for("", side)),
            out.transcript);
    }
    auto prompt = render_prompt(TemplateId::baseline_contrastive_summary,
                                {{"paper_0_title", pair.paper_a.title},
                                 {"paper_0_summary", summaries[0]},
                                 {"paper_1_title", pair.paper_b.title},
                                 {"paper_1_summary", summaries[1]}});
    out.summary = gateway.complete(
        gateway.make_request(TemplateId::baseline_contrastive_summary, std::move(prompt)),
        out.transcript);
    return out;
}

RunArtifacts run_variant(const PairSample& pair, const RunConfig& config, const Providers& providers) {
    switch (config.variant) {
        case Variant::tod: return run_tree_of_debate(pair, config, providers);
        case Variant::tod_no_tree: return run_no_tree(pair, config, providers);
        case Variant::tod_no_sd: return run_no_sd(pair, config, providers);
        case Variant::single_stage: return run_single_stage(pair, config, providers);
        case Variant::two_stage: return run_two_stage(pair, config, providers);
    }
    throw PreconditionError("unknown variant");
}

std::string pair_id(const PairSample& pair) {
    return pair.row > 0 ? "row-" + std::to_string(pair.row) : std::string("pair");
}

}  // namespace tod
