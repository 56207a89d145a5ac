#pragma once

#include <cstddef>
#include <vector>

#include "tod/debate_types.hpp"
#include "tod/gateway.hpp"

namespace tod {

// Four Yes/No fields; JSON booleans are accepted too.
Schema<RelevanceVerdict> relevance_schema();

// {"arguments": [...]} or a bare list. Claims get 0-based ids in reply order;
// every evidence id must index an evidence list of `evidence_count` items.
// Extra arguments beyond k are discarded.
Schema<std::vector<Claim>> arguments_schema(std::size_t evidence_count, int k);

// {"subtopics": [...]} or a bare list. Structural checks only; claim-id
// existence is checked by the moderator so bad proposals can be dropped alone.
Schema<std::vector<SubtopicProposal>> subtopics_schema();

// explanation must be non-empty; booleans may be JSON booleans or the
// strings "True"/"False".
Schema<ExpansionVerdict> expansion_schema();

}  // namespace tod
