#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphmind/embedding.hpp"
#include "graphmind/kg.hpp"
#include "graphmind/llm.hpp"

namespace graphmind {

struct EntityMention {
    std::string surface;
    std::optional<std::pair<std::size_t, std::size_t>> source_span;
};

struct LinkedEntity {
    EntityMention mention;
    EntityId entity;
    double similarity;
};

struct Exemplar {
    std::string question;
    std::vector<std::string> entities;
};

// JSONL, one {"question": ..., "entities": [...]} object per line.
std::vector<Exemplar> load_exemplars(const std::string& path);

std::string build_extraction_prompt(const std::string& question,
                                    const std::vector<Exemplar>& exemplars);

// Parses a comma- or newline-delimited entity list, stripping bullets and
// numbering; dedups case-insensitively keeping first-seen order. Anything
// unparseable is a ParseError carrying the raw reply.
std::vector<EntityMention> parse_entity_list(const std::string& reply,
                                             const std::string& question);

// In-context extraction: exemplar (question -> entity list) pairs prepended
// to the target question.
std::vector<EntityMention> extract_entities(LlmClient& llm, const std::string& question,
                                            const std::vector<Exemplar>& exemplars,
                                            const CompletionParams& params = {});

// Maps each mention to the KG entity with maximal cosine similarity between
// label embeddings. Exact normalized-label matches short-circuit with
// similarity 1; ties fall to the smallest EntityId; the result is
// deduplicated by entity keeping the highest-similarity mention.
// min_similarity 0 keeps every link (the paper-faithful mode).
std::vector<LinkedEntity> link(const std::vector<EntityMention>& mentions,
                               const KnowledgeGraph& g, const Embedder& embedder,
                               double min_similarity = 0.0);

} // namespace graphmind
