#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "graphmind/embedding.hpp"
#include "graphmind/kg.hpp"

namespace graphmind {

struct ExplorationConfig {
    std::size_t k = 3;        // max hops for path search
    double tau = 0.6;         // cosine gate for second-hop neighbor expansion
    std::size_t n_max = 5;    // per-head-cluster cap for pruning
    std::uint64_t seed = 0;
};

enum class EvidenceKind { path_based, neighbor_based };

std::string evidence_kind_name(EvidenceKind kind);

struct EvidenceSubgraph {
    EvidenceKind kind;
    EntityId head;                       // cluster key: the query entity that seeded it
    std::vector<Triple> triples;         // nonempty, ordered
    std::unordered_set<EntityId> nodes;  // derived from triples plus head

    static EvidenceSubgraph make(EvidenceKind kind, EntityId head, std::vector<Triple> triples);
};

struct EvidenceGraphs {
    std::vector<EvidenceSubgraph> path_subgraphs;
    std::vector<EvidenceSubgraph> neighbor_subgraphs;
    std::vector<EntityId> augmented_entities;  // final query set incl. bridging nodes
};

// One stitched chain of path segments; head is the chain's first query entity.
struct PathChain {
    EntityId head;
    std::vector<HopPath> segments;
};

// The iterated segment-stitching loop: start from the first query entity,
// repeatedly BFS to the nearest remaining candidate, and close the chain on
// failure. Exposed separately so the segments can be checked one by one.
std::vector<PathChain> stitch_paths(const KnowledgeGraph& g, const std::vector<EntityId>& vq,
                                    std::size_t k);

struct PathExplorationResult {
    std::vector<EvidenceSubgraph> subgraphs;
    std::vector<EntityId> augmented_entities;  // vq plus bridging nodes, in discovery order
};

PathExplorationResult explore_path_based(const KnowledgeGraph& g,
                                         const std::vector<EntityId>& vq,
                                         const ExplorationConfig& cfg);

// 1-hop closure of each seed plus a gated second hop through neighbors whose
// label embedding passes cosine(embed(label), question_embedding) >= tau.
std::vector<EvidenceSubgraph> explore_neighbor_based(const KnowledgeGraph& g,
                                                     const std::vector<EntityId>& vq,
                                                     const Embedding& question_embedding,
                                                     const Embedder& embedder,
                                                     const ExplorationConfig& cfg);

// Head-entity clustering with seeded down-sampling to n_max per cluster;
// relative order within survivors is preserved and a fixed seed gives
// byte-identical output.
std::vector<EvidenceSubgraph> prune(const std::vector<EvidenceSubgraph>& subgraphs,
                                    const ExplorationConfig& cfg);

EvidenceGraphs merge(std::vector<EvidenceSubgraph> path_subgraphs,
                     std::vector<EvidenceSubgraph> neighbor_subgraphs,
                     std::vector<EntityId> augmented_entities);

// Stable JSON rendering (labels, not ids) for golden files and CLI
// inspection.
std::string evidence_to_json(const EvidenceGraphs& evidence, const KnowledgeGraph& g);

} // namespace graphmind
