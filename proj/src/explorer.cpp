#include "graphmind/explorer.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "graphmind/errors.hpp"

namespace graphmind {

std::string evidence_kind_name(EvidenceKind kind) {
    return kind == EvidenceKind::path_based ? "path-based" : "neighbor-based";
}

EvidenceSubgraph EvidenceSubgraph::make(EvidenceKind kind, EntityId head,
                                        std::vector<Triple> triples) {
    if (triples.empty()) throw ContractViolation("evidence subgraph must have triples");
    EvidenceSubgraph sg;
    sg.kind = kind;
    sg.head = head;
    sg.triples = std::move(triples);
    sg.nodes.insert(head);
    for (const Triple& t : sg.triples) {
        sg.nodes.insert(t.head);
        sg.nodes.insert(t.tail);
    }
    return sg;
}

// ---------------------------------------------------------------------------
// Path-based exploration

std::vector<PathChain> stitch_paths(const KnowledgeGraph& g, const std::vector<EntityId>& vq,
                                    std::size_t k) {
    std::vector<EntityId> unique;
    std::unordered_set<EntityId> seen;
    for (EntityId v : vq) {
        if (seen.insert(v).second) unique.push_back(v);
    }
    std::vector<PathChain> chains;
    if (unique.size() < 2) return chains;

    std::vector<EntityId> candidates(unique.begin() + 1, unique.end());
    EntityId start = unique.front();
    PathChain current{start, {}};

    auto close_chain = [&] {
        if (!current.segments.empty()) chains.push_back(std::move(current));
        current = PathChain{};
    };

    while (true) {
        std::optional<HopPath> segment;
        if (!candidates.empty()) {
            segment = g.bfs_within_k(start, candidates, k);
        }
        if (segment) {
            EntityId found = segment->endpoints.second;
            current.segments.push_back(std::move(*segment));
            candidates.erase(std::find(candidates.begin(), candidates.end(), found));
            start = found;
            continue;
        }
        close_chain();
        if (candidates.empty()) break;
        // Retire only the failed start; the next candidate opens a new chain.
        start = candidates.front();
        candidates.erase(candidates.begin());
        current = PathChain{start, {}};
    }
    return chains;
}

PathExplorationResult explore_path_based(const KnowledgeGraph& g,
                                         const std::vector<EntityId>& vq,
                                         const ExplorationConfig& cfg) {
    PathExplorationResult result;
    std::unordered_set<EntityId> augmented_set;
    for (EntityId v : vq) {
        if (augmented_set.insert(v).second) result.augmented_entities.push_back(v);
    }

    for (PathChain& chain : stitch_paths(g, vq, cfg.k)) {
        std::vector<Triple> triples;
        for (const HopPath& segment : chain.segments) {
            triples.insert(triples.end(), segment.triples.begin(), segment.triples.end());
            // Bridging nodes: everything on the segment that was not a query
            // entity to begin with.
            for (const Triple& t : segment.triples) {
                for (EntityId v : {t.head, t.tail}) {
                    if (augmented_set.insert(v).second) {
                        result.augmented_entities.push_back(v);
                    }
                }
            }
        }
        if (!triples.empty()) {
            result.subgraphs.push_back(
                EvidenceSubgraph::make(EvidenceKind::path_based, chain.head, std::move(triples)));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Neighbor-based exploration

std::vector<EvidenceSubgraph> explore_neighbor_based(const KnowledgeGraph& g,
                                                     const std::vector<EntityId>& vq,
                                                     const Embedding& question_embedding,
                                                     const Embedder& embedder,
                                                     const ExplorationConfig& cfg) {
    std::vector<EvidenceSubgraph> subgraphs;
    for (EntityId seed : vq) {
        std::vector<Triple> triples;
        std::unordered_set<std::uint32_t> taken;
        auto add_incident = [&](EntityId v) {
            for (std::uint32_t idx : g.incident_triple_indices(v, Direction::both)) {
                if (taken.insert(idx).second) triples.push_back(g.triples()[idx]);
            }
        };

        add_incident(seed);

        // First-hop neighbors in first-appearance order of the seed's
        // incident triples.
        std::vector<EntityId> first_hop;
        std::unordered_set<EntityId> seen_neighbors{seed};
        for (std::uint32_t idx : g.incident_triple_indices(seed, Direction::both)) {
            const Triple& t = g.triples()[idx];
            EntityId other = t.head == seed ? t.tail : t.head;
            if (seen_neighbors.insert(other).second) first_hop.push_back(other);
        }

        for (EntityId neighbor : first_hop) {
            double gate = cosine(embedder(g.entity_label(neighbor)), question_embedding);
            if (gate >= cfg.tau) add_incident(neighbor);
        }

        if (!triples.empty()) {
            subgraphs.push_back(
                EvidenceSubgraph::make(EvidenceKind::neighbor_based, seed, std::move(triples)));
        }
    }
    return subgraphs;
}

// ---------------------------------------------------------------------------
// Pruning and merging

namespace {

// Deterministic bounded draw; std::uniform_int_distribution is not portable
// across standard libraries.
std::uint64_t bounded_uint64(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Choose `want` of `count` indices uniformly (partial Fisher-Yates), returned
// ascending so the survivors keep their relative order.
std::vector<std::size_t> sample_indices(std::mt19937_64& rng, std::size_t count,
                                        std::size_t want) {
    std::vector<std::size_t> pool(count);
    for (std::size_t i = 0; i < count; ++i) pool[i] = i;
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + static_cast<std::size_t>(bounded_uint64(rng, count - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(want);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

std::vector<EvidenceSubgraph> prune(const std::vector<EvidenceSubgraph>& subgraphs,
                                    const ExplorationConfig& cfg) {
    // Cluster by head, keeping first-appearance order of heads.
    std::vector<EntityId> head_order;
    std::unordered_map<EntityId, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < subgraphs.size(); ++i) {
        EntityId head = subgraphs[i].head;
        auto [it, inserted] = clusters.try_emplace(head);
        if (inserted) head_order.push_back(head);
        it->second.push_back(i);
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<bool> keep(subgraphs.size(), false);
    for (EntityId head : head_order) {
        const std::vector<std::size_t>& members = clusters[head];
        if (members.size() <= cfg.n_max) {
            for (std::size_t i : members) keep[i] = true;
        } else {
            for (std::size_t pick : sample_indices(rng, members.size(), cfg.n_max)) {
                keep[members[pick]] = true;
            }
        }
    }

    std::vector<EvidenceSubgraph> result;
    for (std::size_t i = 0; i < subgraphs.size(); ++i) {
        if (keep[i]) result.push_back(subgraphs[i]);
    }
    return result;
}

EvidenceGraphs merge(std::vector<EvidenceSubgraph> path_subgraphs,
                     std::vector<EvidenceSubgraph> neighbor_subgraphs,
                     std::vector<EntityId> augmented_entities) {
    EvidenceGraphs result;
    result.path_subgraphs = std::move(path_subgraphs);
    result.neighbor_subgraphs = std::move(neighbor_subgraphs);
    result.augmented_entities = std::move(augmented_entities);
    return result;
}

std::string evidence_to_json(const EvidenceGraphs& evidence, const KnowledgeGraph& g) {
    using ordered_json = nlohmann::ordered_json;
    auto subgraph_json = [&](const EvidenceSubgraph& sg) {
        ordered_json out;
        out["kind"] = evidence_kind_name(sg.kind);
        out["head"] = g.entity_label(sg.head);
        ordered_json triples = ordered_json::array();
        for (const Triple& t : sg.triples) {
            triples.push_back({g.entity_label(t.head), g.relation_label(t.relation),
                               g.entity_label(t.tail)});
        }
        out["triples"] = std::move(triples);
        return out;
    };

    ordered_json doc;
    std::vector<std::string> labels;
    for (EntityId v : evidence.augmented_entities) labels.push_back(g.entity_label(v));
    std::sort(labels.begin(), labels.end());
    doc["augmented_entities"] = labels;
    doc["path_subgraphs"] = ordered_json::array();
    for (const EvidenceSubgraph& sg : evidence.path_subgraphs) {
        doc["path_subgraphs"].push_back(subgraph_json(sg));
    }
    doc["neighbor_subgraphs"] = ordered_json::array();
    for (const EvidenceSubgraph& sg : evidence.neighbor_subgraphs) {
        doc["neighbor_subgraphs"].push_back(subgraph_json(sg));
    }
    return doc.dump(2) + "\n";
}

} // namespace graphmind
