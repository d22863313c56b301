#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace graphmind {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// Interned label table: dense ids in interning order, lookup by link_key so
// case and word-boundary variants of one label resolve to the same id.
class LabelTable {
public:
    std::uint32_t intern(const std::string& label);
    std::optional<std::uint32_t> find(const std::string& label) const;
    const std::string& label(std::uint32_t id) const { return labels_[id]; }
    std::size_t size() const { return labels_.size(); }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::uint32_t> by_key_;
};

// An undirected traversal result. Triples keep their stored direction;
// consecutive triples share an entity along the endpoints[0] -> endpoints[1]
// walk. hops() == 0 means src was already a target.
struct HopPath {
    std::vector<Triple> triples;
    std::pair<EntityId, EntityId> endpoints{0, 0};

    std::size_t hops() const { return triples.size(); }
};

enum class Direction { out, in, both };
enum class TripleFormat { csv, jsonl };

struct RejectedRecord {
    std::size_t line = 0;
    std::string reason;
};

struct LoadReport {
    std::size_t records_read = 0;
    std::size_t deduplicated = 0;
    std::vector<RejectedRecord> rejected;
};

class KnowledgeGraph;

class KnowledgeGraphBuilder {
public:
    EntityId intern_entity(const std::string& label);
    RelationId intern_relation(const std::string& label);

    // Returns false when the triple is already present (deduplicated).
    bool add_triple(const std::string& head, const std::string& relation,
                    const std::string& tail);
    bool add_triple(EntityId head, RelationId relation, EntityId tail);

    KnowledgeGraph build() &&;

private:
    LabelTable entities_;
    LabelTable relations_;
    std::vector<Triple> triples_;
    std::unordered_set<std::uint64_t> seen_;
};

// Immutable once built; safe for unrestricted concurrent reads.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t relation_count() const { return relations_.size(); }
    std::size_t triple_count() const { return triples_.size(); }

    const std::vector<Triple>& triples() const { return triples_; }
    const std::string& entity_label(EntityId id) const;
    const std::string& relation_label(RelationId id) const;

    std::optional<EntityId> find_entity(const std::string& label) const;
    std::optional<RelationId> find_relation(const std::string& label) const;

    // Incident triples of v in insertion order. Throws ContractViolation on
    // an invalid id.
    std::vector<Triple> neighbors(EntityId v, Direction direction) const;
    std::vector<std::uint32_t> incident_triple_indices(EntityId v, Direction direction) const;

    // Minimal-hop undirected path from src to the nearest member of targets,
    // hops <= k. Ties: smallest target EntityId, then the lexicographically
    // smallest entity-id sequence. Absent when nothing is reachable within k.
    std::optional<HopPath> bfs_within_k(EntityId src,
                                        const std::vector<EntityId>& targets,
                                        std::size_t k) const;

private:
    friend class KnowledgeGraphBuilder;

    void check_entity(EntityId id) const;

    // Deterministic pick among parallel edges between u and v, independent of
    // insertion order.
    const Triple& connecting_triple(EntityId u, EntityId v) const;

    LabelTable entities_;
    LabelTable relations_;
    std::vector<Triple> triples_;
    std::vector<std::vector<std::uint32_t>> out_adjacency_;
    std::vector<std::vector<std::uint32_t>> in_adjacency_;
};

// Parses a triple dump. Malformed or undecodable records are collected in the
// report (with 1-based line numbers) rather than aborting the load; duplicate
// records are counted and dropped. Throws InputDataError for file-level
// problems (missing or wrong CSV header).
std::pair<KnowledgeGraph, LoadReport> load_graph(std::istream& in, TripleFormat format);

// Canonical CSV: header line, RFC 4180 quoting, rows sorted by
// (head id, relation id, tail id).
void write_canonical_csv(const KnowledgeGraph& g, std::ostream& out);

} // namespace graphmind
