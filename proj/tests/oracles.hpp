#pragma once

// Test-only oracles: brute-force reference computations kept independent of
// the implementation paths they check.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "graphmind/kg.hpp"

namespace graphmind::testing {

// Exhaustive minimal-hop search: enumerates every simple undirected path from
// src up to max_len hops via DFS and returns the shortest distance to any
// target, if one exists.
inline std::optional<std::size_t> exhaustive_min_hops(const KnowledgeGraph& g, EntityId src,
                                                      const std::vector<EntityId>& targets,
                                                      std::size_t max_len) {
    std::set<EntityId> target_set(targets.begin(), targets.end());
    if (target_set.count(src)) return 0;

    std::optional<std::size_t> best;
    std::vector<bool> on_path(g.entity_count(), false);

    // Undirected adjacency sets.
    std::vector<std::set<EntityId>> adj(g.entity_count());
    for (const Triple& t : g.triples()) {
        adj[t.head].insert(t.tail);
        adj[t.tail].insert(t.head);
    }

    std::vector<std::pair<EntityId, std::size_t>> stack;  // (node, depth)
    std::vector<EntityId> path;
    struct Frame {
        EntityId node;
        std::vector<EntityId> next;
        std::size_t cursor = 0;
    };
    std::vector<Frame> frames;
    frames.push_back({src, {adj[src].begin(), adj[src].end()}, 0});
    on_path[src] = true;

    while (!frames.empty()) {
        Frame& top = frames.back();
        std::size_t depth = frames.size() - 1;
        if (top.cursor >= top.next.size() || depth >= max_len ||
            (best && depth + 1 >= *best)) {
            on_path[top.node] = false;
            frames.pop_back();
            continue;
        }
        EntityId next = top.next[top.cursor++];
        if (on_path[next]) continue;
        std::size_t next_depth = depth + 1;
        if (target_set.count(next)) {
            if (!best || next_depth < *best) best = next_depth;
            continue;
        }
        if (next_depth < max_len) {
            on_path[next] = true;
            frames.push_back({next, {adj[next].begin(), adj[next].end()}, 0});
        }
    }
    return best;
}

// Direct adjacency computation of the 1-hop closure: all triple indices
// incident to any seed.
inline std::set<std::uint32_t> one_hop_closure(const KnowledgeGraph& g,
                                               const std::vector<EntityId>& seeds) {
    std::set<std::uint32_t> closure;
    for (EntityId v : seeds) {
        for (std::uint32_t idx : g.incident_triple_indices(v, Direction::both)) {
            closure.insert(idx);
        }
    }
    return closure;
}

// 2-hop closure: triples incident to the seeds or to any first-hop neighbor.
inline std::set<std::uint32_t> two_hop_closure(const KnowledgeGraph& g,
                                               const std::vector<EntityId>& seeds) {
    std::set<EntityId> frontier(seeds.begin(), seeds.end());
    for (EntityId v : seeds) {
        for (const Triple& t : g.neighbors(v, Direction::both)) {
            frontier.insert(t.head);
            frontier.insert(t.tail);
        }
    }
    std::set<std::uint32_t> closure;
    for (EntityId v : frontier) {
        for (std::uint32_t idx : g.incident_triple_indices(v, Direction::both)) {
            closure.insert(idx);
        }
    }
    return closure;
}

// Seeded random multigraph-free KG for property tests: n nodes named N0..,
// up to max_edges distinct directed triples (no self loops).
inline KnowledgeGraph random_graph(std::mt19937_64& rng, std::size_t n_nodes,
                                   std::size_t max_edges, std::size_t n_relations = 3) {
    KnowledgeGraphBuilder builder;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        builder.intern_entity("N" + std::to_string(i));
    }
    std::vector<RelationId> relations;
    for (std::size_t i = 0; i < n_relations; ++i) {
        relations.push_back(builder.intern_relation("r" + std::to_string(i)));
    }
    for (std::size_t e = 0; e < max_edges; ++e) {
        auto u = static_cast<EntityId>(rng() % n_nodes);
        auto v = static_cast<EntityId>(rng() % n_nodes);
        if (u == v) continue;
        builder.add_triple(u, relations[rng() % relations.size()], v);
    }
    return std::move(builder).build();
}

// True when the triples form a single connected component, ignoring
// direction.
inline bool connected_undirected(const std::vector<Triple>& triples) {
    if (triples.empty()) return true;
    std::set<EntityId> nodes;
    for (const Triple& t : triples) {
        nodes.insert(t.head);
        nodes.insert(t.tail);
    }
    std::set<EntityId> reached{triples.front().head};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const Triple& t : triples) {
            bool h = reached.count(t.head) > 0;
            bool l = reached.count(t.tail) > 0;
            if (h != l) {
                reached.insert(h ? t.tail : t.head);
                grew = true;
            }
        }
    }
    return reached.size() == nodes.size();
}

} // namespace graphmind::testing
