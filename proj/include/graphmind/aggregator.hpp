#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "graphmind/explorer.hpp"
#include "graphmind/kg.hpp"
#include "graphmind/llm.hpp"

namespace graphmind {

// One rendered hop: sources share the same relation and target, e.g.
// (Fatigue, Nausea) - IsSymptomOf - LiverProblem.
struct RouteHop {
    std::vector<std::string> sources;
    std::string relation;
    std::string target;

    friend bool operator==(const RouteHop&, const RouteHop&) = default;
};

struct EvidenceRoute {
    std::string text;
    std::vector<RouteHop> structured;
    EvidenceKind kind;
    std::size_t subgraph_index;  // position within its kind in EvidenceGraphs
};

struct ReasoningGraph {
    std::vector<EvidenceRoute> path_routes;
    std::vector<EvidenceRoute> neighbor_routes;
    std::string path_text;      // LLM-consolidated description, verbatim
    std::string neighbor_text;

    bool empty() const { return path_routes.empty() && neighbor_routes.empty(); }
};

// Hyphen-chain rendering of one subgraph's triple sequence. Consecutive
// triples sharing (relation, tail) group their heads; a hop whose single
// source equals the previous target extends the chain; everything else opens
// a new "; "-separated segment.
EvidenceRoute serialize_subgraph(const EvidenceSubgraph& sg, const KnowledgeGraph& g,
                                 std::size_t subgraph_index);

std::string render_route_text(const std::vector<RouteHop>& hops);

struct AggregationTemplates {
    std::string path_instruction;      // contains {evidence}
    std::string neighbor_instruction;  // contains {evidence}
};

// Numbered evidence list ("Path-based Evidence 1: ...") substituted into the
// kind's instruction template. The numbering is the canonical evidence id the
// answer parser resolves against.
std::string build_aggregation_prompt(const std::vector<EvidenceRoute>& routes,
                                     EvidenceKind kind, const AggregationTemplates& templates);

std::string numbered_evidence_block(const std::vector<EvidenceRoute>& routes, EvidenceKind kind);

// One consolidation call per nonempty kind; empty kinds produce empty
// components with no model call.
ReasoningGraph aggregate(LlmClient& llm, const EvidenceGraphs& evidence,
                         const KnowledgeGraph& g, const AggregationTemplates& templates,
                         const CompletionParams& params = {});

} // namespace graphmind
