#include "graphmind/aggregator.hpp"

#include <algorithm>
#include <sstream>

#include "graphmind/errors.hpp"

namespace graphmind {

namespace {

std::string replace_placeholder(std::string text, const std::string& placeholder,
                                const std::string& value) {
    std::size_t pos = text.find(placeholder);
    while (pos != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos = text.find(placeholder, pos + value.size());
    }
    return text;
}

} // namespace

EvidenceRoute serialize_subgraph(const EvidenceSubgraph& sg, const KnowledgeGraph& g,
                                 std::size_t subgraph_index) {
    std::vector<RouteHop> hops;
    for (const Triple& t : sg.triples) {
        const std::string& head = g.entity_label(t.head);
        const std::string& relation = g.relation_label(t.relation);
        const std::string& tail = g.entity_label(t.tail);
        if (!hops.empty() && hops.back().relation == relation && hops.back().target == tail) {
            auto& sources = hops.back().sources;
            if (std::find(sources.begin(), sources.end(), head) == sources.end()) {
                sources.push_back(head);
            }
            continue;
        }
        hops.push_back({{head}, relation, tail});
    }

    EvidenceRoute route;
    route.structured = std::move(hops);
    route.text = render_route_text(route.structured);
    route.kind = sg.kind;
    route.subgraph_index = subgraph_index;
    return route;
}

std::string render_route_text(const std::vector<RouteHop>& hops) {
    std::string out;
    std::string last_target;
    bool in_chain = false;
    for (const RouteHop& hop : hops) {
        bool extends = in_chain && hop.sources.size() == 1 && hop.sources[0] == last_target;
        if (extends) {
            out += " - " + hop.relation + " - " + hop.target;
        } else {
            if (in_chain) out += "; ";
            if (hop.sources.size() == 1) {
                out += hop.sources[0];
            } else {
                out += "(";
                for (std::size_t i = 0; i < hop.sources.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += hop.sources[i];
                }
                out += ")";
            }
            out += " - " + hop.relation + " - " + hop.target;
        }
        last_target = hop.target;
        in_chain = true;
    }
    return out;
}

std::string numbered_evidence_block(const std::vector<EvidenceRoute>& routes,
                                    EvidenceKind kind) {
    std::string label = kind == EvidenceKind::path_based ? "Path-based Evidence"
                                                         : "Neighbor-based Evidence";
    std::ostringstream out;
    for (std::size_t i = 0; i < routes.size(); ++i) {
        out << label << ' ' << (i + 1) << ": " << routes[i].text << '\n';
    }
    return out.str();
}

std::string build_aggregation_prompt(const std::vector<EvidenceRoute>& routes,
                                     EvidenceKind kind, const AggregationTemplates& templates) {
    if (routes.empty()) {
        throw ContractViolation("build_aggregation_prompt: routes must be nonempty");
    }
    const std::string& instruction = kind == EvidenceKind::path_based
                                         ? templates.path_instruction
                                         : templates.neighbor_instruction;
    return replace_placeholder(instruction, "{evidence}", numbered_evidence_block(routes, kind));
}

ReasoningGraph aggregate(LlmClient& llm, const EvidenceGraphs& evidence,
                         const KnowledgeGraph& g, const AggregationTemplates& templates,
                         const CompletionParams& params) {
    ReasoningGraph rg;
    for (std::size_t i = 0; i < evidence.path_subgraphs.size(); ++i) {
        rg.path_routes.push_back(serialize_subgraph(evidence.path_subgraphs[i], g, i));
    }
    for (std::size_t i = 0; i < evidence.neighbor_subgraphs.size(); ++i) {
        rg.neighbor_routes.push_back(serialize_subgraph(evidence.neighbor_subgraphs[i], g, i));
    }

    auto consolidate = [&](const std::vector<EvidenceRoute>& routes, EvidenceKind kind) {
        std::string prompt = build_aggregation_prompt(routes, kind, templates);
        std::string reply = llm.complete({{Role::user, prompt}}, params);
        if (reply.empty()) {
            throw ParseError("empty aggregation reply for " + evidence_kind_name(kind), reply);
        }
        return reply;
    };

    if (!rg.path_routes.empty()) {
        rg.path_text = consolidate(rg.path_routes, EvidenceKind::path_based);
    }
    if (!rg.neighbor_routes.empty()) {
        rg.neighbor_text = consolidate(rg.neighbor_routes, EvidenceKind::neighbor_based);
    }
    return rg;
}

} // namespace graphmind
