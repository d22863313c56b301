#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphmind/aggregator.hpp"
#include "graphmind/explorer.hpp"
#include "graphmind/kg.hpp"
#include "graphmind/linker.hpp"
#include "graphmind/llm.hpp"

namespace graphmind {

// Prompt pieces loaded from a profile directory of editable text files.
struct PromptTemplates {
    std::string system_instruction;   // system.txt
    std::string question_frame;       // question.txt, contains {question}
    std::string evidence_preamble;    // evidence_preamble.txt (the p1 sentence)
    std::string no_evidence_marker;   // no_evidence.txt
    std::string got_instruction;      // instruction.txt (three-output directive)
    std::string sample;               // sample.txt (answer-format exemplar)
    AggregationTemplates aggregation; // aggregate_path.txt / aggregate_neighbor.txt

    static PromptTemplates load(const std::string& profile_dir);
};

// The five-part final prompt.
struct PromptBundle {
    std::string system_instruction;
    std::string question;
    std::string evidence_block;
    std::string got_instruction;
    std::string exemplars;
};

PromptBundle build_final_prompt(const std::string& question, const ReasoningGraph& rg,
                                const PromptTemplates& templates, bool include_p1 = true);

// Chat layout: system instruction; the framed question; the evidence block as
// prior assistant context; the reasoning directive plus sample.
std::vector<ChatMessage> to_messages(const PromptBundle& bundle);

struct EvidenceRef {
    EvidenceKind kind;
    int number = 0;  // 1-based evidence / route number

    friend bool operator==(const EvidenceRef&, const EvidenceRef&) = default;
};

struct InferenceStep {
    std::optional<EvidenceRef> evidence_ref;  // absent on result steps
    bool is_result = false;
    int result_number = 0;
    std::vector<std::string> chain;  // quoted node/relation tokens in order

    friend bool operator==(const InferenceStep&, const InferenceStep&) = default;
};

struct TreeNode {
    std::string label;
    std::optional<EvidenceRef> evidence;
    int depth = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct MindMapTree {
    std::vector<TreeNode> nodes;
    std::vector<std::pair<int, int>> edges;  // parent index -> child index

    friend bool operator==(const MindMapTree&, const MindMapTree&) = default;
};

struct MindMapAnswer {
    std::string summary;               // Output1
    std::vector<InferenceStep> steps;  // Output2
    MindMapTree tree;                  // Output3
    std::string raw;
    std::vector<std::string> warnings;
};

// Splits on the Output1/2/3 markers (tolerant of "Output 1:" spacing and
// case), then parses the inference-chain grammar and the indented/arrowed
// decision tree. Unparseable sections are kept raw with a warning; a reply
// with none of the three markers is a ParseError.
MindMapAnswer parse_answer(const std::string& raw);

// Canonical re-rendering of a parsed answer in the same three-output format.
std::string serialize_answer(const MindMapAnswer& answer);

struct GroundingReport {
    std::map<std::string, EvidenceRef> grounded;  // tree node label -> route
    std::set<std::string> augmented;              // nodes absent from all routes
};

// Partitions tree node labels into grounded (found in some structured route,
// path routes searched first) and augmented (knowledge the model added).
GroundingReport ground(const MindMapAnswer& answer, const ReasoningGraph& rg);

// DOT digraph; grounded nodes solid with an evidence tooltip, augmented nodes
// dashed. Deterministic node ordering.
std::string emit_dot(const MindMapAnswer& answer, const GroundingReport& report);

struct PipelineConfig {
    ExplorationConfig explore;
    CompletionParams completion;
    bool include_p1 = true;
    double min_similarity = 0.0;  // 0 = paper-faithful (always link)
};

struct AnswerOutcome {
    MindMapAnswer answer;
    GroundingReport grounding;
    EvidenceGraphs evidence;
    ReasoningGraph reasoning;
    bool evidence_free = false;  // no mentions linked; no-evidence prompt path
};

// Steps I-III end to end. Deterministic under a replay client and fixed seed.
AnswerOutcome answer_question(LlmClient& llm, const KnowledgeGraph& g,
                              const std::string& question, const PromptTemplates& templates,
                              const std::vector<Exemplar>& exemplars, const Embedder& embedder,
                              const PipelineConfig& cfg);

// Stable JSON export of the full outcome (answer, grounding, evidence).
std::string outcome_to_json(const AnswerOutcome& outcome, const KnowledgeGraph& g);

} // namespace graphmind
