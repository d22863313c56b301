#include "graphmind/reasoner.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "graphmind/errors.hpp"
#include "graphmind/text.hpp"

namespace graphmind {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Templates

namespace {

std::string read_template_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("missing template file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

std::string fill_placeholder(std::string text, const std::string& placeholder,
                             const std::string& value) {
    std::size_t pos = text.find(placeholder);
    while (pos != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos = text.find(placeholder, pos + value.size());
    }
    return text;
}

} // namespace

PromptTemplates PromptTemplates::load(const std::string& profile_dir) {
    PromptTemplates t;
    t.system_instruction = read_template_file(profile_dir + "/system.txt");
    t.question_frame = read_template_file(profile_dir + "/question.txt");
    t.evidence_preamble = read_template_file(profile_dir + "/evidence_preamble.txt");
    t.no_evidence_marker = read_template_file(profile_dir + "/no_evidence.txt");
    t.got_instruction = read_template_file(profile_dir + "/instruction.txt");
    t.sample = read_template_file(profile_dir + "/sample.txt");
    t.aggregation.path_instruction = read_template_file(profile_dir + "/aggregate_path.txt");
    t.aggregation.neighbor_instruction =
        read_template_file(profile_dir + "/aggregate_neighbor.txt");
    return t;
}

PromptBundle build_final_prompt(const std::string& question, const ReasoningGraph& rg,
                                const PromptTemplates& templates, bool include_p1) {
    PromptBundle bundle;
    bundle.system_instruction = templates.system_instruction;
    bundle.question = fill_placeholder(templates.question_frame, "{question}", question);
    bundle.got_instruction = templates.got_instruction;
    bundle.exemplars = templates.sample;

    if (rg.empty()) {
        bundle.evidence_block = templates.no_evidence_marker;
        return bundle;
    }

    std::string block;
    if (include_p1 && !templates.evidence_preamble.empty()) {
        block += templates.evidence_preamble + "\n\n";
    }
    bool first = true;
    auto add_section = [&](const char* title, const std::vector<EvidenceRoute>& routes,
                           EvidenceKind kind, const std::string& consolidated) {
        if (routes.empty()) return;
        if (!first) block += "\n";
        first = false;
        block += std::string("### ") + title + ":\n";
        block += numbered_evidence_block(routes, kind);
        if (!consolidated.empty()) block += consolidated + "\n";
    };
    add_section("Path-based Evidence", rg.path_routes, EvidenceKind::path_based, rg.path_text);
    add_section("Neighbor-based Evidence", rg.neighbor_routes, EvidenceKind::neighbor_based,
                rg.neighbor_text);
    bundle.evidence_block = block;
    return bundle;
}

std::vector<ChatMessage> to_messages(const PromptBundle& bundle) {
    return {
        {Role::system, bundle.system_instruction},
        {Role::user, bundle.question},
        {Role::assistant, bundle.evidence_block},
        {Role::user, bundle.got_instruction + "\n\n" + bundle.exemplars},
    };
}

// ---------------------------------------------------------------------------
// Answer parsing

namespace {

bool ieq(char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) ==
           std::tolower(static_cast<unsigned char>(b));
}

bool match_ci(std::string_view text, std::size_t pos, std::string_view keyword) {
    if (pos + keyword.size() > text.size()) return false;
    for (std::size_t i = 0; i < keyword.size(); ++i) {
        if (!ieq(text[pos + i], keyword[i])) return false;
    }
    return true;
}

void skip_ws(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
}

struct SectionMarker {
    std::size_t begin = 0;  // marker start
    std::size_t end = 0;    // content start
    bool found = false;
};

// Tolerated marker shapes: optional **, "Output" in any case, optional
// spaces, the digit, optional **, optional ':' or '.'.
std::array<SectionMarker, 3> find_markers(std::string_view text) {
    std::array<SectionMarker, 3> markers{};
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!match_ci(text, i, "output")) continue;
        if (i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1]))) continue;
        std::size_t begin = i;
        if (begin >= 2 && text[begin - 1] == '*' && text[begin - 2] == '*') begin -= 2;
        std::size_t j = i + 6;
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
        if (j >= text.size() || text[j] < '1' || text[j] > '3') continue;
        int number = text[j] - '1';
        ++j;
        if (j + 1 < text.size() && text[j] == '*' && text[j + 1] == '*') j += 2;
        if (j < text.size() && (text[j] == ':' || text[j] == '.')) ++j;
        if (!markers[static_cast<std::size_t>(number)].found) {
            markers[static_cast<std::size_t>(number)] =
                SectionMarker{begin, j, true};
        }
    }
    return markers;
}

std::string trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

// Parses "<int>" at pos; false when no digits are present.
bool parse_int(std::string_view text, std::size_t& pos, int& value) {
    skip_ws(text, pos);
    std::size_t start = pos;
    long acc = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        acc = acc * 10 + (text[pos] - '0');
        if (acc > 1000000) acc = 1000000;
        ++pos;
    }
    if (pos == start) return false;
    value = static_cast<int>(acc);
    return true;
}

// Parses 'tok'->'tok'->... ; false when not even one quoted token is present.
bool parse_quoted_chain(std::string_view text, std::size_t& pos,
                        std::vector<std::string>& chain) {
    for (;;) {
        skip_ws(text, pos);
        if (pos >= text.size() || text[pos] != '\'') break;
        ++pos;
        std::size_t close = text.find('\'', pos);
        if (close == std::string_view::npos) return false;
        chain.emplace_back(text.substr(pos, close - pos));
        pos = close + 1;
        std::size_t save = pos;
        skip_ws(text, pos);
        if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
            pos += 2;
            continue;
        }
        pos = save;
        break;
    }
    return !chain.empty();
}

// The paper's own format string spells it "Neighor"; both spellings parse.
const std::array<std::pair<std::string_view, EvidenceKind>, 3> kEvidenceKeywords = {{
    {"Path-based Evidence", EvidenceKind::path_based},
    {"Neighbor-based Evidence", EvidenceKind::neighbor_based},
    {"Neighor-based Evidence", EvidenceKind::neighbor_based},
}};

std::vector<InferenceStep> parse_inference_steps(std::string_view text,
                                                 std::vector<std::string>& warnings) {
    std::vector<InferenceStep> steps;
    std::size_t pos = 0;
    std::size_t malformed = 0;
    while (pos < text.size()) {
        std::optional<EvidenceKind> kind;
        bool is_result = false;
        std::size_t body = pos;
        for (const auto& [keyword, k] : kEvidenceKeywords) {
            if (match_ci(text, pos, keyword)) {
                kind = k;
                body = pos + keyword.size();
                break;
            }
        }
        if (!kind && match_ci(text, pos, "result") &&
            (pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1])))) {
            is_result = true;
            body = pos + 6;
        }
        if (!kind && !is_result) {
            ++pos;
            continue;
        }

        std::size_t cursor = body;
        int number = 0;
        InferenceStep step;
        bool ok = parse_int(text, cursor, number);
        if (ok) {
            skip_ws(text, cursor);
            ok = cursor < text.size() && text[cursor] == '(';
        }
        if (ok) {
            ++cursor;
            ok = parse_quoted_chain(text, cursor, step.chain);
        }
        if (ok) {
            skip_ws(text, cursor);
            ok = cursor < text.size() && text[cursor] == ')';
        }
        if (!ok) {
            ++malformed;
            pos = body;
            continue;
        }
        ++cursor;
        if (is_result) {
            step.is_result = true;
            step.result_number = number;
        } else {
            step.evidence_ref = EvidenceRef{*kind, number};
        }
        steps.push_back(std::move(step));
        pos = cursor;
    }
    if (malformed > 0) {
        warnings.push_back("inference process: skipped " + std::to_string(malformed) +
                           " malformed step(s)");
    }
    return steps;
}

std::optional<EvidenceRef> parse_attribution(std::string_view text) {
    std::size_t pos = 0;
    skip_ws(text, pos);
    for (const auto& [keyword, kind] : kEvidenceKeywords) {
        if (match_ci(text, pos, keyword)) {
            std::size_t cursor = pos + keyword.size();
            int number = 0;
            if (parse_int(text, cursor, number)) {
                return EvidenceRef{kind, number};
            }
        }
    }
    return std::nullopt;
}

MindMapTree parse_tree(std::string_view text, std::vector<std::string>& warnings) {
    MindMapTree tree;
    std::vector<int> last_at_depth;

    auto add_node = [&](TreeNode node) {
        int idx = static_cast<int>(tree.nodes.size());
        if (node.depth > 0) {
            std::size_t parent_depth = static_cast<std::size_t>(node.depth - 1);
            if (parent_depth < last_at_depth.size() && last_at_depth[parent_depth] >= 0) {
                tree.edges.emplace_back(last_at_depth[parent_depth], idx);
            }
        }
        if (last_at_depth.size() <= static_cast<std::size_t>(node.depth)) {
            last_at_depth.resize(static_cast<std::size_t>(node.depth) + 1, -1);
        }
        last_at_depth[static_cast<std::size_t>(node.depth)] = idx;
        tree.nodes.push_back(std::move(node));
    };

    std::size_t line_start = 0;
    bool had_content = false;
    while (line_start <= text.size()) {
        std::size_t line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        std::string_view line = text.substr(line_start, line_end - line_start);
        line_start = line_end + 1;
        if (trim(line).empty()) {
            if (line_end == text.size()) break;
            continue;
        }
        had_content = true;

        // Indent: two spaces or one tab per level.
        std::size_t pos = 0;
        int spaces = 0;
        int depth = 0;
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) {
            if (line[pos] == '\t') {
                ++depth;
                spaces = 0;
            } else if (++spaces == 2) {
                ++depth;
                spaces = 0;
            }
            ++pos;
        }
        // Arrow / bullet decorations carry no extra depth.
        for (;;) {
            skip_ws(line, pos);
            if (pos + 1 < line.size() && line[pos] == '-' && line[pos + 1] == '>') {
                pos += 2;
            } else if (pos < line.size() && (line[pos] == '-' || line[pos] == '*')) {
                ++pos;
            } else {
                break;
            }
        }

        int node_depth = depth;
        for (;;) {
            skip_ws(line, pos);
            if (pos >= line.size() || line[pos] != '\'') break;
            ++pos;
            std::size_t close = line.find('\'', pos);
            if (close == std::string_view::npos) break;
            TreeNode node;
            node.label = std::string(line.substr(pos, close - pos));
            node.depth = node_depth;
            pos = close + 1;
            skip_ws(line, pos);
            if (pos < line.size() && line[pos] == '(') {
                std::size_t close_paren = line.find(')', pos);
                if (close_paren != std::string_view::npos) {
                    node.evidence = parse_attribution(line.substr(pos + 1, close_paren - pos - 1));
                    pos = close_paren + 1;
                }
            }
            add_node(std::move(node));
            skip_ws(line, pos);
            if (pos + 1 < line.size() && line[pos] == '-' && line[pos + 1] == '>') {
                pos += 2;
                ++node_depth;
                continue;
            }
            break;
        }
        if (line_end == text.size()) break;
    }
    if (had_content && tree.nodes.empty()) {
        warnings.push_back("decision tree: no nodes recognized");
    }
    return tree;
}

} // namespace

MindMapAnswer parse_answer(const std::string& raw) {
    MindMapAnswer answer;
    answer.raw = raw;

    auto markers = find_markers(raw);
    if (!markers[0].found && !markers[1].found && !markers[2].found) {
        throw ParseError("answer contains none of the Output1/Output2/Output3 markers", raw);
    }

    auto section_text = [&](int n) -> std::string {
        const SectionMarker& m = markers[static_cast<std::size_t>(n)];
        if (!m.found) return {};
        std::size_t end = raw.size();
        for (const SectionMarker& other : markers) {
            if (other.found && other.begin > m.begin) end = std::min(end, other.begin);
        }
        return trim(std::string_view(raw).substr(m.end, end - m.end));
    };

    answer.summary = section_text(0);
    if (!markers[0].found) answer.warnings.push_back("missing Output1 section");

    std::string steps_text = section_text(1);
    if (markers[1].found) {
        answer.steps = parse_inference_steps(steps_text, answer.warnings);
        if (answer.steps.empty() && !steps_text.empty()) {
            answer.warnings.push_back("inference process: no steps recognized");
        }
    } else {
        answer.warnings.push_back("missing Output2 section");
    }

    std::string tree_text = section_text(2);
    if (markers[2].found) {
        answer.tree = parse_tree(tree_text, answer.warnings);
    } else {
        answer.warnings.push_back("missing Output3 section");
    }
    return answer;
}

namespace {

std::string render_evidence_ref(const EvidenceRef& ref) {
    std::string kind = ref.kind == EvidenceKind::path_based ? "Path-based Evidence"
                                                            : "Neighbor-based Evidence";
    return kind + " " + std::to_string(ref.number);
}

std::string render_step(const InferenceStep& step) {
    std::string out;
    if (step.is_result) {
        out = "result " + std::to_string(step.result_number);
    } else if (step.evidence_ref) {
        out = render_evidence_ref(*step.evidence_ref);
    }
    out += "(";
    for (std::size_t i = 0; i < step.chain.size(); ++i) {
        if (i > 0) out += "->";
        out += "'" + step.chain[i] + "'";
    }
    out += ")";
    return out;
}

} // namespace

std::string serialize_answer(const MindMapAnswer& answer) {
    std::ostringstream out;
    out << "Output1: " << answer.summary << "\n\n";
    out << "Output2: ";
    for (std::size_t i = 0; i < answer.steps.size(); ++i) {
        if (i > 0) out << "->";
        out << render_step(answer.steps[i]);
    }
    out << "\n\nOutput3:\n";
    for (const TreeNode& node : answer.tree.nodes) {
        for (int d = 0; d < node.depth; ++d) out << "  ";
        if (node.depth > 0) out << "-> ";
        out << "'" << node.label << "'";
        if (node.evidence) out << "(" << render_evidence_ref(*node.evidence) << ")";
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Grounding and DOT

GroundingReport ground(const MindMapAnswer& answer, const ReasoningGraph& rg) {
    struct RouteKeys {
        EvidenceRef ref;
        std::unordered_set<std::string> keys;
    };
    std::vector<RouteKeys> haystack;
    auto add_routes = [&](const std::vector<EvidenceRoute>& routes, EvidenceKind kind) {
        for (std::size_t i = 0; i < routes.size(); ++i) {
            RouteKeys rk;
            rk.ref = EvidenceRef{kind, static_cast<int>(i + 1)};
            for (const RouteHop& hop : routes[i].structured) {
                for (const std::string& s : hop.sources) rk.keys.insert(link_key(s));
                rk.keys.insert(link_key(hop.relation));
                rk.keys.insert(link_key(hop.target));
            }
            haystack.push_back(std::move(rk));
        }
    };
    add_routes(rg.path_routes, EvidenceKind::path_based);
    add_routes(rg.neighbor_routes, EvidenceKind::neighbor_based);

    GroundingReport report;
    for (const TreeNode& node : answer.tree.nodes) {
        if (report.grounded.count(node.label) || report.augmented.count(node.label)) continue;
        std::string key = link_key(node.label);
        bool found = false;
        if (!key.empty()) {
            for (const RouteKeys& rk : haystack) {
                if (rk.keys.count(key)) {
                    report.grounded.emplace(node.label, rk.ref);
                    found = true;
                    break;
                }
            }
        }
        if (!found) report.augmented.insert(node.label);
    }
    return report;
}

namespace {

std::string dot_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string emit_dot(const MindMapAnswer& answer, const GroundingReport& report) {
    std::ostringstream out;
    out << "digraph mindmap {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box];\n";
    for (std::size_t i = 0; i < answer.tree.nodes.size(); ++i) {
        const TreeNode& node = answer.tree.nodes[i];
        out << "  n" << i << " [label=\"" << dot_escape(node.label) << "\"";
        auto it = report.grounded.find(node.label);
        if (it != report.grounded.end()) {
            out << ", tooltip=\"" << dot_escape(render_evidence_ref(it->second)) << "\"";
        } else {
            out << ", style=dashed, tooltip=\"LLM-augmented\"";
        }
        out << "];\n";
    }
    for (const auto& [parent, child] : answer.tree.edges) {
        out << "  n" << parent << " -> n" << child << ";\n";
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// End-to-end pipeline

namespace {

template <typename F>
auto run_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.category(), std::string(stage) + ": " + e.what());
    }
}

} // namespace

AnswerOutcome answer_question(LlmClient& llm, const KnowledgeGraph& g,
                              const std::string& question, const PromptTemplates& templates,
                              const std::vector<Exemplar>& exemplars, const Embedder& embedder,
                              const PipelineConfig& cfg) {
    AnswerOutcome outcome;
    std::vector<std::string> pipeline_warnings;

    // Step I: recognition, linking, exploration.
    std::vector<EntityMention> mentions;
    try {
        mentions = extract_entities(llm, question, exemplars, cfg.completion);
    } catch (const ParseError& e) {
        pipeline_warnings.push_back(std::string("entity extraction: ") + e.what() +
                                    "; answering without external evidence");
    }

    std::vector<EntityId> vq;
    if (!mentions.empty()) {
        auto linked = run_stage("entity linking",
                                [&] { return link(mentions, g, embedder, cfg.min_similarity); });
        for (const LinkedEntity& le : linked) vq.push_back(le.entity);
    }

    run_stage("exploration", [&] {
        auto path_result = explore_path_based(g, vq, cfg.explore);
        auto neighbor_subgraphs =
            explore_neighbor_based(g, vq, embedder(question), embedder, cfg.explore);
        outcome.evidence = merge(prune(path_result.subgraphs, cfg.explore),
                                 prune(neighbor_subgraphs, cfg.explore),
                                 std::move(path_result.augmented_entities));
        return 0;
    });

    // Step II: aggregation into the reasoning graph.
    outcome.reasoning = run_stage("aggregation", [&] {
        return aggregate(llm, outcome.evidence, g, templates.aggregation, cfg.completion);
    });
    outcome.evidence_free = outcome.reasoning.empty();

    // Step III: final prompt, parse, ground.
    PromptBundle bundle =
        build_final_prompt(question, outcome.reasoning, templates, cfg.include_p1);
    std::string raw = run_stage("reasoning", [&] {
        return llm.complete(to_messages(bundle), cfg.completion);
    });
    outcome.answer = run_stage("answer parsing", [&] { return parse_answer(raw); });
    outcome.grounding = ground(outcome.answer, outcome.reasoning);

    outcome.answer.warnings.insert(outcome.answer.warnings.begin(), pipeline_warnings.begin(),
                                   pipeline_warnings.end());
    return outcome;
}

std::string outcome_to_json(const AnswerOutcome& outcome, const KnowledgeGraph& g) {
    ordered_json doc;
    doc["summary"] = outcome.answer.summary;

    ordered_json steps = ordered_json::array();
    for (const InferenceStep& step : outcome.answer.steps) {
        ordered_json s;
        if (step.is_result) {
            s["type"] = "result";
            s["number"] = step.result_number;
        } else {
            s["type"] = "evidence";
            s["kind"] = evidence_kind_name(step.evidence_ref->kind);
            s["number"] = step.evidence_ref->number;
        }
        s["chain"] = step.chain;
        steps.push_back(std::move(s));
    }
    doc["steps"] = std::move(steps);

    ordered_json nodes = ordered_json::array();
    for (const TreeNode& node : outcome.answer.tree.nodes) {
        ordered_json n;
        n["label"] = node.label;
        n["depth"] = node.depth;
        if (node.evidence) {
            n["evidence"] = {{"kind", evidence_kind_name(node.evidence->kind)},
                             {"number", node.evidence->number}};
        } else {
            n["evidence"] = nullptr;
        }
        nodes.push_back(std::move(n));
    }
    ordered_json edges = ordered_json::array();
    for (const auto& [parent, child] : outcome.answer.tree.edges) {
        edges.push_back({parent, child});
    }
    doc["tree"] = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};

    ordered_json grounded = ordered_json::array();
    for (const auto& [label, ref] : outcome.grounding.grounded) {
        grounded.push_back({{"label", label},
                            {"kind", evidence_kind_name(ref.kind)},
                            {"number", ref.number}});
    }
    ordered_json augmented = ordered_json::array();
    for (const std::string& label : outcome.grounding.augmented) augmented.push_back(label);
    doc["grounding"] = {{"grounded", std::move(grounded)}, {"augmented", std::move(augmented)}};

    doc["warnings"] = outcome.answer.warnings;
    doc["evidence_free"] = outcome.evidence_free;
    doc["evidence"] = ordered_json::parse(evidence_to_json(outcome.evidence, g));
    return doc.dump(2) + "\n";
}

} // namespace graphmind
