#include "graphmind/linker.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "graphmind/errors.hpp"
#include "graphmind/text.hpp"

namespace graphmind {

std::vector<Exemplar> load_exemplars(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open exemplar file: " + path);
    std::vector<Exemplar> exemplars;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("question") ||
            !obj.contains("entities") || !obj["entities"].is_array() ||
            obj["entities"].empty()) {
            throw InputDataError("bad exemplar at line " + std::to_string(line_no) + " in " + path);
        }
        Exemplar ex;
        ex.question = obj["question"].get<std::string>();
        for (const auto& e : obj["entities"]) ex.entities.push_back(e.get<std::string>());
        exemplars.push_back(std::move(ex));
    }
    return exemplars;
}

std::string build_extraction_prompt(const std::string& question,
                                    const std::vector<Exemplar>& exemplars) {
    std::ostringstream out;
    out << "Extract the key medical entities mentioned in the question. "
           "Reply with the entity names only, separated by commas.\n\n";
    for (const Exemplar& ex : exemplars) {
        out << "Question: " << ex.question << "\nEntities: ";
        for (std::size_t i = 0; i < ex.entities.size(); ++i) {
            if (i > 0) out << ", ";
            out << ex.entities[i];
        }
        out << "\n\n";
    }
    out << "Question: " << question << "\nEntities:";
    return out.str();
}

namespace {

std::string strip_decoration(std::string item) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    item.erase(item.begin(), std::find_if(item.begin(), item.end(), not_space));
    item.erase(std::find_if(item.rbegin(), item.rend(), not_space).base(), item.end());

    // Leading bullets / numbering: "- x", "* x", "3. x", "2) x".
    std::size_t pos = 0;
    while (pos < item.size() && (item[pos] == '-' || item[pos] == '*' || item[pos] == '+')) ++pos;
    std::size_t digits = pos;
    while (digits < item.size() && std::isdigit(static_cast<unsigned char>(item[digits]))) ++digits;
    if (digits > pos && digits < item.size() && (item[digits] == '.' || item[digits] == ')')) {
        pos = digits + 1;
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    item.erase(0, pos);

    // Surrounding quotes.
    if (item.size() >= 2) {
        char f = item.front();
        char b = item.back();
        if ((f == '"' && b == '"') || (f == '\'' && b == '\'')) {
            item = item.substr(1, item.size() - 2);
        }
    }
    return item;
}

std::optional<std::pair<std::size_t, std::size_t>> find_span(const std::string& question,
                                                             const std::string& surface) {
    std::size_t pos = question.find(surface);
    if (pos == std::string::npos) return std::nullopt;
    return std::make_pair(pos, pos + surface.size());
}

} // namespace

std::vector<EntityMention> parse_entity_list(const std::string& reply,
                                             const std::string& question) {
    std::vector<EntityMention> mentions;
    std::unordered_set<std::string> seen;

    std::string current;
    auto flush = [&] {
        std::string surface = strip_decoration(current);
        current.clear();
        if (surface.empty()) return;
        std::string key = normalize_text(surface);
        if (key.empty() || !seen.insert(key).second) return;
        mentions.push_back({surface, find_span(question, surface)});
    };
    for (char c : reply) {
        if (c == ',' || c == '\n' || c == ';') {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();

    if (mentions.empty()) {
        throw ParseError("entity extraction reply contained no entities", reply);
    }
    return mentions;
}

std::vector<EntityMention> extract_entities(LlmClient& llm, const std::string& question,
                                            const std::vector<Exemplar>& exemplars,
                                            const CompletionParams& params) {
    if (exemplars.empty()) throw ContractViolation("extract_entities: exemplars required");
    std::vector<ChatMessage> messages{
        {Role::user, build_extraction_prompt(question, exemplars)}};
    std::string reply = llm.complete(messages, params);
    return parse_entity_list(reply, question);
}

std::vector<LinkedEntity> link(const std::vector<EntityMention>& mentions,
                               const KnowledgeGraph& g, const Embedder& embedder,
                               double min_similarity) {
    if (g.entity_count() == 0) throw ContractViolation("link: empty graph");

    // Entity embeddings are computed lazily; the exact-match fast path often
    // skips most of them.
    std::vector<Embedding> entity_vecs(g.entity_count());
    std::vector<bool> have_vec(g.entity_count(), false);
    auto vec_of = [&](EntityId id) -> const Embedding& {
        if (!have_vec[id]) {
            entity_vecs[id] = embedder(g.entity_label(id));
            have_vec[id] = true;
        }
        return entity_vecs[id];
    };

    std::map<EntityId, LinkedEntity> by_entity;
    for (const EntityMention& mention : mentions) {
        EntityId best_id = 0;
        double best_sim = 0.0;
        if (auto exact = g.find_entity(mention.surface)) {
            best_id = *exact;
            best_sim = 1.0;
        } else {
            Embedding mention_vec = embedder(mention.surface);
            bool first = true;
            for (EntityId id = 0; id < g.entity_count(); ++id) {
                double sim = cosine(mention_vec, vec_of(id));
                // Strictly-greater keeps the smallest id on ties.
                if (first || sim > best_sim) {
                    best_sim = sim;
                    best_id = id;
                    first = false;
                }
            }
        }
        if (min_similarity > 0.0 && best_sim < min_similarity) continue;
        auto it = by_entity.find(best_id);
        if (it == by_entity.end() || best_sim > it->second.similarity) {
            by_entity[best_id] = LinkedEntity{mention, best_id, best_sim};
        }
    }

    // Rebuild in first-mention order so downstream exploration sees the
    // question's own ordering, not id order.
    std::vector<LinkedEntity> result;
    std::unordered_set<EntityId> emitted;
    for (const EntityMention& mention : mentions) {
        for (const auto& [id, linked] : by_entity) {
            if (emitted.count(id)) continue;
            if (linked.mention.surface == mention.surface) {
                result.push_back(linked);
                emitted.insert(id);
            }
        }
    }
    // Any survivors whose winning mention was superseded keep map order.
    for (const auto& [id, linked] : by_entity) {
        if (!emitted.count(id)) {
            result.push_back(linked);
            emitted.insert(id);
        }
    }
    return result;
}

} // namespace graphmind
