#include "graphmind/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphmind/aggregator.hpp"
#include "graphmind/errors.hpp"
#include "graphmind/text.hpp"

namespace graphmind {

Document Document::make(std::string id, std::string text) {
    Document doc;
    doc.id = std::move(id);
    doc.text = std::move(text);
    for (const std::string& token : tokenize(doc.text)) {
        ++doc.term_counts[token];
        ++doc.length;
    }
    return doc;
}

Corpus Corpus::build(std::vector<Document> documents) {
    Corpus corpus;
    corpus.documents = std::move(documents);
    std::size_t total_length = 0;
    for (const Document& doc : corpus.documents) {
        total_length += doc.length;
        for (const auto& [term, count] : doc.term_counts) {
            ++corpus.document_frequencies[term];
        }
    }
    corpus.avg_doc_length =
        corpus.documents.empty()
            ? 0.0
            : static_cast<double>(total_length) / static_cast<double>(corpus.documents.size());
    return corpus;
}

Corpus load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputDataError("cannot open corpus file: " + path);
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
            !obj.contains("text") || !obj["id"].is_string() || !obj["text"].is_string()) {
            throw InputDataError("bad corpus record at line " + std::to_string(line_no) + " in " +
                                 path);
        }
        docs.push_back(Document::make(obj["id"].get<std::string>(), obj["text"].get<std::string>()));
    }
    return Corpus::build(std::move(docs));
}

void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write corpus file: " + path);
    for (const Document& doc : corpus.documents) {
        nlohmann::ordered_json obj;
        obj["id"] = doc.id;
        obj["text"] = doc.text;
        out << obj.dump() << '\n';
    }
}

Corpus corpus_from_kg(const KnowledgeGraph& g) {
    std::vector<Document> docs;
    for (EntityId v = 0; v < g.entity_count(); ++v) {
        std::vector<Triple> outgoing = g.neighbors(v, Direction::out);
        if (outgoing.empty()) continue;
        std::ostringstream text;
        for (std::size_t i = 0; i < outgoing.size(); ++i) {
            const Triple& t = outgoing[i];
            if (i > 0) text << ". ";
            text << g.entity_label(t.head) << " - " << g.relation_label(t.relation) << " - "
                 << g.entity_label(t.tail);
        }
        text << ".";
        docs.push_back(Document::make(g.entity_label(v), text.str()));
    }
    return Corpus::build(std::move(docs));
}

double bm25_score(const Corpus& corpus, const std::vector<std::string>& query_terms,
                  const Document& doc, const BM25Params& params) {
    const double n_docs = static_cast<double>(corpus.documents.size());
    const double avgdl = corpus.avg_doc_length;
    double score = 0.0;
    for (const std::string& term : query_terms) {
        auto tf_it = doc.term_counts.find(term);
        if (tf_it == doc.term_counts.end()) continue;
        double tf = static_cast<double>(tf_it->second);
        auto df_it = corpus.document_frequencies.find(term);
        double df = df_it == corpus.document_frequencies.end()
                        ? 0.0
                        : static_cast<double>(df_it->second);
        double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        double len_norm =
            1.0 - params.b + params.b * static_cast<double>(doc.length) / (avgdl > 0 ? avgdl : 1.0);
        score += idf * (tf * (params.k1 + 1.0)) / (tf + params.k1 * len_norm);
    }
    return score;
}

namespace {

std::vector<std::string> rank_by_score(const Corpus& corpus, std::vector<double> scores,
                                       std::size_t top_k) {
    std::vector<std::size_t> order(corpus.documents.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return corpus.documents[a].id < corpus.documents[b].id;
    });
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < order.size() && i < top_k; ++i) {
        ids.push_back(corpus.documents[order[i]].id);
    }
    return ids;
}

} // namespace

std::vector<std::string> retrieve_bm25(const Corpus& corpus, const std::string& query,
                                       std::size_t top_k, const BM25Params& params) {
    if (top_k < 1) throw ContractViolation("retrieve_bm25: top_k must be >= 1");
    std::vector<std::string> terms = tokenize(query);
    std::vector<double> scores;
    scores.reserve(corpus.documents.size());
    for (const Document& doc : corpus.documents) {
        scores.push_back(bm25_score(corpus, terms, doc, params));
    }
    return rank_by_score(corpus, std::move(scores), top_k);
}

std::vector<std::string> retrieve_embedding(const Corpus& corpus, const std::string& query,
                                            const Embedder& embedder, std::size_t top_k) {
    if (top_k < 1) throw ContractViolation("retrieve_embedding: top_k must be >= 1");
    Embedding query_vec = embedder(query);
    std::vector<double> scores;
    scores.reserve(corpus.documents.size());
    for (const Document& doc : corpus.documents) {
        scores.push_back(cosine(query_vec, embedder(doc.text)));
    }
    return rank_by_score(corpus, std::move(scores), top_k);
}

std::vector<std::string> document_texts(const Corpus& corpus,
                                        const std::vector<std::string>& ids) {
    std::vector<std::string> texts;
    for (const std::string& id : ids) {
        for (const Document& doc : corpus.documents) {
            if (doc.id == id) {
                texts.push_back(doc.text);
                break;
            }
        }
    }
    return texts;
}

std::vector<std::string> kg_retrieve_paths(const KnowledgeGraph& g,
                                           const std::vector<EntityId>& vq) {
    std::vector<std::string> routes;
    std::size_t unbounded = std::max<std::size_t>(g.entity_count(), 1);
    for (std::size_t i = 0; i < vq.size(); ++i) {
        for (std::size_t j = i + 1; j < vq.size(); ++j) {
            auto path = g.bfs_within_k(vq[i], {vq[j]}, unbounded);
            if (!path || path->triples.empty()) continue;
            EvidenceSubgraph sg =
                EvidenceSubgraph::make(EvidenceKind::path_based, vq[i], path->triples);
            routes.push_back(serialize_subgraph(sg, g, 0).text);
        }
    }
    return routes;
}

std::string build_retrieval_prompt(const std::string& question,
                                   const std::vector<std::string>& contexts,
                                   const std::string& answer_directive) {
    std::ostringstream out;
    out << "Question: " << question << "\n\n";
    if (contexts.empty()) {
        out << "No retrieved context is available.\n";
    } else {
        out << "Retrieved context:\n";
        for (std::size_t i = 0; i < contexts.size(); ++i) {
            out << "Context " << (i + 1) << ": " << contexts[i] << '\n';
        }
    }
    out << '\n' << answer_directive;
    return out.str();
}

} // namespace graphmind
