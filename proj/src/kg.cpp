#include "graphmind/kg.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "graphmind/errors.hpp"
#include "graphmind/text.hpp"

namespace graphmind {

namespace {

constexpr std::int32_t kUnreached = -1;

std::uint64_t triple_fingerprint(const Triple& t) {
    // 96 bits of id folded through FNV; collisions would only cause a triple
    // to be dropped as a duplicate, and the id space here is dense and small.
    char buf[12];
    std::uint32_t parts[3] = {t.head, t.relation, t.tail};
    std::memcpy(buf, parts, sizeof(buf));
    return fnv1a64(std::string_view(buf, sizeof(buf)));
}

} // namespace

// ---------------------------------------------------------------------------
// LabelTable

std::uint32_t LabelTable::intern(const std::string& label) {
    std::string key = link_key(label);
    auto it = by_key_.find(key);
    if (it != by_key_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(label);
    by_key_.emplace(std::move(key), id);
    return id;
}

std::optional<std::uint32_t> LabelTable::find(const std::string& label) const {
    auto it = by_key_.find(link_key(label));
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// KnowledgeGraphBuilder

EntityId KnowledgeGraphBuilder::intern_entity(const std::string& label) {
    return entities_.intern(label);
}

RelationId KnowledgeGraphBuilder::intern_relation(const std::string& label) {
    return relations_.intern(label);
}

bool KnowledgeGraphBuilder::add_triple(const std::string& head, const std::string& relation,
                                       const std::string& tail) {
    EntityId h = entities_.intern(head);
    RelationId r = relations_.intern(relation);
    EntityId t = entities_.intern(tail);
    return add_triple(h, r, t);
}

bool KnowledgeGraphBuilder::add_triple(EntityId head, RelationId relation, EntityId tail) {
    if (head >= entities_.size() || tail >= entities_.size() || relation >= relations_.size()) {
        throw ContractViolation("add_triple: id out of range");
    }
    Triple t{head, relation, tail};
    if (!seen_.insert(triple_fingerprint(t)).second) return false;
    triples_.push_back(t);
    return true;
}

KnowledgeGraph KnowledgeGraphBuilder::build() && {
    KnowledgeGraph g;
    g.entities_ = std::move(entities_);
    g.relations_ = std::move(relations_);
    g.triples_ = std::move(triples_);
    g.out_adjacency_.assign(g.entities_.size(), {});
    g.in_adjacency_.assign(g.entities_.size(), {});
    for (std::uint32_t i = 0; i < g.triples_.size(); ++i) {
        g.out_adjacency_[g.triples_[i].head].push_back(i);
        g.in_adjacency_[g.triples_[i].tail].push_back(i);
    }
    return g;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph queries

const std::string& KnowledgeGraph::entity_label(EntityId id) const {
    check_entity(id);
    return entities_.label(id);
}

const std::string& KnowledgeGraph::relation_label(RelationId id) const {
    if (id >= relations_.size()) throw ContractViolation("invalid relation id");
    return relations_.label(id);
}

std::optional<EntityId> KnowledgeGraph::find_entity(const std::string& label) const {
    return entities_.find(label);
}

std::optional<RelationId> KnowledgeGraph::find_relation(const std::string& label) const {
    return relations_.find(label);
}

void KnowledgeGraph::check_entity(EntityId id) const {
    if (id >= entities_.size()) throw ContractViolation("invalid entity id");
}

std::vector<std::uint32_t> KnowledgeGraph::incident_triple_indices(EntityId v,
                                                                   Direction direction) const {
    check_entity(v);
    std::vector<std::uint32_t> indices;
    if (direction == Direction::out || direction == Direction::both) {
        indices.insert(indices.end(), out_adjacency_[v].begin(), out_adjacency_[v].end());
    }
    if (direction == Direction::in || direction == Direction::both) {
        for (std::uint32_t i : in_adjacency_[v]) {
            // A self-loop sits in both lists; report it once.
            if (direction == Direction::both && triples_[i].head == v) continue;
            indices.push_back(i);
        }
    }
    if (direction == Direction::both) std::sort(indices.begin(), indices.end());
    return indices;
}

std::vector<Triple> KnowledgeGraph::neighbors(EntityId v, Direction direction) const {
    std::vector<Triple> result;
    for (std::uint32_t i : incident_triple_indices(v, direction)) {
        result.push_back(triples_[i]);
    }
    return result;
}

const Triple& KnowledgeGraph::connecting_triple(EntityId u, EntityId v) const {
    const Triple* best = nullptr;
    auto consider = [&](const Triple& t) {
        if (best == nullptr ||
            std::tie(t.relation, t.head, t.tail) < std::tie(best->relation, best->head, best->tail)) {
            best = &t;
        }
    };
    for (std::uint32_t i : out_adjacency_[u]) {
        if (triples_[i].tail == v) consider(triples_[i]);
    }
    for (std::uint32_t i : in_adjacency_[u]) {
        if (triples_[i].head == v) consider(triples_[i]);
    }
    if (best == nullptr) throw ContractViolation("no edge between requested entities");
    return *best;
}

std::optional<HopPath> KnowledgeGraph::bfs_within_k(EntityId src,
                                                    const std::vector<EntityId>& targets,
                                                    std::size_t k) const {
    check_entity(src);
    if (targets.empty()) throw ContractViolation("bfs_within_k: empty target set");
    if (k < 1) throw ContractViolation("bfs_within_k: k must be >= 1");
    for (EntityId t : targets) check_entity(t);

    std::vector<bool> is_target(entities_.size(), false);
    for (EntityId t : targets) is_target[t] = true;

    if (is_target[src]) {
        return HopPath{{}, {src, src}};
    }

    auto bfs_distances = [&](EntityId from, std::size_t limit) {
        std::vector<std::int32_t> dist(entities_.size(), kUnreached);
        dist[from] = 0;
        std::deque<EntityId> queue{from};
        while (!queue.empty()) {
            EntityId u = queue.front();
            queue.pop_front();
            auto d = static_cast<std::size_t>(dist[u]);
            if (d == limit) continue;
            for (std::uint32_t i : out_adjacency_[u]) {
                EntityId v = triples_[i].tail;
                if (dist[v] == kUnreached) {
                    dist[v] = static_cast<std::int32_t>(d + 1);
                    queue.push_back(v);
                }
            }
            for (std::uint32_t i : in_adjacency_[u]) {
                EntityId v = triples_[i].head;
                if (dist[v] == kUnreached) {
                    dist[v] = static_cast<std::int32_t>(d + 1);
                    queue.push_back(v);
                }
            }
        }
        return dist;
    };

    std::vector<std::int32_t> dist_src = bfs_distances(src, k);

    EntityId chosen = 0;
    std::int32_t best = std::numeric_limits<std::int32_t>::max();
    bool found = false;
    for (EntityId t = 0; t < entities_.size(); ++t) {
        if (!is_target[t] || dist_src[t] == kUnreached) continue;
        if (dist_src[t] < best) {
            best = dist_src[t];
            chosen = t;
            found = true;
        }
        // Equal-hop ties fall to the smallest id, which this scan order gives.
    }
    if (!found) return std::nullopt;

    std::size_t hops = static_cast<std::size_t>(best);
    std::vector<std::int32_t> dist_back = bfs_distances(chosen, hops);

    // Greedy front-to-back walk: at each step take the smallest-id neighbor
    // that still lies on some shortest path, which yields the
    // lexicographically smallest entity sequence.
    HopPath path;
    path.endpoints = {src, chosen};
    EntityId current = src;
    for (std::size_t step = 0; step < hops; ++step) {
        auto remaining = static_cast<std::int32_t>(hops - step - 1);
        EntityId next = 0;
        bool have_next = false;
        auto consider = [&](EntityId v) {
            if (dist_back[v] != remaining) return;
            if (!have_next || v < next) {
                next = v;
                have_next = true;
            }
        };
        for (std::uint32_t i : out_adjacency_[current]) consider(triples_[i].tail);
        for (std::uint32_t i : in_adjacency_[current]) consider(triples_[i].head);
        if (!have_next) throw ContractViolation("bfs_within_k: inconsistent distance maps");
        path.triples.push_back(connecting_triple(current, next));
        current = next;
    }
    return path;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct RawRecord {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields may contain commas, quotes ("" escape), and
// newlines. Records report the physical line they started on.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    std::optional<RawRecord> next() {
        if (!peek_ok()) return std::nullopt;
        RawRecord rec;
        rec.line = line_;
        std::string field;
        bool in_quotes = false;
        bool any = false;
        for (;;) {
            int ci = in_.get();
            if (ci == EOF) {
                if (!any && field.empty() && rec.fields.empty()) return std::nullopt;
                rec.fields.push_back(std::move(field));
                return rec;
            }
            char c = static_cast<char>(ci);
            any = true;
            if (c == '\n') ++line_;
            if (in_quotes) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        field.push_back('"');
                        in_.get();
                    } else {
                        in_quotes = false;
                    }
                } else {
                    field.push_back(c);
                }
                continue;
            }
            if (c == '"' && field.empty()) {
                in_quotes = true;
            } else if (c == ',') {
                rec.fields.push_back(std::move(field));
                field.clear();
            } else if (c == '\n') {
                if (!field.empty() && field.back() == '\r') field.pop_back();
                rec.fields.push_back(std::move(field));
                return rec;
            } else {
                field.push_back(c);
            }
        }
    }

private:
    bool peek_ok() { return in_.peek() != EOF; }

    std::istream& in_;
    std::size_t line_ = 1;
};

void ingest_record(KnowledgeGraphBuilder& builder, LoadReport& report, std::size_t line,
                   const std::vector<std::string>& fields) {
    ++report.records_read;
    if (fields.size() != 3) {
        report.rejected.push_back({line, "expected 3 fields, got " + std::to_string(fields.size())});
        return;
    }
    for (const std::string& f : fields) {
        if (f.empty()) {
            report.rejected.push_back({line, "empty field"});
            return;
        }
        if (!utf8_valid(f)) {
            report.rejected.push_back({line, "encoding error: field is not valid UTF-8"});
            return;
        }
    }
    if (!builder.add_triple(fields[0], fields[1], fields[2])) {
        ++report.deduplicated;
    }
}

void load_csv(std::istream& in, KnowledgeGraphBuilder& builder, LoadReport& report) {
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields != std::vector<std::string>{"head", "relation", "tail"}) {
        throw InputDataError("triples-csv requires header line `head,relation,tail`");
    }
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && rec->fields[0].empty()) continue; // blank line
        ingest_record(builder, report, rec->line, rec->fields);
    }
}

void load_jsonl(std::istream& in, KnowledgeGraphBuilder& builder, LoadReport& report) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!utf8_valid(line)) {
            ++report.records_read;
            report.rejected.push_back({line_no, "encoding error: line is not valid UTF-8"});
            continue;
        }
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            ++report.records_read;
            report.rejected.push_back({line_no, "not a JSON object"});
            continue;
        }
        std::vector<std::string> fields;
        bool ok = true;
        for (const char* key : {"head", "relation", "tail"}) {
            if (!obj.contains(key) || !obj[key].is_string()) {
                ok = false;
                break;
            }
            fields.push_back(obj[key].get<std::string>());
        }
        if (!ok) {
            ++report.records_read;
            report.rejected.push_back({line_no, "missing or non-string head/relation/tail"});
            continue;
        }
        ingest_record(builder, report, line_no, fields);
    }
}

void write_csv_field(std::ostream& out, const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

} // namespace

std::pair<KnowledgeGraph, LoadReport> load_graph(std::istream& in, TripleFormat format) {
    KnowledgeGraphBuilder builder;
    LoadReport report;
    if (format == TripleFormat::csv) {
        load_csv(in, builder, report);
    } else {
        load_jsonl(in, builder, report);
    }
    return {std::move(builder).build(), std::move(report)};
}

void write_canonical_csv(const KnowledgeGraph& g, std::ostream& out) {
    std::vector<Triple> sorted = g.triples();
    std::sort(sorted.begin(), sorted.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.head, a.relation, a.tail) < std::tie(b.head, b.relation, b.tail);
    });
    out << "head,relation,tail\n";
    for (const Triple& t : sorted) {
        write_csv_field(out, g.entity_label(t.head));
        out << ',';
        write_csv_field(out, g.relation_label(t.relation));
        out << ',';
        write_csv_field(out, g.entity_label(t.tail));
        out << '\n';
    }
}

} // namespace graphmind
