#include "graphmind/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graphmind/errors.hpp"
#include "graphmind/text.hpp"

namespace graphmind {

const std::vector<Axis>& all_axes() {
    static const std::vector<Axis> axes = {
        Axis::diversity_integrity,
        Axis::total_factualness,
        Axis::disease_diagnosis,
        Axis::drug_recommendation,
    };
    return axes;
}

std::string axis_name(Axis axis) {
    switch (axis) {
        case Axis::diversity_integrity: return "diversity_integrity";
        case Axis::total_factualness: return "total_factualness";
        case Axis::disease_diagnosis: return "disease_diagnosis";
        case Axis::drug_recommendation: return "drug_recommendation";
    }
    return "total_factualness";
}

Axis axis_from_name(const std::string& name) {
    for (Axis axis : all_axes()) {
        if (axis_name(axis) == name) return axis;
    }
    throw ConfigError("unknown evaluation axis: " + name);
}

std::string axis_instruction(Axis axis) {
    switch (axis) {
        case Axis::diversity_integrity:
            return "According to the result in reference output, which output is better.";
        case Axis::total_factualness:
            return "According to the facts of disease diagnosis and drug and tests "
                   "recommendation in reference output, which output is better match.";
        case Axis::disease_diagnosis:
            return "According to the disease diagnosis result in reference output, which "
                   "output is better match.";
        case Axis::drug_recommendation:
            return "According to the drug recommendation result in reference output, which "
                   "output is better match.";
    }
    return {};
}

std::string build_pairwise_prompt(const std::string& reference, const std::string& out1,
                                  const std::string& out2, Axis axis, bool anti_tie) {
    if (reference.empty() || out1.empty() || out2.empty()) {
        throw ContractViolation("build_pairwise_prompt: all texts must be nonempty");
    }
    std::ostringstream out;
    out << "Reference: " << reference << "\n\n";
    out << "output1: " << out1 << "\n\n";
    out << "output2: " << out2 << "\n\n";
    out << axis_instruction(axis) << " If the output1 is better match, output '1'. "
        << "If the output2 is better match, output '0'. If they are same match, output '2'.";
    if (anti_tie) {
        out << " If they are the same, output \"2\". Try to output \"1\" or \"0\".";
    }
    return out.str();
}

Verdict parse_verdict(const std::string& raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c != '0' && c != '1' && c != '2') continue;
        bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(raw[i - 1]));
        bool right_ok = i + 1 == raw.size() || !std::isalnum(static_cast<unsigned char>(raw[i + 1]));
        if (!left_ok || !right_ok) continue;
        if (c == '1') return Verdict::out1_wins;
        if (c == '0') return Verdict::out2_wins;
        return Verdict::tie;
    }
    throw ParseError("no verdict digit (0/1/2) in judge reply", raw);
}

char verdict_digit(Verdict verdict) {
    switch (verdict) {
        case Verdict::out1_wins: return '1';
        case Verdict::out2_wins: return '0';
        case Verdict::tie: return '2';
    }
    return '2';
}

std::vector<WinRateRow> aggregate_winrates(
    const std::vector<std::pair<Axis, std::vector<Verdict>>>& verdicts_by_axis) {
    std::vector<WinRateRow> rows;
    for (const auto& [axis, verdicts] : verdicts_by_axis) {
        if (verdicts.empty()) {
            throw ContractViolation("aggregate_winrates: axis " + axis_name(axis) +
                                    " has no verdicts");
        }
        std::size_t wins = 0;
        std::size_t ties = 0;
        std::size_t losses = 0;
        for (Verdict v : verdicts) {
            if (v == Verdict::out1_wins) ++wins;
            else if (v == Verdict::tie) ++ties;
            else ++losses;
        }
        double n = static_cast<double>(verdicts.size());
        rows.push_back({axis_name(axis), 100.0 * static_cast<double>(wins) / n,
                        100.0 * static_cast<double>(ties) / n,
                        100.0 * static_cast<double>(losses) / n});
    }

    WinRateRow average{"Average", 0.0, 0.0, 0.0};
    for (const WinRateRow& row : rows) {
        average.win += row.win;
        average.tie += row.tie;
        average.lose += row.lose;
    }
    if (!rows.empty()) {
        double n = static_cast<double>(rows.size());
        average.win /= n;
        average.tie /= n;
        average.lose /= n;
    }
    rows.push_back(average);
    return rows;
}

namespace {

std::string format_percent(double value) {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed << value;
    std::string text = out.str();
    while (!text.empty() && text.back() == '0') text.pop_back();
    if (!text.empty() && text.back() == '.') text.pop_back();
    return text;
}

} // namespace

std::string winrates_to_csv(const std::vector<WinRateRow>& rows) {
    std::ostringstream out;
    out << "axis,win,tie,lose\n";
    for (const WinRateRow& row : rows) {
        out << row.axis << ',' << format_percent(row.win) << ',' << format_percent(row.tie)
            << ',' << format_percent(row.lose) << '\n';
    }
    return out.str();
}

std::string build_ranking_prompt(const std::string& reference,
                                 const std::vector<std::string>& answers) {
    if (answers.size() < 2) {
        throw ContractViolation("build_ranking_prompt: need at least 2 answers");
    }
    if (answers.size() > 26) {
        throw ContractViolation("build_ranking_prompt: at most 26 answers");
    }
    std::ostringstream out;
    out << "Reference: " << reference << "\n\n";
    for (std::size_t i = 0; i < answers.size(); ++i) {
        out << "Answer " << static_cast<char>('A' + i) << ": " << answers[i] << "\n\n";
    }
    out << "Rank the answers from best to worst by how well they match the reference. "
        << "Reply with the labels only, best first, separated by '>', for example: ";
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (i > 0) out << " > ";
        out << static_cast<char>('A' + i);
    }
    out << ".";
    return out.str();
}

std::vector<std::size_t> parse_ranking(const std::string& raw, std::size_t n) {
    if (n < 2) throw ContractViolation("parse_ranking: n must be >= 2");
    std::vector<std::size_t> order;
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (upper < 'A' || upper >= static_cast<char>('A' + n)) continue;
        bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(raw[i - 1]));
        bool right_ok = i + 1 == raw.size() || !std::isalnum(static_cast<unsigned char>(raw[i + 1]));
        if (!left_ok || !right_ok) continue;
        auto index = static_cast<std::size_t>(upper - 'A');
        if (seen[index]) {
            throw ParseError("ranking reply repeats label " + std::string(1, upper), raw);
        }
        seen[index] = true;
        order.push_back(index);
    }
    if (order.size() != n) {
        throw ParseError("ranking reply does not order all " + std::to_string(n) + " labels", raw);
    }
    return order;
}

std::vector<double> mean_ranks(const std::vector<std::vector<std::size_t>>& ranks_per_question) {
    if (ranks_per_question.empty()) {
        throw ContractViolation("mean_ranks: no questions");
    }
    std::size_t n = ranks_per_question.front().size();
    std::vector<double> totals(n, 0.0);
    for (const auto& ranks : ranks_per_question) {
        if (ranks.size() != n) throw ContractViolation("mean_ranks: ragged rank rows");
        for (std::size_t method = 0; method < n; ++method) {
            totals[method] += static_cast<double>(ranks[method]);
        }
    }
    for (double& total : totals) total /= static_cast<double>(ranks_per_question.size());
    return totals;
}

SimilarityScore lexical_overlap_score(const std::string& candidate,
                                      const std::string& reference) {
    std::map<std::string, std::size_t> cand_counts;
    std::map<std::string, std::size_t> ref_counts;
    std::size_t cand_total = 0;
    std::size_t ref_total = 0;
    for (const std::string& token : tokenize(candidate)) {
        ++cand_counts[token];
        ++cand_total;
    }
    for (const std::string& token : tokenize(reference)) {
        ++ref_counts[token];
        ++ref_total;
    }
    std::size_t overlap = 0;
    for (const auto& [token, count] : cand_counts) {
        auto it = ref_counts.find(token);
        if (it != ref_counts.end()) overlap += std::min(count, it->second);
    }
    SimilarityScore score;
    score.precision = cand_total > 0 ? static_cast<double>(overlap) / static_cast<double>(cand_total)
                                     : 0.0;
    score.recall =
        ref_total > 0 ? static_cast<double>(overlap) / static_cast<double>(ref_total) : 0.0;
    score.f1 = (score.precision + score.recall) > 0.0
                   ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                   : 0.0;
    return score;
}

SimilarityScore score_similarity(const std::string& candidate, const std::string& reference,
                                 const SimilarityScorer& scorer) {
    return scorer(candidate, reference);
}

std::vector<ManifestRow> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputDataError("cannot open manifest: " + path);
    std::vector<ManifestRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
            !obj.contains("method") || !obj.contains("answer") || !obj.contains("reference")) {
            throw InputDataError("bad manifest row at line " + std::to_string(line_no) + " in " +
                                 path);
        }
        rows.push_back({obj["id"].get<std::string>(), obj["method"].get<std::string>(),
                        obj["answer"].get<std::string>(), obj["reference"].get<std::string>()});
    }
    return rows;
}

void save_manifest(const std::vector<ManifestRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    for (const ManifestRow& row : rows) {
        nlohmann::ordered_json obj;
        obj["id"] = row.id;
        obj["method"] = row.method;
        obj["answer"] = row.answer;
        obj["reference"] = row.reference;
        out << obj.dump() << '\n';
    }
}

} // namespace graphmind
