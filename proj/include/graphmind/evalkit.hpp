#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace graphmind {

enum class Axis {
    diversity_integrity,
    total_factualness,
    disease_diagnosis,
    drug_recommendation,
};

const std::vector<Axis>& all_axes();
std::string axis_name(Axis axis);
Axis axis_from_name(const std::string& name);

// The rater instruction sentence for the axis.
std::string axis_instruction(Axis axis);

enum class Verdict { out1_wins, out2_wins, tie };

// Reference / output1 / output2 template with the axis instruction and the
// '1'/'0'/'2' decision rule; anti_tie appends the tie-discouragement sentence
// used for reference answers that carry few hard facts.
std::string build_pairwise_prompt(const std::string& reference, const std::string& out1,
                                  const std::string& out2, Axis axis, bool anti_tie = false);

// First standalone 0/1/2 digit decides; no digit is a ParseError.
Verdict parse_verdict(const std::string& raw);

char verdict_digit(Verdict verdict);

struct WinRateRow {
    std::string axis;
    double win = 0.0;
    double tie = 0.0;
    double lose = 0.0;
};

// One row per axis (input order preserved) plus an unweighted "Average" row.
std::vector<WinRateRow> aggregate_winrates(
    const std::vector<std::pair<Axis, std::vector<Verdict>>>& verdicts_by_axis);

std::string winrates_to_csv(const std::vector<WinRateRow>& rows);

// Letter-labeled candidate answers (A, B, ...) presented in the given order;
// the judge is asked for a ranking like "B > A > C".
std::string build_ranking_prompt(const std::string& reference,
                                 const std::vector<std::string>& answers);

// Returns the 0-based answer index per rank position; missing or duplicate
// labels are a ParseError.
std::vector<std::size_t> parse_ranking(const std::string& raw, std::size_t n);

// Mean 1-based rank per method over per-question rank rows.
std::vector<double> mean_ranks(const std::vector<std::vector<std::size_t>>& ranks_per_question);

struct SimilarityScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Token-multiset overlap P/R/F1 under the shared tokenizer. External scorers
// plug in behind the same signature.
using SimilarityScorer =
    std::function<SimilarityScore(const std::string& candidate, const std::string& reference)>;

SimilarityScore lexical_overlap_score(const std::string& candidate, const std::string& reference);

SimilarityScore score_similarity(const std::string& candidate, const std::string& reference,
                                 const SimilarityScorer& scorer = lexical_overlap_score);

// Evaluation run manifest: JSONL rows of one method's answers.
struct ManifestRow {
    std::string id;
    std::string method;
    std::string answer;
    std::string reference;
};

std::vector<ManifestRow> load_manifest(const std::string& path);
void save_manifest(const std::vector<ManifestRow>& rows, const std::string& path);

} // namespace graphmind
