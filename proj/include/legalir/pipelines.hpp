#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/lexical.hpp"
#include "legalir/pairscore.hpp"

namespace legalir::pipelines {

enum class Normalization { minmax_per_query, none };

struct Selection {
    enum class Kind { threshold, fixed_k };
    Kind kind = Kind::threshold;
    double tau = 0.5;    // keep candidates with fused score >= tau
    std::size_t k = 1;   // or exactly the top k of the fused ranking

    static Selection threshold(double tau = 0.5) { return {Kind::threshold, tau, 1}; }
    static Selection fixed_k(std::size_t k) { return {Kind::fixed_k, 0.5, k}; }
};

struct ParagraphAggregation {
    enum class Kind { max, mean_top_m };
    Kind kind = Kind::max;
    std::size_t m = 1;

    static ParagraphAggregation maximum() { return {Kind::max, 1}; }
    static ParagraphAggregation mean_top(std::size_t m) { return {Kind::mean_top_m, m}; }
};

struct FusionConfig {
    double alpha = 0.85;
    std::size_t top_n = 25;
    Normalization normalization = Normalization::minmax_per_query;
    Selection selection = Selection::threshold(0.5);
};

void validate(const FusionConfig& config);  // alpha in [0,1], top_n >= 1

struct RankedCandidate {
    std::string id;
    double fused = 0.0;
    double lexical_component = 0.0;     // the normalized lexical score that entered the mix
    double supporting_component = 0.0;
};

struct RetrievalResult {
    std::string query_id;
    std::vector<RankedCandidate> ranked;  // descending fused score, ties by ascending id
    std::set<std::string> selected;       // subset of ranked ids
    std::size_t warnings = 0;             // candidates an external score table had no entry for
};

// minmax: (x - min) / (max - min); all-equal inputs map to 1.0.
std::map<std::string, double> normalize_scores(const std::map<std::string, double>& raw,
                                               Normalization mode);

// alpha * supporting + (1 - alpha) * lexical_norm, all three in [0, 1].
double fuse(double lexical_norm, double supporting, double alpha);

// Collapses a query-paragraph x candidate-paragraph score matrix to one
// document-level score: the maximum entry, or the mean of the m largest.
double aggregate_paragraph_scores(const std::vector<std::vector<double>>& matrix,
                                  const ParagraphAggregation& mode);

// Two-stage case retrieval. Stage 1 keeps the top_n candidates by aggregated
// paragraph-level BM25 over an index of all candidate paragraphs; stage 2
// scores supporting relations per paragraph pair for the survivors,
// aggregates the same way, normalizes the lexical side per query, fuses and
// selects. The base case must not appear among the candidates.
RetrievalResult run_task1(const corpus::CaseDocument& base_case,
                          const std::vector<corpus::CaseDocument>& candidates,
                          const pairscore::PairScorer& scorer,
                          const lexical::Bm25Params& bm25_params, const FusionConfig& fusion,
                          const ParagraphAggregation& aggregation = {});

// Paragraph-granularity variant: the lexical slot is either BM25 over the
// candidate paragraphs or a precomputed external score table keyed by
// (query_id, candidate_id). Table misses fall back to its default score and
// are counted in RetrievalResult::warnings.
using LexicalSource = std::variant<lexical::Bm25Params, const pairscore::ExternalScoreTable*>;

RetrievalResult run_task2(std::string_view query_id, std::string_view fragment,
                          const std::vector<std::pair<std::string, std::string>>& candidates,
                          const pairscore::PairScorer& scorer, const LexicalSource& lexical_source,
                          const FusionConfig& fusion);

// Statute retrieval: rank articles by Tf-idf cosine, keep the top k, let each
// classifier mark pairs positive at score >= decision_threshold, take the OR
// union, and fall back to the top-1 article when the union is empty. The
// ranked field carries the cosine top-k (supporting_component = the highest
// classifier score for that article); selection is never empty.
RetrievalResult run_task3(const corpus::BarQuestion& question,
                          const std::vector<corpus::StatuteArticle>& articles,
                          const lexical::TfidfModel& model, std::size_t k,
                          const std::vector<const pairscore::PairScorer*>& classifiers,
                          double decision_threshold = 0.5);

std::set<std::string> ensemble_or(const std::vector<std::set<std::string>>& predictions);

struct SweepResult {
    std::map<std::size_t, double> recall_at_k;  // pooled over gold (question, article) pairs
    std::size_t skipped_queries = 0;            // questions without gold article ids
};

SweepResult sweep_k(const std::vector<corpus::BarQuestion>& questions,
                    const std::vector<corpus::StatuteArticle>& articles,
                    const lexical::TfidfModel& model, const std::vector<std::size_t>& k_values);

// One object per line: {"query_id":...,"selected":[...],"ranked":[[id,score],...]}
std::string predictions_jsonl(const std::vector<RetrievalResult>& results);
void write_predictions_jsonl(const std::filesystem::path& path,
                             const std::vector<RetrievalResult>& results);

}  // namespace legalir::pipelines
