#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace legalir::lexical {

struct TokenizerConfig {
    bool lowercase = true;
    std::set<std::string> stopwords;    // removed after lowercasing
    std::size_t min_token_len = 1;      // tokens shorter than this are dropped
};

// Splits on non-alphanumeric boundaries. Deterministic.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

struct Posting {
    std::uint32_t unit = 0;  // ordinal into unit id table
    std::uint32_t tf = 0;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Immutable term-level index over a set of text units.
/// Persisted as a versioned binary file (magic "LIRX1"); serialization is
/// byte-identical for identical input sequences and tokenizer config.
class InvertedIndex {
public:
    static InvertedIndex build(const std::vector<std::pair<std::string, std::string>>& units,
                               const TokenizerConfig& config = {});

    std::size_t unit_count() const { return unit_ids_.size(); }
    double avgdl() const { return avgdl_; }
    const std::vector<std::string>& unit_ids() const { return unit_ids_; }
    bool has_unit(std::string_view unit_id) const;
    std::size_t doc_len(std::string_view unit_id) const;
    std::size_t df(std::string_view token) const;
    std::uint32_t term_frequency(std::string_view token, std::uint32_t unit_ordinal) const;
    std::uint32_t unit_ordinal(std::string_view unit_id) const;

    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    // Okapi BM25 with the +1-inside-log idf, never negative:
    //   idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1)
    //   score  = sum over query occurrences of
    //            idf(t) * tf*(k1+1) / (tf + k1*(1 - b + b*dl/avgdl))
    // Repeated query terms contribute once per occurrence.
    double bm25(const Bm25Params& params, const std::vector<std::string>& query_tokens,
                std::string_view unit_id) const;

    // BM25 against every unit, aligned with unit_ids() order.
    std::vector<double> bm25_all(const Bm25Params& params,
                                 const std::vector<std::string>& query_tokens) const;

private:
    InvertedIndex() = default;

    std::vector<std::string> unit_ids_;                     // insertion order
    std::map<std::string, std::uint32_t> unit_ordinals_;
    std::map<std::string, std::vector<Posting>> postings_;  // ordered for stable serialization
    std::vector<std::uint32_t> doc_len_;
    double avgdl_ = 0.0;

    double bm25_for_ordinal(const Bm25Params& params,
                            const std::vector<std::string>& query_tokens,
                            std::uint32_t ordinal) const;
};

double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_tokens, std::string_view unit_id);

// Entry (i, j) scores query paragraph i against candidate paragraph j over an
// index built from the candidate side only.
std::vector<std::vector<double>> bm25_pair_matrix(const std::vector<std::string>& query_paragraphs,
                                                  const std::vector<std::string>& candidate_paragraphs,
                                                  const Bm25Params& params = {},
                                                  const TokenizerConfig& config = {});

/// Tf-idf vectorizer with idf(t) = ln(N / df(t)) + 1 and raw term counts.
/// Vocabulary indices are dense 0..|V|-1, assigned in sorted token order.
/// Persisted as "LTFV1".
class TfidfModel {
public:
    TfidfModel() = default;

    static TfidfModel fit(const std::vector<std::pair<std::string, std::string>>& units,
                          const TokenizerConfig& config = {});

    bool fitted() const { return !vocab_.empty(); }
    std::size_t vocab_size() const { return vocab_.size(); }
    const std::string& fingerprint() const { return fingerprint_; }
    const TokenizerConfig& tokenizer() const { return config_; }
    double idf(std::string_view token) const;  // 0 for out-of-vocabulary tokens

    // Sparse tf*idf vector; out-of-vocabulary tokens are ignored. Entries are
    // not normalized here; ranking normalizes on request.
    std::map<std::uint32_t, double> vector(std::string_view text) const;

    void save(const std::filesystem::path& path) const;
    static TfidfModel load(const std::filesystem::path& path);

private:
    std::map<std::string, std::uint32_t> vocab_;
    std::vector<double> idf_;
    std::string fingerprint_;
    TokenizerConfig config_;
};

struct ScoredUnit {
    std::string id;
    double similarity = 0.0;
};

// Cosine over L2-normalized tf-idf vectors, descending, ties broken by
// ascending unit id. A zero-norm query yields all-zero similarities.
std::vector<ScoredUnit> cosine_rank_topk(const TfidfModel& model, std::string_view query_text,
                                         const std::vector<std::pair<std::string, std::string>>& units,
                                         std::size_t k);

/// Precomputed normalized unit vectors, for ranking many queries against the
/// same collection.
class TfidfCorpus {
public:
    TfidfCorpus(const TfidfModel& model,
                const std::vector<std::pair<std::string, std::string>>& units);
    std::vector<ScoredUnit> rank_topk(const TfidfModel& model, std::string_view query_text,
                                      std::size_t k) const;
    std::size_t size() const { return ids_.size(); }

private:
    std::vector<std::string> ids_;
    std::vector<std::map<std::uint32_t, double>> vectors_;  // L2-normalized
};

}  // namespace legalir::lexical
