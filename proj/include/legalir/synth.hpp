#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/pairscore.hpp"

namespace legalir::synth {

// Stand-in for licensed evaluation data: a case corpus with planted
// supporting relations, a statute corpus, and labeled bar questions, all
// deterministic functions of the seed.
struct SyntheticSpec {
    std::size_t n_cases = 100;
    std::size_t paragraphs_min = 6;   // >= 3 so every query case fits its
    std::size_t paragraphs_max = 12;  // reasoning + conclusion structure
    double planted_support_rate = 0.05;
    std::size_t vocab_size = 400;
    std::uint64_t seed = 0;
};

// Derived shape: the first n_cases/10 cases are query cases; each gets
// round(rate * n_cases) planted supports and about as many lexical
// distractors among the remaining cases. Articles number 2 * n_cases and
// questions n_cases / 2.
struct SyntheticCorpus {
    std::vector<corpus::CaseDocument> cases;
    std::vector<corpus::LabeledQuery> case_queries;  // gold = planted support case ids
    std::vector<corpus::StatuteArticle> articles;
    std::vector<corpus::BarQuestion> questions;      // gold article ids, Y/N labels

    std::size_t gold_pair_count() const;  // sum of planted (query, support) pairs
};

// Planted supports share a marker-led conclusion and rare signal tokens with
// their query case, so both the lexical ranker and a pair scorer trained on
// the corpus's own weak labels can find them; distractors echo the query's
// theme words instead, confusing only the lexical side.
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Linearly separable labeled pairs: positive pairs share a planted token on
// both sides, negatives never contain it. Alternates positive/negative.
std::vector<pairscore::TextPair> separable_pairs(std::size_t count, std::uint64_t seed);

}  // namespace legalir::synth
