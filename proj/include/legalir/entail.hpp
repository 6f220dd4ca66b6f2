#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "legalir/corpus.hpp"
#include "legalir/lexical.hpp"
#include "legalir/pairscore.hpp"

namespace legalir::entail {

inline constexpr std::string_view kPairSeparator = " [SEP] ";

struct EntailmentPair {
    std::string question_id;
    std::string article_id;
    std::string joined_text;  // question content + separator + article content
    std::optional<pairscore::PairLabel> predicted;
};

// Pair set = gold articles first (given order), then the question's Tf-idf
// top-2 articles by rank, deduplicated. Unknown gold ids are an error.
std::vector<EntailmentPair> build_entailment_pairs(
    const corpus::BarQuestion& question, const std::vector<std::string>& gold_article_ids,
    const lexical::TfidfModel& model, const std::vector<corpus::StatuteArticle>& articles);

// Yes iff at least one pair was classified positive. Every pair must carry a
// verdict.
bool answer_entailment(const std::vector<EntailmentPair>& pairs);

enum class SampleOrigin { civil_code_sentence, bar_question, augmented };

struct LawfulnessSample {
    std::string text;
    bool lawful = true;  // Yes/No label
    SampleOrigin origin = SampleOrigin::civil_code_sentence;
};

// Each entry maps a phrase to its negation; negate_sentence swaps the first
// occurrence of either side for the other, longest match first, so applying
// it twice restores the input.
struct NegationLexicon {
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"may", "may not"},     {"shall", "shall not"}, {"must", "must not"},
        {"can", "cannot"},      {"is", "is not"},       {"are", "are not"},
        {"was", "was not"},     {"were", "were not"},   {"does", "does not"},
        {"do", "do not"},       {"has", "has not"},     {"have", "have not"},
        {"will", "will not"},
    };
};

// Whole-word match; returns nothing when no lexicon phrase occurs.
std::optional<std::string> negate_sentence(std::string_view sentence,
                                           const NegationLexicon& lexicon = {});

// Civil-code sentences labeled Yes, labeled bar questions as-is, then one
// label-flipped negated variant per source sample where the lexicon applies.
// Unlabeled questions are dropped. Deterministic order: code sentences,
// questions, augmented (in source order).
std::vector<LawfulnessSample> augment_lawfulness(
    const std::vector<corpus::StatuteArticle>& articles,
    const std::vector<corpus::BarQuestion>& questions, const NegationLexicon& lexicon = {});

// The classifier sees the question text alone (empty right side).
// Yes iff score >= 0.5; a zero-weight classifier therefore answers Yes.
bool answer_lawfulness(std::string_view question_text, const pairscore::PairScorer& classifier);

struct VocabOverlap {
    std::size_t shared = 0;
    std::size_t only_a = 0;
    std::size_t only_b = 0;
};

VocabOverlap vocab_overlap(const std::set<std::string>& a, const std::set<std::string>& b);

// One token per line; blank lines ignored.
std::set<std::string> read_vocab_file(const std::filesystem::path& path);

enum class AnswerApproach { entailment, lawfulness };

struct QuestionAnswer {
    std::string question_id;
    bool yes = false;
    AnswerApproach approach = AnswerApproach::entailment;
};

// One object per line: {"question_id":...,"answer":"Y"|"N","approach":...}
std::string answers_jsonl(const std::vector<QuestionAnswer>& answers);
void write_answers_jsonl(const std::filesystem::path& path,
                         const std::vector<QuestionAnswer>& answers);

}  // namespace legalir::entail
