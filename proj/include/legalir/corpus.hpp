#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "legalir/lexical.hpp"

namespace legalir::corpus {

struct SentenceSplitOptions {
    // Tokens (with their trailing period) that never end a sentence.
    std::set<std::string> abbreviations = {"s.",   "ss.",  "v.",   "No.", "Mr.",  "Mrs.",
                                           "Dr.",  "art.", "Art.", "cf.", "e.g.", "i.e.",
                                           "para.", "Inc.", "Ltd.", "Co."};
};

// Splits on ". ? !" followed by whitespace and an uppercase letter or digit.
// No characters are lost apart from the inter-sentence whitespace.
std::vector<std::string> split_sentences(std::string_view text,
                                         const SentenceSplitOptions& options = {});

struct Paragraph {
    std::size_t ordinal = 0;
    std::string text;
    std::vector<std::string> sentences;  // derived from text
};

Paragraph make_paragraph(std::size_t ordinal, std::string text,
                         const SentenceSplitOptions& options = {});

struct CaseDocument {
    std::string id;
    std::vector<Paragraph> paragraphs;  // non-empty, ordinals 0..len-1
    std::string source_path;            // empty when unknown
};

struct StatuteArticle {
    std::string id;
    std::string part;
    std::string chapter;
    std::string section;
    std::string summary_line;  // may be empty
    std::string content;       // non-empty
};

struct BarQuestion {
    std::string id;
    std::string content;
    std::vector<std::string> relevant_article_ids;  // sorted, unique
    std::optional<bool> label;                      // true = Yes
};

// Generic labeled query for corpus statistics (base case or bar question).
struct LabeledQuery {
    std::string id;
    std::string text;
    std::vector<std::string> gold;
};

struct CorpusStats {
    double mean_words_per_doc = 0.0;
    double mean_paragraphs_per_doc = 0.0;
    std::size_t max_words = 0;
    std::size_t max_paragraphs = 0;
    std::size_t sample_count = 0;
    std::size_t candidate_count = 0;
    double mean_gold_per_query = 0.0;  // 0 when no labeled queries supplied
    std::map<std::size_t, std::size_t> length_histogram;  // bucket lower bound -> doc count
    std::size_t histogram_bucket_width = 100;
};

enum class CaseFormat { jsonl, plaintext_dir };

std::vector<CaseDocument> parse_case_corpus(const std::filesystem::path& path, CaseFormat format);
std::vector<CaseDocument> parse_cases_jsonl(std::istream& in, std::string_view origin = "<stream>");
void write_cases_jsonl(const std::vector<CaseDocument>& docs, std::ostream& out);

// The plain-text Civil Code layout: "Part/Chapter/Section" heading lines, an
// optional full-line parenthesized summary immediately before each article,
// then "Article <id> <body...>" with continuation lines until the next
// heading, summary or article.
std::vector<StatuteArticle> parse_civil_code(std::string_view raw);

std::vector<StatuteArticle> parse_articles_jsonl(std::istream& in, std::string_view origin = "<stream>");
void write_articles_jsonl(const std::vector<StatuteArticle>& articles, std::ostream& out);

std::vector<BarQuestion> parse_questions_jsonl(std::istream& in, std::string_view origin = "<stream>");
void write_questions_jsonl(const std::vector<BarQuestion>& questions, std::ostream& out);

// {"id":...,"text":...,"gold":[ids]} per line; gold ids kept sorted unique.
std::vector<LabeledQuery> parse_queries_jsonl(std::istream& in, std::string_view origin = "<stream>");
void write_queries_jsonl(const std::vector<LabeledQuery>& queries, std::ostream& out);

// Checks that every relevant_article_id of a labeled question resolves.
void validate_question_references(const std::vector<BarQuestion>& questions,
                                  const std::vector<StatuteArticle>& articles);

struct StatsOptions {
    std::size_t bucket_width = 100;
    lexical::TokenizerConfig tokenizer;
};

// sample_count and candidate_count both describe the summarized collection;
// the query/candidate split of published corpus tables comes from summarizing
// the two collections separately. The histogram always covers the docs, so
// its counts sum to sample_count.
CorpusStats compute_corpus_stats(const std::vector<CaseDocument>& docs,
                                 const std::vector<LabeledQuery>* queries = nullptr,
                                 const StatsOptions& options = {});
CorpusStats compute_corpus_stats(const std::vector<StatuteArticle>& articles,
                                 const std::vector<LabeledQuery>* queries = nullptr,
                                 const StatsOptions& options = {});

}  // namespace legalir::corpus
