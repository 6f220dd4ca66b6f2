#include "legalir/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "legalir/error.hpp"

namespace legalir::corpus {

using nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// The word ending at `end` (inclusive), scanned back over [alnum .] so that
// dotted abbreviations like "e.g." survive intact.
std::string trailing_word(std::string_view text, std::size_t end) {
    std::size_t begin = end + 1;
    while (begin > 0) {
        const char c = text[begin - 1];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.')
            --begin;
        else
            break;
    }
    return std::string(text.substr(begin, end - begin + 1));
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text, const SentenceSplitOptions& options) {
    std::vector<std::string> sentences;
    auto emit = [&](std::string_view piece) {
        piece = trim(piece);
        if (!piece.empty()) sentences.emplace_back(piece);
    };

    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '.' || c == '?' || c == '!') {
            std::size_t next = i + 1;
            if (next < text.size() && is_space(text[next])) {
                while (next < text.size() && is_space(text[next])) ++next;
                const bool starts_sentence =
                    next < text.size() && (std::isupper(static_cast<unsigned char>(text[next])) ||
                                           std::isdigit(static_cast<unsigned char>(text[next])));
                const bool abbreviated =
                    c == '.' && options.abbreviations.count(trailing_word(text, i)) > 0;
                if (starts_sentence && !abbreviated) {
                    emit(text.substr(start, i + 1 - start));
                    start = next;
                    i = next;
                    continue;
                }
            }
        }
        ++i;
    }
    emit(text.substr(start));
    return sentences;
}

Paragraph make_paragraph(std::size_t ordinal, std::string text, const SentenceSplitOptions& options) {
    Paragraph p;
    p.ordinal = ordinal;
    p.sentences = split_sentences(text, options);
    p.text = std::move(text);
    return p;
}

namespace {

void check_document(const CaseDocument& doc, const std::string& where) {
    if (doc.id.empty()) throw ParseError(where + ": empty document id");
    if (doc.paragraphs.empty()) throw ParseError(where + ": document '" + doc.id + "' has no paragraphs");
    for (std::size_t i = 0; i < doc.paragraphs.size(); ++i) {
        if (doc.paragraphs[i].ordinal != i)
            throw ParseError(where + ": document '" + doc.id + "' has non-contiguous paragraph ordinals");
        if (trim(doc.paragraphs[i].text).empty())
            throw ParseError(where + ": document '" + doc.id + "' has an empty paragraph");
    }
}

json parse_json_line(const std::string& line, const std::string& where) {
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) throw ParseError(where + ": malformed JSON");
    if (!record.is_object()) throw ParseError(where + ": expected a JSON object");
    return record;
}

std::string require_string(const json& record, const char* key, const std::string& where) {
    if (!record.contains(key) || !record[key].is_string())
        throw ParseError(where + ": missing or non-string field '" + key + "'");
    return record[key].get<std::string>();
}

}  // namespace

std::vector<CaseDocument> parse_cases_jsonl(std::istream& in, std::string_view origin) {
    std::vector<CaseDocument> docs;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(lineno);
        json record = parse_json_line(line, where);

        CaseDocument doc;
        doc.id = require_string(record, "id", where);
        if (!record.contains("paragraphs") || !record["paragraphs"].is_array())
            throw ParseError(where + ": missing or non-array field 'paragraphs'");
        std::size_t ordinal = 0;
        for (const auto& item : record["paragraphs"]) {
            if (!item.is_string()) throw ParseError(where + ": paragraph entries must be strings");
            doc.paragraphs.push_back(make_paragraph(ordinal++, item.get<std::string>()));
        }
        if (record.contains("source_path") && record["source_path"].is_string())
            doc.source_path = record["source_path"].get<std::string>();
        check_document(doc, where);
        if (!seen.insert(doc.id).second)
            throw CorpusError(where + ": duplicate document id '" + doc.id + "'");
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_cases_jsonl(const std::vector<CaseDocument>& docs, std::ostream& out) {
    for (const auto& doc : docs) {
        json record;
        record["id"] = doc.id;
        auto& paragraphs = record["paragraphs"] = json::array();
        for (const auto& p : doc.paragraphs) paragraphs.push_back(p.text);
        if (!doc.source_path.empty()) record["source_path"] = doc.source_path;
        out << record.dump() << '\n';
    }
}

namespace {

CaseDocument parse_plaintext_case(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open '" + file.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string raw = buffer.str();

    CaseDocument doc;
    doc.id = file.stem().string();
    doc.source_path = file.string();

    // Paragraph boundary is a blank line.
    std::string current;
    std::istringstream lines(raw);
    std::string line;
    auto flush = [&] {
        auto body = trim(current);
        if (!body.empty())
            doc.paragraphs.push_back(make_paragraph(doc.paragraphs.size(), std::string(body)));
        current.clear();
    };
    while (std::getline(lines, line)) {
        if (trim(line).empty()) {
            flush();
        } else {
            if (!current.empty()) current += ' ';
            current += std::string(trim(line));
        }
    }
    flush();
    check_document(doc, file.string());
    return doc;
}

}  // namespace

std::vector<CaseDocument> parse_case_corpus(const std::filesystem::path& path, CaseFormat format) {
    if (format == CaseFormat::jsonl) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path.string() + "'");
        return parse_cases_jsonl(in, path.string());
    }

    if (!std::filesystem::is_directory(path))
        throw IoError("'" + path.string() + "' is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<CaseDocument> docs;
    std::set<std::string> seen;
    for (const auto& file : files) {
        auto doc = parse_plaintext_case(file);
        if (!seen.insert(doc.id).second)
            throw CorpusError(file.string() + ": duplicate document id '" + doc.id + "'");
        docs.push_back(std::move(doc));
    }
    return docs;
}

namespace {

bool is_heading(std::string_view line, std::string_view keyword) {
    return line.size() > keyword.size() && line.substr(0, keyword.size()) == keyword &&
           line[keyword.size()] == ' ';
}

bool is_summary_line(std::string_view line) {
    return line.size() >= 2 && line.front() == '(' && line.back() == ')';
}

}  // namespace

std::vector<StatuteArticle> parse_civil_code(std::string_view raw) {
    std::vector<StatuteArticle> articles;
    std::string part, chapter, section, pending_summary;
    std::set<std::string> seen;

    StatuteArticle current;
    bool in_article = false;

    auto finish_article = [&](std::size_t lineno) {
        if (!in_article) return;
        if (trim(current.content).empty())
            throw ParseError("civil code line " + std::to_string(lineno) + ": article '" +
                             current.id + "' has an empty body");
        current.content = std::string(trim(current.content));
        if (!seen.insert(current.id).second)
            throw CorpusError("duplicate article id '" + current.id + "'");
        articles.push_back(current);
        current = StatuteArticle{};
        in_article = false;
    };

    std::istringstream lines{std::string(raw)};
    std::string rawline;
    std::size_t lineno = 0;
    while (std::getline(lines, rawline)) {
        ++lineno;
        const std::string line{trim(rawline)};
        if (line.empty()) continue;

        if (is_heading(line, "Part")) {
            finish_article(lineno);
            part = line;
            chapter.clear();
            section.clear();
            pending_summary.clear();
            continue;
        }
        if (is_heading(line, "Chapter")) {
            finish_article(lineno);
            chapter = line;
            section.clear();
            pending_summary.clear();
            continue;
        }
        if (is_heading(line, "Section")) {
            finish_article(lineno);
            section = line;
            pending_summary.clear();
            continue;
        }
        if (is_summary_line(line)) {
            finish_article(lineno);
            pending_summary = line;
            continue;
        }
        if (is_heading(line, "Article")) {
            finish_article(lineno);
            std::string_view rest = trim(std::string_view(line).substr(8));
            const std::size_t space = rest.find(' ');
            const std::string_view id = space == std::string_view::npos ? rest : rest.substr(0, space);
            if (id.empty() || !std::isdigit(static_cast<unsigned char>(id.front())))
                throw ParseError("civil code line " + std::to_string(lineno) + ": malformed article marker");
            in_article = true;
            current.id = std::string(id);
            current.part = part;
            current.chapter = chapter;
            current.section = section;
            current.summary_line = pending_summary;
            pending_summary.clear();
            current.content = space == std::string_view::npos ? "" : std::string(trim(rest.substr(space + 1)));
            continue;
        }

        // Body continuation.
        if (!in_article)
            throw ParseError("civil code line " + std::to_string(lineno) +
                             ": body text before any Article marker");
        if (!current.content.empty()) current.content += ' ';
        current.content += line;
    }
    finish_article(lineno + 1);
    return articles;
}

std::vector<StatuteArticle> parse_articles_jsonl(std::istream& in, std::string_view origin) {
    std::vector<StatuteArticle> articles;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(lineno);
        json record = parse_json_line(line, where);
        StatuteArticle article;
        article.id = require_string(record, "id", where);
        article.part = record.value("part", "");
        article.chapter = record.value("chapter", "");
        article.section = record.value("section", "");
        article.summary_line = record.value("summary_line", "");
        article.content = require_string(record, "content", where);
        if (trim(article.content).empty()) throw ParseError(where + ": empty article content");
        if (!seen.insert(article.id).second)
            throw CorpusError(where + ": duplicate article id '" + article.id + "'");
        articles.push_back(std::move(article));
    }
    return articles;
}

void write_articles_jsonl(const std::vector<StatuteArticle>& articles, std::ostream& out) {
    for (const auto& a : articles) {
        json record;
        record["id"] = a.id;
        record["part"] = a.part;
        record["chapter"] = a.chapter;
        record["section"] = a.section;
        record["summary_line"] = a.summary_line;
        record["content"] = a.content;
        out << record.dump() << '\n';
    }
}

std::vector<BarQuestion> parse_questions_jsonl(std::istream& in, std::string_view origin) {
    std::vector<BarQuestion> questions;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(lineno);
        json record = parse_json_line(line, where);
        BarQuestion q;
        q.id = require_string(record, "id", where);
        q.content = require_string(record, "content", where);
        if (trim(q.content).empty()) throw ParseError(where + ": empty question content");
        if (record.contains("relevant_article_ids")) {
            if (!record["relevant_article_ids"].is_array())
                throw ParseError(where + ": 'relevant_article_ids' must be an array");
            for (const auto& item : record["relevant_article_ids"]) {
                if (!item.is_string()) throw ParseError(where + ": article ids must be strings");
                q.relevant_article_ids.push_back(item.get<std::string>());
            }
            std::sort(q.relevant_article_ids.begin(), q.relevant_article_ids.end());
            q.relevant_article_ids.erase(
                std::unique(q.relevant_article_ids.begin(), q.relevant_article_ids.end()),
                q.relevant_article_ids.end());
        }
        if (record.contains("label") && !record["label"].is_null()) {
            const auto label = require_string(record, "label", where);
            if (label == "Y")
                q.label = true;
            else if (label == "N")
                q.label = false;
            else
                throw ParseError(where + ": label must be \"Y\", \"N\" or null");
        }
        if (!seen.insert(q.id).second)
            throw CorpusError(where + ": duplicate question id '" + q.id + "'");
        questions.push_back(std::move(q));
    }
    return questions;
}

void write_questions_jsonl(const std::vector<BarQuestion>& questions, std::ostream& out) {
    for (const auto& q : questions) {
        json record;
        record["id"] = q.id;
        record["content"] = q.content;
        record["relevant_article_ids"] = q.relevant_article_ids;
        if (q.label.has_value())
            record["label"] = *q.label ? "Y" : "N";
        else
            record["label"] = nullptr;
        out << record.dump() << '\n';
    }
}

std::vector<LabeledQuery> parse_queries_jsonl(std::istream& in, std::string_view origin) {
    std::vector<LabeledQuery> queries;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(lineno);
        json record = parse_json_line(line, where);
        LabeledQuery q;
        q.id = require_string(record, "id", where);
        q.text = require_string(record, "text", where);
        if (record.contains("gold")) {
            if (!record["gold"].is_array())
                throw ParseError(where + ": 'gold' must be an array");
            for (const auto& item : record["gold"]) {
                if (!item.is_string()) throw ParseError(where + ": gold ids must be strings");
                q.gold.push_back(item.get<std::string>());
            }
            std::sort(q.gold.begin(), q.gold.end());
            q.gold.erase(std::unique(q.gold.begin(), q.gold.end()), q.gold.end());
        }
        if (!seen.insert(q.id).second)
            throw CorpusError(where + ": duplicate query id '" + q.id + "'");
        queries.push_back(std::move(q));
    }
    return queries;
}

void write_queries_jsonl(const std::vector<LabeledQuery>& queries, std::ostream& out) {
    for (const auto& q : queries) {
        json record;
        record["id"] = q.id;
        record["text"] = q.text;
        record["gold"] = q.gold;
        out << record.dump() << '\n';
    }
}

void validate_question_references(const std::vector<BarQuestion>& questions,
                                  const std::vector<StatuteArticle>& articles) {
    std::set<std::string> ids;
    for (const auto& a : articles) ids.insert(a.id);
    for (const auto& q : questions)
        for (const auto& gold : q.relevant_article_ids)
            if (!ids.count(gold))
                throw CorpusError("question '" + q.id + "' references unknown article '" + gold + "'");
}

namespace {

struct UnitLengths {
    std::size_t words = 0;
    std::size_t paragraphs = 0;
};

CorpusStats stats_from_lengths(const std::vector<UnitLengths>& lengths,
                               const std::vector<LabeledQuery>* queries,
                               const StatsOptions& options) {
    if (lengths.empty()) throw ArgumentError("compute_corpus_stats: empty document collection");
    if (options.bucket_width == 0) throw ArgumentError("compute_corpus_stats: zero bucket width");

    CorpusStats stats;
    stats.histogram_bucket_width = options.bucket_width;
    stats.sample_count = lengths.size();
    stats.candidate_count = lengths.size();

    std::uint64_t total_words = 0, total_paragraphs = 0;
    for (const auto& u : lengths) {
        total_words += u.words;
        total_paragraphs += u.paragraphs;
        stats.max_words = std::max(stats.max_words, u.words);
        stats.max_paragraphs = std::max(stats.max_paragraphs, u.paragraphs);
        const std::size_t bucket = (u.words / options.bucket_width) * options.bucket_width;
        ++stats.length_histogram[bucket];
    }
    stats.mean_words_per_doc = static_cast<double>(total_words) / static_cast<double>(lengths.size());
    stats.mean_paragraphs_per_doc =
        static_cast<double>(total_paragraphs) / static_cast<double>(lengths.size());

    if (queries && !queries->empty()) {
        std::uint64_t total_gold = 0;
        for (const auto& q : *queries) total_gold += q.gold.size();
        stats.mean_gold_per_query = static_cast<double>(total_gold) / static_cast<double>(queries->size());
    }
    return stats;
}

}  // namespace

CorpusStats compute_corpus_stats(const std::vector<CaseDocument>& docs,
                                 const std::vector<LabeledQuery>* queries,
                                 const StatsOptions& options) {
    std::vector<UnitLengths> lengths;
    lengths.reserve(docs.size());
    for (const auto& doc : docs) {
        UnitLengths u;
        u.paragraphs = doc.paragraphs.size();
        for (const auto& p : doc.paragraphs)
            u.words += lexical::tokenize(p.text, options.tokenizer).size();
        lengths.push_back(u);
    }
    return stats_from_lengths(lengths, queries, options);
}

CorpusStats compute_corpus_stats(const std::vector<StatuteArticle>& articles,
                                 const std::vector<LabeledQuery>* queries,
                                 const StatsOptions& options) {
    std::vector<UnitLengths> lengths;
    lengths.reserve(articles.size());
    for (const auto& a : articles) {
        UnitLengths u;
        u.paragraphs = 1;
        u.words = lexical::tokenize(a.content, options.tokenizer).size();
        lengths.push_back(u);
    }
    return stats_from_lengths(lengths, queries, options);
}

}  // namespace legalir::corpus
