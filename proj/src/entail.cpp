#include "legalir/entail.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir::entail {

std::vector<EntailmentPair> build_entailment_pairs(
    const corpus::BarQuestion& question, const std::vector<std::string>& gold_article_ids,
    const lexical::TfidfModel& model, const std::vector<corpus::StatuteArticle>& articles) {
    if (!model.fitted()) {
        throw StateError("build_entailment_pairs: tf-idf model is not fitted");
    }
    if (articles.empty()) {
        throw ArgumentError("build_entailment_pairs: no articles");
    }
    std::map<std::string, const corpus::StatuteArticle*> by_id;
    std::vector<std::pair<std::string, std::string>> units;
    units.reserve(articles.size());
    for (const auto& article : articles) {
        by_id[article.id] = &article;
        units.emplace_back(article.id, article.content);
    }

    std::vector<EntailmentPair> pairs;
    std::set<std::string> included;
    const auto append = [&](const std::string& article_id) {
        if (!included.insert(article_id).second) {
            return;
        }
        const auto it = by_id.find(article_id);
        if (it == by_id.end()) {
            throw LookupError("build_entailment_pairs: unknown article id: " + article_id);
        }
        EntailmentPair pair;
        pair.question_id = question.id;
        pair.article_id = article_id;
        pair.joined_text = question.content;
        pair.joined_text += kPairSeparator;
        pair.joined_text += it->second->content;
        pairs.push_back(std::move(pair));
    };

    for (const auto& gold : gold_article_ids) {
        append(gold);
    }
    for (const auto& scored : lexical::cosine_rank_topk(model, question.content, units, 2)) {
        if (included.count(scored.id) == 0) {
            append(scored.id);
        }
    }
    return pairs;
}

bool answer_entailment(const std::vector<EntailmentPair>& pairs) {
    if (pairs.empty()) {
        throw ArgumentError("answer_entailment: no pairs");
    }
    bool any_positive = false;
    for (const auto& pair : pairs) {
        if (!pair.predicted.has_value()) {
            throw StateError("answer_entailment: pair without verdict: " + pair.article_id);
        }
        any_positive = any_positive || *pair.predicted == pairscore::PairLabel::positive;
    }
    return any_positive;
}

namespace {

bool word_boundary(std::string_view text, std::size_t pos) {
    if (pos == 0 || pos >= text.size()) {
        return true;
    }
    return !std::isalnum(static_cast<unsigned char>(text[pos - 1])) ||
           !std::isalnum(static_cast<unsigned char>(text[pos]));
}

// Case-insensitive whole-phrase match at `pos`.
bool phrase_at(std::string_view text, std::size_t pos, std::string_view phrase) {
    if (pos + phrase.size() > text.size()) {
        return false;
    }
    for (std::size_t i = 0; i < phrase.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) !=
            std::tolower(static_cast<unsigned char>(phrase[i]))) {
            return false;
        }
    }
    return word_boundary(text, pos) && word_boundary(text, pos + phrase.size());
}

}  // namespace

std::optional<std::string> negate_sentence(std::string_view sentence,
                                           const NegationLexicon& lexicon) {
    for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
        if (pos > 0 && std::isalnum(static_cast<unsigned char>(sentence[pos - 1]))) {
            continue;  // mid-word, not a word start
        }
        // Longest match at this position wins, so "may not" beats "may".
        const std::string* matched = nullptr;
        const std::string* replacement = nullptr;
        for (const auto& [positive, negative] : lexicon.pairs) {
            if (phrase_at(sentence, pos, negative) &&
                (matched == nullptr || negative.size() > matched->size())) {
                matched = &negative;
                replacement = &positive;
            }
            if (phrase_at(sentence, pos, positive) &&
                (matched == nullptr || positive.size() > matched->size())) {
                matched = &positive;
                replacement = &negative;
            }
        }
        if (matched == nullptr) {
            continue;
        }
        std::string out;
        out.reserve(sentence.size() + replacement->size());
        out += sentence.substr(0, pos);
        // Preserve a leading capital across the swap.
        if (std::isupper(static_cast<unsigned char>(sentence[pos])) && !replacement->empty()) {
            out += static_cast<char>(std::toupper(static_cast<unsigned char>((*replacement)[0])));
            out += replacement->substr(1);
        } else {
            out += *replacement;
        }
        out += sentence.substr(pos + matched->size());
        return out;
    }
    return std::nullopt;
}

std::vector<LawfulnessSample> augment_lawfulness(
    const std::vector<corpus::StatuteArticle>& articles,
    const std::vector<corpus::BarQuestion>& questions, const NegationLexicon& lexicon) {
    std::vector<LawfulnessSample> samples;
    std::vector<LawfulnessSample> augmented;
    const auto add_negation = [&](const std::string& text, bool lawful) {
        if (auto negated = negate_sentence(text, lexicon)) {
            augmented.push_back({std::move(*negated), !lawful, SampleOrigin::augmented});
        }
    };
    for (const auto& article : articles) {
        for (const auto& sentence : corpus::split_sentences(article.content)) {
            samples.push_back({sentence, true, SampleOrigin::civil_code_sentence});
            add_negation(sentence, true);
        }
    }
    for (const auto& question : questions) {
        if (!question.label.has_value()) {
            continue;
        }
        samples.push_back({question.content, *question.label, SampleOrigin::bar_question});
        add_negation(question.content, *question.label);
    }
    samples.insert(samples.end(), std::make_move_iterator(augmented.begin()),
                   std::make_move_iterator(augmented.end()));
    return samples;
}

bool answer_lawfulness(std::string_view question_text, const pairscore::PairScorer& classifier) {
    return classifier.score({"", "", question_text, ""}) >= 0.5;
}

VocabOverlap vocab_overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
    VocabOverlap out;
    for (const auto& token : a) {
        if (b.count(token) != 0) {
            ++out.shared;
        } else {
            ++out.only_a;
        }
    }
    out.only_b = b.size() - out.shared;
    return out;
}

std::set<std::string> read_vocab_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::set<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            vocab.insert(line);
        }
    }
    return vocab;
}

std::string answers_jsonl(const std::vector<QuestionAnswer>& answers) {
    std::string out;
    for (const auto& answer : answers) {
        nlohmann::ordered_json object;
        object["question_id"] = answer.question_id;
        object["answer"] = answer.yes ? "Y" : "N";
        object["approach"] =
            answer.approach == AnswerApproach::entailment ? "entailment" : "lawfulness";
        out += object.dump();
        out += "\n";
    }
    return out;
}

void write_answers_jsonl(const std::filesystem::path& path,
                         const std::vector<QuestionAnswer>& answers) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << answers_jsonl(answers);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace legalir::entail
