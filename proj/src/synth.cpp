#include "legalir/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "legalir/error.hpp"
#include "legalir/rng.hpp"

namespace legalir::synth {

namespace {

const char* const kSyllables[] = {"ba", "ce", "di", "fo", "gu", "ha", "ki", "lo",
                                  "mu", "ne", "po", "ra", "su", "ti", "vo", "za"};
constexpr std::size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);

std::string vocab_word(std::size_t i) {
    std::string word = kSyllables[i % kSyllableCount];
    word += kSyllables[(i / kSyllableCount) % kSyllableCount];
    word += kSyllables[(i / (kSyllableCount * kSyllableCount)) % kSyllableCount];
    const std::size_t cube = kSyllableCount * kSyllableCount * kSyllableCount;
    if (i >= cube) {
        word += std::to_string(i / cube);
    }
    return word;
}

const char* const kMarkers[] = {"Therefore", "Accordingly", "For these reasons", "Consequently"};

std::string zero_pad(std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    while (digits.size() < width) {
        digits.insert(digits.begin(), '0');
    }
    return digits;
}

struct Shape {
    std::size_t n_queries = 0;
    std::size_t supports_per_query = 0;
    std::size_t distractors_per_query = 0;
    std::size_t n_articles = 0;
    std::size_t n_questions = 0;
};

Shape derive_shape(const SyntheticSpec& spec) {
    Shape shape;
    shape.n_queries = std::max<std::size_t>(1, spec.n_cases / 10);
    const std::size_t budget =
        spec.n_cases > shape.n_queries ? (spec.n_cases - shape.n_queries) / shape.n_queries : 0;
    const auto requested = static_cast<std::size_t>(
        std::llround(spec.planted_support_rate * static_cast<double>(spec.n_cases)));
    shape.supports_per_query = std::min(requested, budget);
    shape.distractors_per_query =
        std::min(shape.supports_per_query, budget - shape.supports_per_query);
    shape.n_articles = 2 * spec.n_cases;
    shape.n_questions = std::max<std::size_t>(1, spec.n_cases / 2);
    return shape;
}

void validate(const SyntheticSpec& spec, const Shape& shape) {
    if (spec.n_cases < 1) {
        throw ArgumentError("synthetic spec: n_cases must be at least 1");
    }
    if (spec.paragraphs_min < 3 || spec.paragraphs_max < spec.paragraphs_min) {
        throw ArgumentError("synthetic spec: need 3 <= paragraphs_min <= paragraphs_max");
    }
    if (!(spec.planted_support_rate >= 0.0 && spec.planted_support_rate <= 1.0)) {
        throw RangeError("synthetic spec: planted_support_rate outside [0, 1]");
    }
    const std::size_t reserved = 9 * shape.n_queries + 24;  // signal + theme pools + filler floor
    if (spec.vocab_size < reserved) {
        throw ArgumentError("synthetic spec: vocab_size too small, need at least " +
                            std::to_string(reserved));
    }
}

// Word pools carved out of one synthetic vocabulary. Each query owns three
// signal words, appearing only in its own conclusion and its supports'
// reasoning, and a disjoint six-word theme shared with its distractors.
struct Pools {
    std::vector<std::vector<std::string>> signal;  // 3 words per query
    std::vector<std::vector<std::string>> theme;   // 6 words per query
    std::vector<std::string> filler;
};

Pools carve_pools(const SyntheticSpec& spec, const Shape& shape) {
    Pools pools;
    std::size_t next = 0;
    pools.signal.resize(shape.n_queries);
    for (auto& words : pools.signal) {
        for (std::size_t i = 0; i < 3; ++i) {
            words.push_back(vocab_word(next++));
        }
    }
    pools.theme.resize(shape.n_queries);
    for (auto& words : pools.theme) {
        for (std::size_t i = 0; i < 6; ++i) {
            words.push_back(vocab_word(next++));
        }
    }
    while (next < spec.vocab_size) {
        pools.filler.push_back(vocab_word(next++));
    }
    return pools;
}

class Writer {
public:
    Writer(const Pools& pools, SplitMix64& gen) : pools_(pools), gen_(gen) {}

    const std::string& any_filler() {
        return pools_.filler[gen_.next_below(pools_.filler.size())];
    }

    // Every body paragraph shares one sentence skeleton; paragraph kinds
    // differ only in which words fill the slots. A scorer trained on weak
    // pairs from this corpus can therefore only learn the words, never the
    // template, which keeps its judgments query-specific.
    std::string body_paragraph(const std::string& w0, const std::string& w1,
                               const std::string& w2, const std::string& w3,
                               const std::string& w4) {
        std::string text = "The tribunal weighed " + w0 + " " + w0 + " and " + w1 + " " + w1 +
                           " against " + w2 + ".";
        text += " Counsel relied on " + w3 + " " + w3 + " under the " + w4 + " doctrine.";
        return text;
    }

    std::string filler_paragraph() {
        const auto& w0 = any_filler();
        const auto& w1 = any_filler();
        const auto& w2 = any_filler();
        const auto& w3 = any_filler();
        const auto& w4 = any_filler();
        return body_paragraph(w0, w1, w2, w3, w4);
    }

    // Four of the query's six theme words, so lexical rankers latch onto
    // the theme.
    std::string theme_paragraph(std::size_t query) {
        const auto& theme = pools_.theme[query];
        std::vector<std::size_t> picks = {0, 1, 2, 3, 4, 5};
        shuffle(picks, gen_);
        const auto& w4 = any_filler();
        return body_paragraph(theme[picks[0]], theme[picks[1]], theme[picks[2]], theme[picks[3]],
                              w4);
    }

    // The three signal words, slot-aligned with filler citations, plus a
    // faint theme echo.
    std::string reasoning_paragraph(std::size_t query) {
        const auto& sig = pools_.signal[query];
        const auto& theme = pools_.theme[query];
        const auto& echo = theme[gen_.next_below(theme.size())];
        return body_paragraph(sig[0], sig[1], echo, sig[2], any_filler());
    }

    // Shaped like a conclusion but led by none of the discourse markers and
    // naming no query's signal. Sampled as a weak negative, it teaches that
    // conclusion phrasing and high token overlap with the marker sentence do
    // not imply support.
    std::string holding_paragraph() {
        const auto& w0 = any_filler();
        const auto& w1 = any_filler();
        const auto& w2 = any_filler();
        return "The court further holds that " + w0 + " " + w0 + " " + w1 + " " + w1 + " " + w2 +
               " " + w2 + " prevail.";
    }

    // A discourse-marker conclusion naming the signal words. Sometimes
    // prefixed with a paragraph ordinal, which detection must see through.
    std::string marker_sentence(std::size_t query, std::size_t ordinal) {
        const auto& sig = pools_.signal[query];
        std::string text;
        if (gen_.next_below(2) == 0) {
            text += "[" + std::to_string(ordinal + 1) + "] ";
        }
        text += kMarkers[gen_.next_below(4)];
        text += " the court holds that " + sig[0] + " " + sig[0] + " " + sig[1] + " " + sig[1] +
                " " + sig[2] + " " + sig[2] + " prevail.";
        return text;
    }

private:
    const Pools& pools_;
    SplitMix64& gen_;
};

}  // namespace

std::size_t SyntheticCorpus::gold_pair_count() const {
    std::size_t count = 0;
    for (const auto& query : case_queries) {
        count += query.gold.size();
    }
    return count;
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
    const Shape shape = derive_shape(spec);
    validate(spec, shape);
    const Pools pools = carve_pools(spec, shape);
    SplitMix64 gen(spec.seed);
    Writer writer(pools, gen);

    // Case roles: the first n_queries indexes are query cases; supports and
    // distractors are carved consecutively out of the rest.
    enum class Role { query, support, distractor, unrelated };
    std::vector<Role> roles(spec.n_cases, Role::unrelated);
    std::vector<std::size_t> owner(spec.n_cases, 0);  // which query a planted case serves
    std::size_t cursor = shape.n_queries;
    SyntheticCorpus out;
    out.case_queries.resize(shape.n_queries);
    const auto case_id = [&](std::size_t index) { return "case-" + zero_pad(index, 3); };
    for (std::size_t q = 0; q < shape.n_queries; ++q) {
        roles[q] = Role::query;
        owner[q] = q;
        out.case_queries[q].id = case_id(q);
        for (std::size_t s = 0; s < shape.supports_per_query; ++s) {
            roles[cursor] = Role::support;
            owner[cursor] = q;
            out.case_queries[q].gold.push_back(case_id(cursor));
            ++cursor;
        }
        for (std::size_t d = 0; d < shape.distractors_per_query; ++d) {
            roles[cursor] = Role::distractor;
            owner[cursor] = q;
            ++cursor;
        }
    }

    const std::size_t span = spec.paragraphs_max - spec.paragraphs_min + 1;
    for (std::size_t c = 0; c < spec.n_cases; ++c) {
        corpus::CaseDocument doc;
        doc.id = case_id(c);
        const std::size_t count = spec.paragraphs_min + gen.next_below(span);
        const std::size_t q = owner[c];
        std::vector<std::string> paragraphs;
        switch (roles[c]) {
            case Role::query: {
                for (std::size_t p = 0; p + 2 < count; ++p) {
                    paragraphs.push_back(writer.theme_paragraph(q));
                }
                paragraphs.push_back(writer.reasoning_paragraph(q));
                paragraphs.push_back(writer.marker_sentence(q, count - 1));
                break;
            }
            case Role::support: {
                // Reasoning immediately before the marker paragraph, the same
                // adjacency the weak labeler assumes. The opening holding sits
                // two or more paragraphs away, inside negative-sampling range.
                const std::size_t at = 2 + gen.next_below(count - 2);
                for (std::size_t p = 0; p < count; ++p) {
                    if (p == 0) {
                        paragraphs.push_back(writer.holding_paragraph());
                    } else if (p == at - 1) {
                        paragraphs.push_back(writer.reasoning_paragraph(q));
                    } else if (p == at) {
                        paragraphs.push_back(writer.marker_sentence(q, p));
                    } else {
                        paragraphs.push_back(writer.filler_paragraph());
                    }
                }
                break;
            }
            case Role::distractor: {
                for (std::size_t p = 0; p < count; ++p) {
                    paragraphs.push_back(p + 1 < count ? writer.theme_paragraph(q)
                                                       : writer.filler_paragraph());
                }
                break;
            }
            case Role::unrelated: {
                for (std::size_t p = 0; p < count; ++p) {
                    paragraphs.push_back(writer.filler_paragraph());
                }
                break;
            }
        }
        for (std::size_t p = 0; p < paragraphs.size(); ++p) {
            doc.paragraphs.push_back(corpus::make_paragraph(p, paragraphs[p]));
        }
        out.cases.push_back(std::move(doc));
        if (roles[c] == Role::query) {
            out.case_queries[q].text = out.cases.back().paragraphs.back().text;
        }
    }

    // Statutes: three topic words each, drawn with overlap from the filler
    // pool, so questions find their article without it being the only match.
    std::vector<std::array<std::string, 3>> topics(shape.n_articles);
    for (std::size_t a = 0; a < shape.n_articles; ++a) {
        corpus::StatuteArticle article;
        article.id = std::to_string(a + 1);
        article.part = "Part " + std::to_string(a / 50 + 1);
        article.chapter = "Chapter " + std::to_string(a / 10 % 5 + 1);
        article.section = "Section " + std::to_string(a % 10 / 5 + 1);
        for (std::size_t t = 0; t < 3; ++t) {
            topics[a][t] = pools.filler[(a * 7 + t * 3) % pools.filler.size()];
        }
        article.summary_line = "(" + topics[a][0] + " " + topics[a][1] + ")";
        article.content = "The " + topics[a][0] + " holder shall deliver the " + topics[a][1] +
                          " to the " + topics[a][2] + " obligee before performance.";
        out.articles.push_back(std::move(article));
    }

    for (std::size_t j = 0; j < shape.n_questions; ++j) {
        corpus::BarQuestion question;
        question.id = "q-" + zero_pad(j + 1, 3);
        const std::size_t gold = (j * 7) % shape.n_articles;
        question.relevant_article_ids.push_back(out.articles[gold].id);
        if (j % 5 == 0 && shape.n_articles > 1) {
            const std::size_t extra = (gold + 3) % shape.n_articles;
            question.relevant_article_ids.push_back(out.articles[extra].id);
        }
        std::sort(question.relevant_article_ids.begin(), question.relevant_article_ids.end());
        question.relevant_article_ids.erase(std::unique(question.relevant_article_ids.begin(),
                                                        question.relevant_article_ids.end()),
                                            question.relevant_article_ids.end());
        const auto& topic = topics[gold];
        // Harder questions name fewer of the gold article's topic words and
        // more stray ones, spreading the gold rank across k.
        const std::size_t mentioned = 1 + gen.next_below(3);
        const bool lawful = j % 2 == 0;
        std::string content = "A " + topic[0] + " holder " + (lawful ? "may" : "may not") +
                              " demand " + (mentioned > 1 ? topic[1] : writer.any_filler());
        content += " for the " + (mentioned > 2 ? topic[2] : writer.any_filler()) + " claim.";
        const std::size_t stray = gen.next_below(3);
        for (std::size_t s = 0; s < stray; ++s) {
            const auto& other = topics[gen.next_below(shape.n_articles)];
            content += " It also concerns " + other[s % 3] + ".";
        }
        question.content = std::move(content);
        question.label = lawful;
        out.questions.push_back(std::move(question));
    }
    return out;
}

std::vector<pairscore::TextPair> separable_pairs(std::size_t count, std::uint64_t seed) {
    if (count < 2) {
        throw ArgumentError("separable_pairs: need at least 2 pairs");
    }
    SplitMix64 gen(seed);
    const auto word = [&]() { return vocab_word(64 + gen.next_below(256)); };
    std::vector<pairscore::TextPair> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const bool positive = i % 2 == 0;
        pairscore::TextPair pair;
        if (positive) {
            pair.left = "The claim cites sigmatoken alongside " + word() + " and " + word() + ".";
            pair.right = "The reply grounds sigmatoken in " + word() + " practice.";
        } else {
            pair.left = "The claim cites " + word() + " alongside " + word() + " and " + word() +
                        ".";
            pair.right = "The reply grounds " + word() + " in " + word() + " practice.";
        }
        pair.label = positive ? pairscore::PairLabel::positive : pairscore::PairLabel::negative;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace legalir::synth
