#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "legalir/entail.hpp"
#include "legalir/error.hpp"
#include "legalir/lexical.hpp"
#include "legalir/pairscore.hpp"
#include "legalir/synth.hpp"
#include "helpers.hpp"

using namespace legalir;
using namespace legalir::entail;

namespace {

struct StatuteFixture {
    std::vector<corpus::StatuteArticle> articles;
    lexical::TfidfModel model;

    StatuteFixture() {
        const std::vector<std::pair<std::string, std::string>> contents = {
            {"303", "statutory lien priority claim obligee"},
            {"254", "statutory lien divided share"},
            {"999", "unrelated zebra article"},
            {"17", "agent authority ratification"},
        };
        for (const auto& [id, content] : contents) {
            corpus::StatuteArticle article;
            article.id = id;
            article.content = content;
            articles.push_back(article);
        }
        model = lexical::TfidfModel::fit(contents);
    }

    corpus::BarQuestion question(std::string content) const {
        corpus::BarQuestion q;
        q.id = "q1";
        q.content = std::move(content);
        return q;
    }
};

EntailmentPair verdict_pair(pairscore::PairLabel label) {
    EntailmentPair pair;
    pair.question_id = "q";
    pair.article_id = "a";
    pair.predicted = label;
    return pair;
}

}  // namespace

TEST_CASE("entailment pairs union gold with the lexical top two") {
    const StatuteFixture fixture;
    // Strong overlap with 303, then 254; never 999 or 17.
    const auto question = fixture.question("statutory lien priority claim");

    const auto overlap = build_entailment_pairs(question, {"303"}, fixture.model, fixture.articles);
    REQUIRE(overlap.size() == 2);
    CHECK(overlap[0].article_id == "303");  // gold first
    CHECK(overlap[1].article_id == "254");  // then extras by rank
    CHECK(overlap[0].joined_text ==
          question.content + std::string(kPairSeparator) + fixture.articles[0].content);

    const auto no_gold = build_entailment_pairs(question, {}, fixture.model, fixture.articles);
    REQUIRE(no_gold.size() == 2);
    CHECK(no_gold[0].article_id == "303");
    CHECK(no_gold[1].article_id == "254");

    // Gold outside the top two: |gold| + 2 pairs in total.
    const auto disjoint = build_entailment_pairs(question, {"999"}, fixture.model, fixture.articles);
    REQUIRE(disjoint.size() == 3);
    CHECK(disjoint[0].article_id == "999");
    CHECK(disjoint[1].article_id == "303");
    CHECK(disjoint[2].article_id == "254");

    CHECK_THROWS_AS(build_entailment_pairs(question, {"404"}, fixture.model, fixture.articles),
                    LookupError);
    CHECK_THROWS_AS(build_entailment_pairs(question, {"303"}, lexical::TfidfModel{},
                                           fixture.articles),
                    StateError);
}

TEST_CASE("entailment pair sets keep every gold article exactly once") {
    const StatuteFixture fixture;
    const auto question = fixture.question("statutory lien priority claim");
    const std::vector<std::string> gold = {"999", "17", "303"};
    const auto pairs = build_entailment_pairs(question, gold, fixture.model, fixture.articles);
    CHECK(pairs.size() <= gold.size() + 2);
    for (const auto& id : gold) {
        std::size_t count = 0;
        for (const auto& pair : pairs) {
            if (pair.article_id == id) ++count;
        }
        CHECK(count == 1);
    }
}

TEST_CASE("the answer is Yes exactly when some pair is positive") {
    using pairscore::PairLabel;
    CHECK(answer_entailment({verdict_pair(PairLabel::negative),
                             verdict_pair(PairLabel::positive)}));
    CHECK_FALSE(answer_entailment({verdict_pair(PairLabel::negative),
                                   verdict_pair(PairLabel::negative)}));
    CHECK(answer_entailment({verdict_pair(PairLabel::positive)}));

    CHECK_THROWS_AS(answer_entailment({}), ArgumentError);
    EntailmentPair undecided;
    undecided.predicted = std::nullopt;
    CHECK_THROWS_AS(answer_entailment({undecided}), StateError);

    // Exhaustive check over every verdict combination of up to three pairs.
    for (std::size_t n = 1; n <= 3; ++n) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::vector<EntailmentPair> pairs;
            bool any_positive = false;
            for (std::size_t i = 0; i < n; ++i) {
                const bool positive = (mask >> i) & 1;
                any_positive = any_positive || positive;
                pairs.push_back(
                    verdict_pair(positive ? PairLabel::positive : PairLabel::negative));
            }
            CHECK(answer_entailment(pairs) == any_positive);
        }
    }
}

TEST_CASE("rule-based negation flips modal phrases and inverts itself") {
    const auto negated = negate_sentence("The obligor shall perform.");
    REQUIRE(negated.has_value());
    CHECK(*negated == "The obligor shall not perform.");

    // Applying the rule to its own output restores the input.
    const auto restored = negate_sentence(*negated);
    REQUIRE(restored.has_value());
    CHECK(*restored == "The obligor shall perform.");

    // A leading capital survives the swap in both directions.
    const auto capital = negate_sentence("May the claim be divided.");
    REQUIRE(capital.has_value());
    CHECK(*capital == "May not the claim be divided.");
    CHECK(*negate_sentence(*capital) == "May the claim be divided.");

    // Whole words only.
    CHECK_FALSE(negate_sentence("The mayor canal dossier.").has_value());
    CHECK_FALSE(negate_sentence("Nothing to negate here.").has_value());
}

TEST_CASE("lawfulness augmentation labels code sentences and flips negations") {
    std::vector<corpus::StatuteArticle> articles;
    for (int i = 0; i < 20; ++i) {
        corpus::StatuteArticle article;
        article.id = std::to_string(i + 1);
        article.content = "The party shall honor clause " + std::to_string(i + 1) + ".";
        articles.push_back(article);
    }
    const auto samples = augment_lawfulness(articles, {});
    REQUIRE(samples.size() == 40);  // 20 originals + 20 negations
    for (int i = 0; i < 20; ++i) {
        CHECK(samples[i].lawful);
        CHECK(samples[i].origin == SampleOrigin::civil_code_sentence);
    }
    for (int i = 20; i < 40; ++i) {
        CHECK_FALSE(samples[i].lawful);
        CHECK(samples[i].origin == SampleOrigin::augmented);
        CHECK(samples[i].text.find("shall not") != std::string::npos);
    }
}

TEST_CASE("bar questions pass through augmentation with their labels") {
    corpus::StatuteArticle article;
    article.id = "1";
    article.content = "Possession may be transferred.";

    std::vector<corpus::BarQuestion> questions(3);
    questions[0].id = "y";
    questions[0].content = "A pledge may secure a future claim.";
    questions[0].label = true;
    questions[1].id = "n";
    questions[1].content = "A lease may not exceed the statutory period.";
    questions[1].label = false;
    questions[2].id = "unlabeled";
    questions[2].content = "Dropped at training time.";

    const auto samples = augment_lawfulness({article}, questions);
    // 1 code sentence + 2 labeled questions + 3 negations (the code sentence
    // and both questions contain lexicon phrases); the unlabeled question is
    // dropped entirely.
    REQUIRE(samples.size() == 6);
    CHECK(samples[0].origin == SampleOrigin::civil_code_sentence);
    CHECK(samples[0].lawful);
    CHECK(samples[1].origin == SampleOrigin::bar_question);
    CHECK(samples[1].text == questions[0].content);
    CHECK(samples[1].lawful);
    CHECK(samples[2].origin == SampleOrigin::bar_question);
    CHECK_FALSE(samples[2].lawful);
    for (std::size_t i = 3; i < samples.size(); ++i) {
        CHECK(samples[i].origin == SampleOrigin::augmented);
    }
    // Negating a No-question yields a Yes variant.
    CHECK(samples[5].lawful);
    CHECK(samples[5].text == "A lease may exceed the statutory period.");
    for (const auto& sample : samples) {
        CHECK(sample.text.find("Dropped") == std::string::npos);
    }

    // Deterministic output.
    const auto again = augment_lawfulness({article}, questions);
    REQUIRE(again.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(again[i].text == samples[i].text);
        CHECK(again[i].lawful == samples[i].lawful);
    }
}

TEST_CASE("lawfulness answers follow the score threshold") {
    // A zero-weight classifier scores 0.5, and 0.5 maps to Yes.
    const pairscore::LinearPairScorer untrained;
    CHECK(answer_lawfulness("anything at all", untrained));

    // Train on a planted-token fixture: lawful texts carry one marker token,
    // unlawful ones another.
    std::vector<pairscore::TextPair> pairs;
    for (int i = 0; i < 60; ++i) {
        pairs.push_back({"clause " + std::to_string(i) + " lawfultoken holds", "",
                         pairscore::PairLabel::positive});
        pairs.push_back({"clause " + std::to_string(i) + " unlawfultoken fails", "",
                         pairscore::PairLabel::negative});
    }
    pairscore::TrainHyper hyper;
    hyper.seed = 4;
    const auto classifier = pairscore::train(pairs, hyper, 1 << 14);
    CHECK(answer_lawfulness("new clause lawfultoken holds", classifier));
    CHECK_FALSE(answer_lawfulness("new clause unlawfultoken fails", classifier));
}

TEST_CASE("vocabulary overlap counts shared and exclusive tokens") {
    const auto overlap = vocab_overlap({"a", "b", "c"}, {"b", "c", "d"});
    CHECK(overlap.shared == 2);
    CHECK(overlap.only_a == 1);
    CHECK(overlap.only_b == 1);

    const auto identical = vocab_overlap({"x", "y"}, {"x", "y"});
    CHECK(identical.shared == 2);
    CHECK(identical.only_a == 0);
    CHECK(identical.only_b == 0);

    const auto empty = vocab_overlap({}, {});
    CHECK(empty.shared == 0);

    // shared + only_a = |A| and shared + only_b = |B|.
    const std::set<std::string> a = {"1", "2", "3", "4"};
    const std::set<std::string> b = {"3", "4", "5"};
    const auto counts = vocab_overlap(a, b);
    CHECK(counts.shared + counts.only_a == a.size());
    CHECK(counts.shared + counts.only_b == b.size());
}

TEST_CASE("vocabulary files read one token per line") {
    testutil::TempDir dir;
    testutil::write_file(dir.file("vocab.txt"), "alpha\nbeta\n\ngamma\n");
    const auto vocab = read_vocab_file(dir.file("vocab.txt"));
    CHECK(vocab == std::set<std::string>{"alpha", "beta", "gamma"});
    CHECK_THROWS_AS(read_vocab_file(dir.file("missing.txt")), IoError);
}

TEST_CASE("answer files serialize question, answer and approach") {
    std::vector<QuestionAnswer> answers(2);
    answers[0].question_id = "H18-9-2";
    answers[0].yes = true;
    answers[0].approach = AnswerApproach::entailment;
    answers[1].question_id = "H20-1-1";
    answers[1].yes = false;
    answers[1].approach = AnswerApproach::lawfulness;

    const auto text = answers_jsonl(answers);
    const auto newline = text.find('\n');
    const auto first = nlohmann::json::parse(text.substr(0, newline));
    CHECK(first["question_id"] == "H18-9-2");
    CHECK(first["answer"] == "Y");
    CHECK(first["approach"] == "entailment");
    const auto second = nlohmann::json::parse(text.substr(newline + 1));
    CHECK(second["answer"] == "N");
    CHECK(second["approach"] == "lawfulness");
}
