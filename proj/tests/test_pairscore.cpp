#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "legalir/error.hpp"
#include "legalir/pairscore.hpp"
#include "legalir/rng.hpp"
#include "legalir/synth.hpp"
#include "helpers.hpp"

using namespace legalir;
using namespace legalir::pairscore;

namespace {

using PairKey = std::tuple<std::string, std::string, int>;

std::vector<PairKey> pair_multiset(const std::vector<TextPair>& pairs) {
    std::vector<PairKey> keys;
    keys.reserve(pairs.size());
    for (const auto& p : pairs) {
        keys.emplace_back(p.left, p.right, p.label == PairLabel::positive ? 1 : 0);
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

double feature_sum(const FeatureVector& features) {
    double sum = 0.0;
    for (const auto& [slot, value] : features) sum += value;
    return sum;
}

}  // namespace

TEST_CASE("marker sentences pair with their preceding paragraph") {
    const auto doc = testutil::make_case(
        "c1", {"The contract was signed.", "Therefore, it binds A."});
    const auto pairs = extract_weak_pairs({doc});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].left == "Therefore, it binds A.");
    CHECK(pairs[0].right == "The contract was signed.");
    CHECK(pairs[0].label == PairLabel::positive);
}

TEST_CASE("extraction works at sentence granularity") {
    const auto doc = testutil::make_case(
        "c1", {"The contract was signed.", "Therefore, it binds A. More text follows."});
    const auto pairs = extract_weak_pairs({doc});
    REQUIRE(pairs.size() == 1);
    // Only the marker sentence, not its whole paragraph.
    CHECK(pairs[0].left == "Therefore, it binds A.");
}

TEST_CASE("marker matching respects ordinals and word boundaries") {
    const auto with_ordinal = testutil::make_case(
        "c1", {"Some premise.", "[2] Consequently, the appeal fails."});
    const auto pairs = extract_weak_pairs({with_ordinal});
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].left == "[2] Consequently, the appeal fails.");

    // A marker prefix embedded in a longer word does not count.
    const auto embedded = testutil::make_case(
        "c2", {"Some premise.", "Thereforeland is a place."});
    CHECK(extract_weak_pairs({embedded}).empty());

    // A marker in the opening paragraph has nothing to support it.
    const auto opening = testutil::make_case("c3", {"Therefore, nothing precedes."});
    CHECK(extract_weak_pairs({opening}).empty());

    const auto unmarked = testutil::make_case("c4", {"One.", "Two.", "Three."});
    CHECK(extract_weak_pairs({unmarked}).empty());
}

TEST_CASE("negative pairs come from distant paragraphs only") {
    std::vector<std::string> paragraphs;
    for (int i = 0; i < 10; ++i) {
        paragraphs.push_back("Paragraph number " + std::to_string(i) + " text.");
    }
    paragraphs[6] = "Accordingly, the claim succeeds.";
    const auto doc = testutil::make_case("c1", paragraphs);

    WeakLabelConfig config;
    config.seed = 7;
    const auto pairs = extract_weak_pairs({doc}, config);
    REQUIRE(pairs.size() == 4);  // 1 positive + 3 negatives
    CHECK(pairs[0].label == PairLabel::positive);
    CHECK(pairs[0].right == paragraphs[5]);

    std::set<std::string> negative_rights;
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        CHECK(pairs[i].label == PairLabel::negative);
        negative_rights.insert(pairs[i].right);
        // Locate the source paragraph and check its distance from the marker.
        const auto it = std::find(paragraphs.begin(), paragraphs.end(), pairs[i].right);
        REQUIRE(it != paragraphs.end());
        const auto p = static_cast<std::size_t>(it - paragraphs.begin());
        const std::size_t distance = p > 6 ? p - 6 : 6 - p;
        CHECK(distance >= config.min_negative_distance);
    }
    // Sampling is without replacement.
    CHECK(negative_rights.size() == 3);
}

TEST_CASE("fewer eligible paragraphs than requested negatives is fine") {
    // Three paragraphs, marker at index 2: only index 0 is >= 2 away.
    const auto doc = testutil::make_case(
        "c1", {"Base premise.", "Middle part.", "Therefore, done."});
    const auto pairs = extract_weak_pairs({doc});
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].label == PairLabel::positive);
    CHECK(pairs[1].label == PairLabel::negative);
    CHECK(pairs[1].right == "Base premise.");
}

TEST_CASE("weak extraction is deterministic and order-stable") {
    std::vector<std::string> a_paragraphs, b_paragraphs;
    for (int i = 0; i < 10; ++i) {
        a_paragraphs.push_back("Doc a body paragraph " + std::to_string(i) + ".");
        b_paragraphs.push_back("Doc b body paragraph " + std::to_string(i) + ".");
    }
    a_paragraphs[4] = "Therefore, a concludes.";
    b_paragraphs[7] = "For these reasons, b concludes.";
    const auto doc_a = testutil::make_case("a", a_paragraphs);
    const auto doc_b = testutil::make_case("b", b_paragraphs);

    WeakLabelConfig config;
    config.seed = 7;
    const auto run1 = extract_weak_pairs({doc_a, doc_b}, config);
    const auto run2 = extract_weak_pairs({doc_a, doc_b}, config);
    CHECK(pair_multiset(run1) == pair_multiset(run2));

    // Document order does not matter, thanks to per-document seeding.
    const auto swapped = extract_weak_pairs({doc_b, doc_a}, config);
    CHECK(pair_multiset(swapped) == pair_multiset(run1));
}

TEST_CASE("feature vectors carry both sides, overlap slots and the ratio") {
    const std::size_t dim = 1 << 10;

    // Single shared token: 1 left unigram + 1 right unigram + 1 overlap slot
    // + overlap ratio 1.0.
    CHECK(feature_sum(featurize("x", "x", 0, dim)) == doctest::Approx(4.0));

    // Disjoint sides: no overlap slots, ratio 0.
    CHECK(feature_sum(featurize("x", "y", 0, dim)) == doctest::Approx(2.0));

    // 4 unigrams + 3 bigrams per side, 2 shared tokens, Jaccard 2/6.
    CHECK(feature_sum(featurize("a b c d", "a b x y", 0, dim)) ==
          doctest::Approx(16.0 + 2.0 / 6.0));
}

TEST_CASE("hashing depends on the seed but the overlap ratio does not") {
    const std::size_t dim = 1 << 18;
    const auto fa = featurize("a b c d", "a b x y", 1, dim);
    const auto fb = featurize("a b c d", "a b x y", 2, dim);
    CHECK(fa != fb);  // different slot assignments
    CHECK(feature_sum(fa) == doctest::Approx(feature_sum(fb)).epsilon(1e-12));

    // Same seed, same pair: identical vectors.
    CHECK(featurize("a b c d", "a b x y", 1, dim) == fa);

    CHECK_THROWS_AS(featurize("a", "b", 0, 1000), ArgumentError);  // not a power of two
    CHECK_THROWS_AS(featurize("a", "b", 0, 0), ArgumentError);
}

TEST_CASE("an untrained scorer sits exactly on the fence") {
    const LinearPairScorer scorer(1 << 10);
    CHECK(scorer.score_text("any left", "any right") == doctest::Approx(0.5));
    CHECK(scorer.trained_epochs() == 0);

    std::vector<TextPair> pairs = {{"planted yes", "planted yes", PairLabel::positive},
                                   {"other no", "thing no", PairLabel::negative}};
    TrainHyper zero_epochs;
    zero_epochs.epochs = 0;
    const auto trained = train(pairs, zero_epochs, 1 << 10);
    CHECK(trained.score_text("a", "b") == doctest::Approx(0.5));
    for (const double w : trained.weights()) CHECK(w == 0.0);
}

TEST_CASE("training separates the planted-token fixture") {
    const auto pairs = synth::separable_pairs(200, 3);
    TrainHyper hyper;
    hyper.seed = 3;
    const auto scorer = train(pairs, hyper, 1 << 14);

    std::size_t correct = 0;
    for (const auto& pair : pairs) {
        const double s = scorer.score_text(pair.left, pair.right);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
        const bool predicted = s >= 0.5;
        if (predicted == (pair.label == PairLabel::positive)) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(pairs.size()) >= 0.95);

    REQUIRE(scorer.epoch_losses().size() == hyper.epochs);
    for (std::size_t e = 1; e < scorer.epoch_losses().size(); ++e) {
        CHECK(scorer.epoch_losses()[e] <= scorer.epoch_losses()[e - 1] + 1e-6);
    }
    CHECK(scorer.trained_epochs() == hyper.epochs);
}

TEST_CASE("training is bit-reproducible and rejects single-class input") {
    const auto pairs = synth::separable_pairs(60, 5);
    TrainHyper hyper;
    hyper.seed = 11;
    const auto a = train(pairs, hyper, 1 << 12);
    const auto b = train(pairs, hyper, 1 << 12);
    CHECK(a.weights() == b.weights());
    CHECK(a.bias() == b.bias());

    std::vector<TextPair> one_class = {{"a", "b", PairLabel::positive},
                                       {"c", "d", PairLabel::positive}};
    CHECK_THROWS_AS(train(one_class, hyper, 1 << 12), TrainingError);
    CHECK_THROWS_AS(train({}, hyper, 1 << 12), TrainingError);

    std::vector<TextPair> unlabeled = {{"a", "b", PairLabel::positive}, {"c", "d", std::nullopt}};
    CHECK_THROWS_AS(train(unlabeled, hyper, 1 << 12), TrainingError);
}

TEST_CASE("a trained scorer generalizes to held-out planted pairs") {
    const auto pairs = synth::separable_pairs(200, 9);
    TrainHyper hyper;
    hyper.seed = 9;
    const auto scorer = train(pairs, hyper, 1 << 14);

    // Held-out pairs built the same way the fixture builds them.
    const auto holdout = synth::separable_pairs(40, 123);
    std::size_t correct = 0;
    for (const auto& pair : holdout) {
        const bool predicted = scorer.score_text(pair.left, pair.right) >= 0.5;
        if (predicted == (pair.label == PairLabel::positive)) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(holdout.size()) >= 0.9);
}

TEST_CASE("external score tables return stored values or the default") {
    ExternalScoreTable table;
    table.insert("q1", "c1", 0.9);
    CHECK(table.size() == 1);
    CHECK(table.contains("q1", "c1"));
    CHECK_FALSE(table.contains("q1", "c2"));
    CHECK(table.score({"q1", "c1", "", ""}) == doctest::Approx(0.9));
    CHECK(table.score({"q1", "c2", "", ""}) == doctest::Approx(0.0));

    ExternalScoreTable with_default(0.25);
    CHECK(with_default.score({"q", "c", "", ""}) == doctest::Approx(0.25));

    CHECK_THROWS_AS(table.insert("q", "c", 1.5), RangeError);
    CHECK_THROWS_AS(table.insert("q", "c", -0.1), RangeError);
    CHECK_THROWS_AS(ExternalScoreTable(2.0), RangeError);
}

TEST_CASE("score files load entry by entry") {
    testutil::TempDir dir;
    testutil::write_file(dir.file("ok.tsv"), "q1\tc1\t0.73\n");
    const auto table = load_external_scores(dir.file("ok.tsv"));
    CHECK(table.size() == 1);
    CHECK(table.score({"q1", "c1", "", ""}) == doctest::Approx(0.73));

    testutil::write_file(dir.file("range.tsv"), "q1\tc1\t1.5\n");
    CHECK_THROWS_AS(load_external_scores(dir.file("range.tsv")), RangeError);

    testutil::write_file(dir.file("short.tsv"), "q1\tc1\t0.5\nq2 c2 0.5\n");
    try {
        load_external_scores(dir.file("short.tsv"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }

    testutil::write_file(dir.file("nan.tsv"), "q1\tc1\tabc\n");
    CHECK_THROWS_AS(load_external_scores(dir.file("nan.tsv")), ParseError);

    CHECK_THROWS_AS(load_external_scores(dir.file("missing.tsv")), IoError);
}

TEST_CASE("large score files keep every generated entry") {
    testutil::TempDir dir;
    std::string content;
    SplitMix64 gen(17);
    std::vector<double> values;
    for (int i = 0; i < 1000; ++i) {
        const double v = static_cast<double>(gen.next_below(1000)) / 1000.0;
        values.push_back(v);
        content += "q" + std::to_string(i / 10) + "\tc" + std::to_string(i % 10) + "\t" +
                   std::to_string(v) + "\n";
    }
    // 100 queries x 10 candidates: all keys distinct.
    testutil::write_file(dir.file("big.tsv"), content);
    const auto table = load_external_scores(dir.file("big.tsv"));
    CHECK(table.size() == 1000);
    for (int i : {0, 1, 499, 999}) {
        const std::string q = "q" + std::to_string(i / 10);
        const std::string c = "c" + std::to_string(i % 10);
        CHECK(table.score({q, c, "", ""}) == doctest::Approx(values[i]).epsilon(1e-6));
    }
}

TEST_CASE("the analytic gradient matches finite differences") {
    SplitMix64 gen(21);
    std::vector<FeatureVector> features;
    std::vector<bool> positive;
    const std::size_t dim = 32;
    for (int i = 0; i < 12; ++i) {
        FeatureVector f;
        for (int j = 0; j < 5; ++j) {
            f[static_cast<std::uint32_t>(gen.next_below(dim))] += gen.next_double() * 2.0 - 0.5;
        }
        features.push_back(f);
        positive.push_back(gen.next_below(2) == 1);
    }

    for (int point = 0; point < 5; ++point) {
        std::vector<double> weights(dim);
        for (auto& w : weights) w = gen.next_double() * 2.0 - 1.0;
        const double bias = gen.next_double() - 0.5;

        std::vector<double> grad;
        double grad_bias = 0.0;
        dataset_gradient(features, positive, weights, bias, grad, grad_bias);

        const double h = 1e-6;
        for (std::size_t slot = 0; slot < dim; ++slot) {
            auto plus = weights, minus = weights;
            plus[slot] += h;
            minus[slot] -= h;
            const double numeric = (dataset_loss(features, positive, plus, bias) -
                                    dataset_loss(features, positive, minus, bias)) /
                                   (2.0 * h);
            const double scale = std::max({std::abs(numeric), std::abs(grad[slot]), 1e-8});
            CHECK(std::abs(numeric - grad[slot]) / scale < 1e-5);
        }
        const double numeric_bias = (dataset_loss(features, positive, weights, bias + h) -
                                     dataset_loss(features, positive, weights, bias - h)) /
                                    (2.0 * h);
        const double scale = std::max({std::abs(numeric_bias), std::abs(grad_bias), 1e-8});
        CHECK(std::abs(numeric_bias - grad_bias) / scale < 1e-5);
    }
}

TEST_CASE("scorer persistence round-trips bit-exactly") {
    testutil::TempDir dir;
    const auto pairs = synth::separable_pairs(80, 13);
    TrainHyper hyper;
    hyper.seed = 13;
    const auto scorer = train(pairs, hyper, 1 << 12, 99);

    scorer.save(dir.file("s.bin"));
    scorer.save(dir.file("s2.bin"));
    const auto bytes = testutil::read_file(dir.file("s.bin"));
    CHECK(bytes == testutil::read_file(dir.file("s2.bin")));
    CHECK(bytes.substr(0, 5) == "LPSC1");

    const auto loaded = LinearPairScorer::load(dir.file("s.bin"));
    CHECK(loaded.dim() == scorer.dim());
    CHECK(loaded.hash_seed() == scorer.hash_seed());
    CHECK(loaded.bias() == scorer.bias());
    CHECK(loaded.trained_epochs() == scorer.trained_epochs());
    CHECK(loaded.weights() == scorer.weights());
    CHECK(loaded.score_text(pairs[0].left, pairs[0].right) ==
          scorer.score_text(pairs[0].left, pairs[0].right));

    // Saving the reloaded scorer reproduces the original file.
    loaded.save(dir.file("s3.bin"));
    CHECK(testutil::read_file(dir.file("s3.bin")) == bytes);
}
