#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "legalir/error.hpp"
#include "legalir/eval.hpp"
#include "legalir/rng.hpp"

using namespace legalir;
using namespace legalir::eval;

namespace {

// Second opinion for the aggregate tests: count-based micro pooling and a
// straight per-query average for macro.
MetricsReport naive_aggregate(const std::vector<QueryJudgment>& judgments, Aggregation mode) {
    MetricsReport report;
    report.aggregation = mode;
    double sum_p = 0.0, sum_r = 0.0;
    std::size_t pooled_hits = 0, pooled_pred = 0, pooled_gold = 0, used = 0;
    for (const auto& j : judgments) {
        if (j.gold.empty()) continue;
        ++used;
        std::size_t hits = 0;
        for (const auto& id : j.predicted) hits += j.gold.count(id);
        sum_p += j.predicted.empty() ? 0.0
                                     : static_cast<double>(hits) /
                                           static_cast<double>(j.predicted.size());
        sum_r += static_cast<double>(hits) / static_cast<double>(j.gold.size());
        pooled_hits += hits;
        pooled_pred += j.predicted.size();
        pooled_gold += j.gold.size();
    }
    double p = 0.0, r = 0.0;
    if (mode == Aggregation::macro) {
        p = sum_p / static_cast<double>(used);
        r = sum_r / static_cast<double>(used);
    } else {
        p = pooled_pred == 0 ? 0.0
                             : static_cast<double>(pooled_hits) / static_cast<double>(pooled_pred);
        r = static_cast<double>(pooled_hits) / static_cast<double>(pooled_gold);
    }
    report.precision = p;
    report.recall = r;
    report.f1 = fbeta(p, r, 1.0);
    report.f2 = fbeta(p, r, 2.0);
    return report;
}

}  // namespace

TEST_CASE("set precision, recall and F-measures") {
    const auto prf = set_prf({"a", "b", "c"}, {"b", "c", "d", "e"});
    CHECK(prf.precision == doctest::Approx(2.0 / 3.0));
    CHECK(prf.recall == doctest::Approx(2.0 / 4.0));
    CHECK(prf.f1 == doctest::Approx(fbeta(2.0 / 3.0, 0.5, 1.0)));
    CHECK(prf.f2 == doctest::Approx(fbeta(2.0 / 3.0, 0.5, 2.0)));

    // Empty predictions score zero precision, never a division error.
    const auto empty_pred = set_prf({}, {"a"});
    CHECK(empty_pred.precision == 0.0);
    CHECK(empty_pred.recall == 0.0);
    CHECK(empty_pred.f1 == 0.0);
    CHECK(empty_pred.f2 == 0.0);

    CHECK_THROWS_AS(set_prf({"a"}, {}), ArgumentError);
}

TEST_CASE("F-measures reproduce published aggregate values") {
    CHECK(std::abs(fbeta(0.4071, 0.7579, 1.0) - 0.5297) < 5e-4);
    CHECK(std::abs(fbeta(0.5500, 0.6111, 2.0) - 0.5978) < 5e-4);
    CHECK(fbeta(0.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("F1 equals F2 when precision equals recall") {
    SplitMix64 gen(2);
    for (int i = 0; i < 25; ++i) {
        const double x = gen.next_double();
        CHECK(fbeta(x, x, 1.0) == doctest::Approx(x).epsilon(1e-12));
        CHECK(fbeta(x, x, 2.0) == doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("F2 leans toward recall") {
    SplitMix64 gen(3);
    for (int i = 0; i < 50; ++i) {
        const double p = 0.05 + gen.next_double() * 0.9;
        double r = 0.05 + gen.next_double() * 0.9;
        if (p == r) r += 0.01;
        const double f1 = fbeta(p, r, 1.0);
        const double f2 = fbeta(p, r, 2.0);
        if (p < r) CHECK(f2 > f1);
        if (p > r) CHECK(f2 < f1);
        CHECK(f1 <= std::max(p, r) + 1e-12);
        CHECK(f2 <= std::max(p, r) + 1e-12);
    }
}

TEST_CASE("accuracy is a plain ratio with guarded input") {
    CHECK(std::abs(accuracy(81, 112) - 0.7232) < 5e-5);
    CHECK(accuracy(0, 7) == 0.0);
    CHECK(accuracy(7, 7) == 1.0);
    CHECK_THROWS_AS(accuracy(1, 0), ArgumentError);
    CHECK_THROWS_AS(accuracy(5, 4), ArgumentError);
}

TEST_CASE("average precision handles the textbook cases") {
    CHECK(average_precision({"d1", "d2"}, {"d2"}) == doctest::Approx(0.5));
    CHECK(average_precision({"d1", "d2", "d3"}, {"d1", "d2"}) == doctest::Approx(1.0));
    // Gold absent from the ranking contributes nothing.
    CHECK(average_precision({"d1"}, {"d1", "missing"}) == doctest::Approx(0.5));
    CHECK(average_precision({}, {"d1"}) == 0.0);
    CHECK_THROWS_AS(average_precision({"d1"}, {}), ArgumentError);
}

TEST_CASE("average precision equals brute-force enumeration on permutations") {
    std::vector<std::string> ranked = {"c0", "c1", "c2", "c3", "c4", "c5", "c6", "c7"};
    const std::set<std::string> gold = {"c1", "c4", "c6"};
    SplitMix64 gen(12);
    for (int trial = 0; trial < 40; ++trial) {
        shuffle(ranked, gen);
        // Direct definition: AP = (1/|gold|) sum over ranks r holding gold of
        // (gold seen in top r) / r.
        double expected = 0.0;
        std::size_t seen = 0;
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            if (gold.count(ranked[r]) != 0) {
                ++seen;
                expected += static_cast<double>(seen) / static_cast<double>(r + 1);
            }
        }
        expected /= static_cast<double>(gold.size());
        CHECK(average_precision(ranked, gold) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("average precision ignores shuffling below the last gold hit") {
    const std::vector<std::string> base = {"g1", "x1", "g2", "x2", "x3", "x4"};
    const std::set<std::string> gold = {"g1", "g2"};
    const double reference = average_precision(base, gold);
    CHECK(average_precision({"g1", "x1", "g2", "x3", "x4", "x2"}, gold) ==
          doctest::Approx(reference));
    CHECK(average_precision({"g1", "x1", "g2", "x4", "x2", "x3"}, gold) ==
          doctest::Approx(reference));
}

TEST_CASE("recall at k counts gold inside the prefix") {
    const std::vector<std::string> ranked = {"a", "x", "y", "z", "w", "b"};
    CHECK(recall_at_k(ranked, {"a", "b"}, 5) == doctest::Approx(0.5));
    CHECK(recall_at_k(ranked, {"a", "b"}, 6) == doctest::Approx(1.0));
    CHECK(recall_at_k(ranked, {"a", "b"}, 100) == doctest::Approx(1.0));
    CHECK_THROWS_AS(recall_at_k(ranked, {}, 5), ArgumentError);

    double previous = 0.0;
    for (std::size_t k = 1; k <= ranked.size(); ++k) {
        const double r = recall_at_k(ranked, {"a", "b"}, k);
        CHECK(r >= previous);
        previous = r;
    }

    // Brute-force equivalence on a random fixture.
    SplitMix64 gen(6);
    std::vector<std::string> ids;
    for (int i = 0; i < 12; ++i) ids.push_back("c" + std::to_string(i));
    shuffle(ids, gen);
    const std::set<std::string> gold = {"c2", "c5", "c7", "c11"};
    for (std::size_t k = 1; k <= ids.size(); ++k) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < k; ++i) hits += gold.count(ids[i]);
        CHECK(recall_at_k(ids, gold, k) ==
              doctest::Approx(static_cast<double>(hits) / static_cast<double>(gold.size())));
    }
}

TEST_CASE("single-query aggregation is the same under both conventions") {
    QueryJudgment j;
    j.query_id = "q";
    j.gold = {"a", "b"};
    j.predicted = {"a", "c"};
    const auto macro = evaluate_run({j}, Aggregation::macro);
    const auto micro = evaluate_run({j}, Aggregation::micro);
    CHECK(*macro.precision == doctest::Approx(*micro.precision));
    CHECK(*macro.recall == doctest::Approx(*micro.recall));
    CHECK(*macro.f1 == doctest::Approx(*micro.f1));
    CHECK(*macro.f2 == doctest::Approx(*micro.f2));
    CHECK(macro.query_count == 1);
}

TEST_CASE("macro averages per-query scores while micro pools pairs") {
    QueryJudgment perfect;
    perfect.query_id = "q1";
    perfect.gold = {"a", "b"};
    perfect.predicted = {"a", "b"};
    QueryJudgment miss;
    miss.query_id = "q2";
    miss.gold = {"c", "d"};
    miss.predicted = {"x", "y"};

    const auto macro = evaluate_run({perfect, miss}, Aggregation::macro);
    CHECK(*macro.precision == doctest::Approx(0.5));
    CHECK(*macro.recall == doctest::Approx(0.5));
    CHECK(*macro.f1 == doctest::Approx(0.5));

    const auto micro = evaluate_run({perfect, miss}, Aggregation::micro);
    CHECK(*micro.precision == doctest::Approx(2.0 / 4.0));
    CHECK(*micro.recall == doctest::Approx(2.0 / 4.0));

    // Unequal pool sizes pull micro away from macro.
    QueryJudgment big;
    big.query_id = "q3";
    big.gold = {"e1", "e2", "e3", "e4", "e5", "e6"};
    big.predicted = {"e1", "e2", "e3", "e4", "e5", "e6"};
    const auto macro3 = evaluate_run({perfect, miss, big}, Aggregation::macro);
    const auto micro3 = evaluate_run({perfect, miss, big}, Aggregation::micro);
    CHECK(*macro3.precision == doctest::Approx(2.0 / 3.0));
    CHECK(*micro3.precision == doctest::Approx(8.0 / 10.0));
}

TEST_CASE("aggregation matches an independent recomputation on random runs") {
    SplitMix64 gen(20);
    std::vector<QueryJudgment> judgments;
    for (int q = 0; q < 20; ++q) {
        QueryJudgment j;
        j.query_id = "q" + std::to_string(q);
        for (std::size_t i = 0; i < 1 + gen.next_below(5); ++i) {
            j.gold.insert("d" + std::to_string(gen.next_below(12)));
        }
        for (std::size_t i = 0; i < gen.next_below(6); ++i) {
            j.predicted.insert("d" + std::to_string(gen.next_below(12)));
        }
        judgments.push_back(j);
    }
    for (const auto mode : {Aggregation::macro, Aggregation::micro}) {
        const auto got = evaluate_run(judgments, mode);
        const auto want = naive_aggregate(judgments, mode);
        CHECK(*got.precision == doctest::Approx(*want.precision).epsilon(1e-12));
        CHECK(*got.recall == doctest::Approx(*want.recall).epsilon(1e-12));
        CHECK(*got.f1 == doctest::Approx(*want.f1).epsilon(1e-12));
        CHECK(*got.f2 == doctest::Approx(*want.f2).epsilon(1e-12));
        CHECK(got.query_count == 20);
    }
}

TEST_CASE("queries without gold are skipped and tallied") {
    QueryJudgment scored;
    scored.query_id = "q1";
    scored.gold = {"a"};
    scored.predicted = {"a"};
    QueryJudgment no_gold;
    no_gold.query_id = "q2";
    no_gold.predicted = {"b"};

    const auto report = evaluate_run({scored, no_gold});
    CHECK(report.query_count == 1);
    CHECK(report.skipped_empty_gold == 1);
    CHECK(*report.precision == doctest::Approx(1.0));
    CHECK(report.per_query.count("q2") == 0);
}

TEST_CASE("ranked judgments produce MAP and recall depths") {
    QueryJudgment j1;
    j1.query_id = "q1";
    j1.gold = {"a"};
    j1.predicted = {"a"};
    j1.ranked = std::vector<std::string>{"a", "b", "c"};
    QueryJudgment j2;
    j2.query_id = "q2";
    j2.gold = {"c"};
    j2.predicted = {"b"};
    j2.ranked = std::vector<std::string>{"b", "c", "d"};

    const auto report = evaluate_run({j1, j2});
    REQUIRE(report.map.has_value());
    CHECK(*report.map == doctest::Approx((1.0 + 0.5) / 2.0));
    REQUIRE(report.r5.has_value());
    CHECK(*report.r5 == doctest::Approx(1.0));

    std::size_t skipped = 0;
    CHECK(mean_average_precision({j1, j2}, &skipped) == doctest::Approx(0.75));
    CHECK(skipped == 0);

    // Judgments without rankings fall out of MAP.
    QueryJudgment unranked;
    unranked.query_id = "q3";
    unranked.gold = {"z"};
    unranked.predicted = {"z"};
    CHECK(mean_average_precision({j1, j2, unranked}, &skipped) == doctest::Approx(0.75));
    CHECK(skipped == 1);

    const auto mixed = evaluate_run({j1, j2, unranked});
    CHECK(*mixed.map == doctest::Approx(0.75));
}

TEST_CASE("reports serialize to JSON and a result table") {
    QueryJudgment j;
    j.query_id = "q1";
    j.gold = {"a", "b"};
    j.predicted = {"a"};
    j.ranked = std::vector<std::string>{"a", "x", "b"};
    const auto report = evaluate_run({j});

    const auto parsed = nlohmann::json::parse(report_json(report));
    CHECK(parsed["aggregation"] == "macro");
    CHECK(parsed["precision"].get<double>() == doctest::Approx(*report.precision));
    CHECK(parsed["recall"].get<double>() == doctest::Approx(*report.recall));
    CHECK(parsed["f1"].get<double>() == doctest::Approx(*report.f1));
    CHECK(parsed["query_count"] == 1);

    const auto table = report_markdown(report);
    CHECK(table.find("Prec") != std::string::npos);
    CHECK(table.find("Recall") != std::string::npos);
    CHECK(table.find("|") != std::string::npos);
}
