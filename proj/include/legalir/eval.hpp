#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace legalir::eval {

struct QueryJudgment {
    std::string query_id;
    std::set<std::string> gold;
    std::set<std::string> predicted;
    std::optional<std::vector<std::string>> ranked;  // full ordering, when the run kept one
};

struct SetPrf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

// P = |pred ∩ gold| / |pred| (0 for empty pred), R = |pred ∩ gold| / |gold|.
// Throws ArgumentError when gold is empty (recall undefined; skip the query).
SetPrf set_prf(const std::set<std::string>& predicted, const std::set<std::string>& gold);

// (1+β²)PR / (β²P + R); 0 when the denominator vanishes.
double fbeta(double precision, double recall, double beta);

double accuracy(std::size_t correct, std::size_t total);

// AP = (1/|gold|) Σ over gold ids found at rank r of (gold hits in top r)/r.
// Gold ids absent from the ranking contribute nothing.
double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& gold);

// Mean AP over judgments that carry a ranking and a non-empty gold set;
// everything else is skipped and tallied into *skipped when given.
double mean_average_precision(const std::vector<QueryJudgment>& judgments,
                              std::size_t* skipped = nullptr);

double recall_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& gold,
                   std::size_t k);

enum class Aggregation { macro, micro };

struct PerQueryMetrics {
    SetPrf prf;
    std::optional<double> ap;
};

struct MetricsReport {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> f2;
    std::optional<double> map;
    std::optional<double> r5;
    std::optional<double> r10;
    std::optional<double> r30;
    std::optional<double> accuracy;
    Aggregation aggregation = Aggregation::macro;
    std::size_t query_count = 0;       // queries that entered the aggregate
    std::size_t skipped_empty_gold = 0;
    std::map<std::string, PerQueryMetrics> per_query;
};

// macro: average per-query P and R, then Fβ of the averages.
// micro: pool every (query, id) pair and compute P/R/Fβ once.
// Queries with empty gold are skipped and counted, never scored as zero.
MetricsReport evaluate_run(const std::vector<QueryJudgment>& judgments,
                           Aggregation aggregation = Aggregation::macro);

std::string report_json(const MetricsReport& report);
std::string report_markdown(const MetricsReport& report);

}  // namespace legalir::eval
