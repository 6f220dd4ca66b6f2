#include "legalir/eval.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir::eval {

namespace {

std::size_t intersection_size(const std::set<std::string>& a, const std::set<std::string>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    std::size_t n = 0;
    for (const auto& id : small) {
        n += large.count(id);
    }
    return n;
}

}  // namespace

double fbeta(double precision, double recall, double beta) {
    if (beta <= 0.0) {
        throw ArgumentError("fbeta: beta must be positive");
    }
    const double b2 = beta * beta;
    const double denom = b2 * precision + recall;
    if (denom == 0.0) {
        return 0.0;
    }
    return (1.0 + b2) * precision * recall / denom;
}

SetPrf set_prf(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
    if (gold.empty()) {
        throw ArgumentError("set_prf: gold set is empty, recall undefined");
    }
    const std::size_t hits = intersection_size(predicted, gold);
    SetPrf out;
    out.precision = predicted.empty()
                        ? 0.0
                        : static_cast<double>(hits) / static_cast<double>(predicted.size());
    out.recall = static_cast<double>(hits) / static_cast<double>(gold.size());
    out.f1 = fbeta(out.precision, out.recall, 1.0);
    out.f2 = fbeta(out.precision, out.recall, 2.0);
    return out;
}

double accuracy(std::size_t correct, std::size_t total) {
    if (total == 0) {
        throw ArgumentError("accuracy: total must be at least 1");
    }
    if (correct > total) {
        throw ArgumentError("accuracy: correct exceeds total");
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& gold) {
    if (gold.empty()) {
        throw ArgumentError("average_precision: gold set is empty");
    }
    std::size_t hits = 0;
    double sum = 0.0;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (gold.count(ranked[i]) != 0 && seen.insert(ranked[i]).second) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(gold.size());
}

double mean_average_precision(const std::vector<QueryJudgment>& judgments, std::size_t* skipped) {
    double sum = 0.0;
    std::size_t used = 0;
    std::size_t dropped = 0;
    for (const auto& judgment : judgments) {
        if (!judgment.ranked.has_value() || judgment.gold.empty()) {
            ++dropped;
            continue;
        }
        sum += average_precision(*judgment.ranked, judgment.gold);
        ++used;
    }
    if (skipped != nullptr) {
        *skipped = dropped;
    }
    if (used == 0) {
        throw ArgumentError("mean_average_precision: no judgment has a ranking and gold ids");
    }
    return sum / static_cast<double>(used);
}

double recall_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& gold,
                   std::size_t k) {
    if (gold.empty()) {
        throw ArgumentError("recall_at_k: gold set is empty");
    }
    if (k == 0) {
        throw ArgumentError("recall_at_k: k must be at least 1");
    }
    const std::size_t limit = std::min(k, ranked.size());
    std::set<std::string> seen;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < limit; ++i) {
        if (gold.count(ranked[i]) != 0 && seen.insert(ranked[i]).second) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

MetricsReport evaluate_run(const std::vector<QueryJudgment>& judgments, Aggregation aggregation) {
    if (judgments.empty()) {
        throw ArgumentError("evaluate_run: no judgments");
    }
    MetricsReport report;
    report.aggregation = aggregation;

    double precision_sum = 0.0;
    double recall_sum = 0.0;
    std::size_t pooled_hits = 0;
    std::size_t pooled_predicted = 0;
    std::size_t pooled_gold = 0;

    double map_sum = 0.0, r5_sum = 0.0, r10_sum = 0.0, r30_sum = 0.0;
    std::size_t ranked_count = 0;

    for (const auto& judgment : judgments) {
        if (judgment.gold.empty()) {
            ++report.skipped_empty_gold;
            continue;
        }
        const SetPrf prf = set_prf(judgment.predicted, judgment.gold);
        PerQueryMetrics per;
        per.prf = prf;
        precision_sum += prf.precision;
        recall_sum += prf.recall;
        pooled_hits += intersection_size(judgment.predicted, judgment.gold);
        pooled_predicted += judgment.predicted.size();
        pooled_gold += judgment.gold.size();
        if (judgment.ranked.has_value()) {
            per.ap = average_precision(*judgment.ranked, judgment.gold);
            map_sum += *per.ap;
            r5_sum += recall_at_k(*judgment.ranked, judgment.gold, 5);
            r10_sum += recall_at_k(*judgment.ranked, judgment.gold, 10);
            r30_sum += recall_at_k(*judgment.ranked, judgment.gold, 30);
            ++ranked_count;
        }
        report.per_query.emplace(judgment.query_id, std::move(per));
        ++report.query_count;
    }
    if (report.query_count == 0) {
        throw ArgumentError("evaluate_run: every judgment had an empty gold set");
    }

    if (aggregation == Aggregation::macro) {
        const double n = static_cast<double>(report.query_count);
        report.precision = precision_sum / n;
        report.recall = recall_sum / n;
    } else {
        report.precision = pooled_predicted == 0 ? 0.0
                                                 : static_cast<double>(pooled_hits) /
                                                       static_cast<double>(pooled_predicted);
        report.recall =
            static_cast<double>(pooled_hits) / static_cast<double>(pooled_gold);
    }
    report.f1 = fbeta(*report.precision, *report.recall, 1.0);
    report.f2 = fbeta(*report.precision, *report.recall, 2.0);

    if (ranked_count > 0) {
        const double n = static_cast<double>(ranked_count);
        report.map = map_sum / n;
        report.r5 = r5_sum / n;
        report.r10 = r10_sum / n;
        report.r30 = r30_sum / n;
    }
    return report;
}

namespace {

void put_optional(nlohmann::ordered_json& object, const char* key,
                  const std::optional<double>& value) {
    if (value.has_value()) {
        object[key] = *value;
    } else {
        object[key] = nullptr;
    }
}

std::string fixed4(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

}  // namespace

std::string report_json(const MetricsReport& report) {
    nlohmann::ordered_json object;
    put_optional(object, "precision", report.precision);
    put_optional(object, "recall", report.recall);
    put_optional(object, "f1", report.f1);
    put_optional(object, "f2", report.f2);
    put_optional(object, "map", report.map);
    put_optional(object, "r5", report.r5);
    put_optional(object, "r10", report.r10);
    put_optional(object, "r30", report.r30);
    put_optional(object, "accuracy", report.accuracy);
    object["aggregation"] = report.aggregation == Aggregation::macro ? "macro" : "micro";
    object["query_count"] = report.query_count;
    object["skipped_empty_gold"] = report.skipped_empty_gold;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [query_id, metrics] : report.per_query) {
        nlohmann::ordered_json row;
        row["precision"] = metrics.prf.precision;
        row["recall"] = metrics.prf.recall;
        row["f1"] = metrics.prf.f1;
        row["f2"] = metrics.prf.f2;
        if (metrics.ap.has_value()) {
            row["ap"] = *metrics.ap;
        }
        per[query_id] = std::move(row);
    }
    object["per_query"] = std::move(per);
    return object.dump(2) + "\n";
}

std::string report_markdown(const MetricsReport& report) {
    std::vector<std::pair<std::string, std::optional<double>>> columns = {
        {"Prec", report.precision}, {"Recall", report.recall}, {"F1", report.f1},
        {"F2", report.f2},          {"MAP", report.map},       {"R5", report.r5},
        {"R10", report.r10},        {"R30", report.r30},       {"Accuracy", report.accuracy},
    };
    std::string header = "|";
    std::string rule = "|";
    std::string row = "|";
    for (const auto& [name, value] : columns) {
        if (!value.has_value()) {
            continue;
        }
        header += " " + name + " |";
        rule += "------|";
        row += " " + fixed4(*value) + " |";
    }
    std::string out = header + "\n" + rule + "\n" + row + "\n";
    out += "\nAggregation: ";
    out += report.aggregation == Aggregation::macro ? "macro" : "micro";
    out += "; queries: " + std::to_string(report.query_count);
    if (report.skipped_empty_gold > 0) {
        out += "; skipped (empty gold): " + std::to_string(report.skipped_empty_gold);
    }
    out += "\n";
    return out;
}

}  // namespace legalir::eval
