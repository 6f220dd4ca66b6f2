#include "legalir/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "legalir/corpus.hpp"
#include "legalir/entail.hpp"
#include "legalir/error.hpp"
#include "legalir/eval.hpp"
#include "legalir/rng.hpp"

namespace legalir::config {

namespace {

const std::map<std::string, Task, std::less<>>& task_table() {
    static const std::map<std::string, Task, std::less<>> table = {
        {"task1", Task::task1},
        {"task2", Task::task2},
        {"task3", Task::task3},
        {"task4-entail", Task::task4_entail},
        {"task4-lawful", Task::task4_lawful},
        {"stats", Task::stats},
        {"sweep-k", Task::sweep_k},
        {"eval", Task::eval},
    };
    return table;
}

}  // namespace

Task parse_task(std::string_view name) {
    const auto it = task_table().find(name);
    if (it == task_table().end()) {
        throw ConfigError("unknown task: " + std::string(name));
    }
    return it->second;
}

std::string_view task_name(Task task) {
    for (const auto& [name, value] : task_table()) {
        if (value == task) {
            return name;
        }
    }
    throw ConfigError("unnamed task value");
}

namespace {

std::string trimmed(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

double parse_real(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const double parsed = std::stod(value, &consumed);
        if (consumed == value.size()) {
            return parsed;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': not a number: " + value);
}

std::size_t parse_count(const std::string& value, const std::string& key, std::size_t minimum) {
    try {
        std::size_t consumed = 0;
        const long long parsed = std::stoll(value, &consumed);
        if (consumed == value.size() && parsed >= 0 &&
            static_cast<std::size_t>(parsed) >= minimum) {
            return static_cast<std::size_t>(parsed);
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected an integer >= " + std::to_string(minimum) +
                      ", got: " + value);
}

std::uint64_t parse_seed(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const unsigned long long parsed = std::stoull(value, &consumed);
        if (consumed == value.size()) {
            return parsed;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected an unsigned integer, got: " + value);
}

double parse_unit_real(const std::string& value, const std::string& key) {
    const double parsed = parse_real(value, key);
    if (!(parsed >= 0.0 && parsed <= 1.0)) {
        throw RangeError("key '" + key + "': value outside [0, 1]: " + value);
    }
    return parsed;
}

std::vector<std::size_t> parse_count_list(const std::string& value, const std::string& key) {
    std::vector<std::size_t> out;
    std::stringstream stream{value};
    std::string item;
    while (std::getline(stream, item, ',')) {
        out.push_back(parse_count(trimmed(item), key, 1));
    }
    if (out.empty()) {
        throw ConfigError("key '" + key + "': empty list");
    }
    return out;
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "task") {
        config.task = parse_task(value);
    } else if (key == "cases") {
        config.cases = value;
    } else if (key == "articles") {
        config.articles = value;
    } else if (key == "questions") {
        config.questions = value;
    } else if (key == "queries") {
        config.queries = value;
    } else if (key == "scorer") {
        config.scorer = value;
    } else if (key == "scores") {
        config.scores = value;
    } else if (key == "predictions") {
        config.predictions = value;
    } else if (key == "out") {
        config.output_dir = value;
    } else if (key == "alpha") {
        config.fusion.alpha = parse_unit_real(value, key);
    } else if (key == "top_n") {
        config.fusion.top_n = parse_count(value, key, 1);
    } else if (key == "normalization") {
        if (value == "minmax") {
            config.fusion.normalization = pipelines::Normalization::minmax_per_query;
        } else if (value == "none") {
            config.fusion.normalization = pipelines::Normalization::none;
        } else {
            throw ConfigError("key 'normalization': expected minmax or none, got: " + value);
        }
    } else if (key == "selection") {
        if (value == "threshold") {
            config.fusion.selection.kind = pipelines::Selection::Kind::threshold;
        } else if (value == "fixed_k") {
            config.fusion.selection.kind = pipelines::Selection::Kind::fixed_k;
        } else {
            throw ConfigError("key 'selection': expected threshold or fixed_k, got: " + value);
        }
    } else if (key == "tau") {
        config.fusion.selection.tau = parse_unit_real(value, key);
    } else if (key == "selection_k") {
        config.fusion.selection.k = parse_count(value, key, 1);
    } else if (key == "aggregation") {
        if (value != "max" && value != "mean_top_m") {
            throw ConfigError("key 'aggregation': expected max or mean_top_m, got: " + value);
        }
        config.aggregation = value;
    } else if (key == "mean_top_m") {
        config.mean_top_m = parse_count(value, key, 1);
    } else if (key == "k") {
        config.k = parse_count(value, key, 1);
    } else if (key == "k_values") {
        config.k_values = parse_count_list(value, key);
    } else if (key == "threshold") {
        config.decision_threshold = parse_unit_real(value, key);
    } else if (key == "eval_aggregation") {
        if (value != "macro" && value != "micro") {
            throw ConfigError("key 'eval_aggregation': expected macro or micro, got: " + value);
        }
        config.eval_aggregation = value;
    } else if (key == "seed") {
        config.seed = parse_seed(value, key);
    } else {
        throw ConfigError("unknown key: " + key);
    }
}

}  // namespace

RunConfig parse_config_text(std::string_view text, std::string_view origin, bool strict,
                            std::vector<std::string>* warnings) {
    RunConfig config;
    std::stringstream stream{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const std::string stripped = trimmed(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        const std::string where = std::string(origin) + ":" + std::to_string(lineno);
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected key=value");
        }
        const std::string key = trimmed(stripped.substr(0, eq));
        const std::string value = trimmed(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(where + ": empty key");
        }
        try {
            apply_key(config, key, value);
        } catch (const ConfigError& e) {
            const std::string message = e.what();
            if (!strict && message.rfind("unknown key:", 0) == 0) {
                if (warnings != nullptr) {
                    warnings->push_back(where + ": " + message);
                }
                continue;
            }
            throw ConfigError(where + ": " + message);
        } catch (const RangeError& e) {
            throw RangeError(where + ": " + e.what());
        }
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path, bool strict,
                      std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string(), strict, warnings);
}

namespace {

std::string format_real(double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    return out.str();
}

std::map<std::string, std::string> config_entries(const RunConfig& config) {
    std::map<std::string, std::string> entries;
    entries["task"] = std::string(task_name(config.task));
    entries["cases"] = config.cases;
    entries["articles"] = config.articles;
    entries["questions"] = config.questions;
    entries["queries"] = config.queries;
    entries["scorer"] = config.scorer;
    entries["scores"] = config.scores;
    entries["predictions"] = config.predictions;
    entries["out"] = config.output_dir;
    entries["alpha"] = format_real(config.fusion.alpha);
    entries["top_n"] = std::to_string(config.fusion.top_n);
    entries["normalization"] =
        config.fusion.normalization == pipelines::Normalization::minmax_per_query ? "minmax"
                                                                                  : "none";
    entries["selection"] =
        config.fusion.selection.kind == pipelines::Selection::Kind::threshold ? "threshold"
                                                                              : "fixed_k";
    entries["tau"] = format_real(config.fusion.selection.tau);
    entries["selection_k"] = std::to_string(config.fusion.selection.k);
    entries["aggregation"] = config.aggregation;
    entries["mean_top_m"] = std::to_string(config.mean_top_m);
    entries["k"] = std::to_string(config.k);
    std::string k_values;
    for (const std::size_t k : config.k_values) {
        if (!k_values.empty()) {
            k_values += ",";
        }
        k_values += std::to_string(k);
    }
    entries["k_values"] = k_values;
    entries["threshold"] = format_real(config.decision_threshold);
    entries["eval_aggregation"] = config.eval_aggregation;
    entries["seed"] = std::to_string(config.seed);
    return entries;
}

}  // namespace

std::string canonical_config(const RunConfig& config) {
    std::string out;
    for (const auto& [key, value] : config_entries(config)) {
        out += key;
        out += "=";
        out += value;
        out += "\n";
    }
    return out;
}

std::string config_hash(const RunConfig& config) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config(config))));
    return buffer;
}

std::string file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return out;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path temp = path.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open for writing: " + temp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw IoError("write failed: " + temp.string());
        }
    }
    std::filesystem::rename(temp, path);
}

namespace {

namespace fs = std::filesystem;

void require_key(const std::string& value, const char* key) {
    if (value.empty()) {
        throw ConfigError(std::string("missing required key: ") + key);
    }
}

std::vector<corpus::CaseDocument> load_cases(const std::string& path) {
    const auto format =
        fs::is_directory(path) ? corpus::CaseFormat::plaintext_dir : corpus::CaseFormat::jsonl;
    return corpus::parse_case_corpus(path, format);
}

std::vector<corpus::StatuteArticle> load_articles(const std::string& path) {
    if (fs::path(path).extension() == ".jsonl") {
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot open for reading: " + path);
        }
        return corpus::parse_articles_jsonl(in, path);
    }
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return corpus::parse_civil_code(buffer.str());
}

std::vector<corpus::BarQuestion> load_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    return corpus::parse_questions_jsonl(in, path);
}

std::vector<corpus::LabeledQuery> load_queries(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    return corpus::parse_queries_jsonl(in, path);
}

pipelines::ParagraphAggregation aggregation_of(const RunConfig& config) {
    if (config.aggregation == "max") {
        return pipelines::ParagraphAggregation::maximum();
    }
    return pipelines::ParagraphAggregation::mean_top(config.mean_top_m);
}

eval::Aggregation eval_aggregation_of(const RunConfig& config) {
    return config.eval_aggregation == "micro" ? eval::Aggregation::micro
                                              : eval::Aggregation::macro;
}

// Positive (question, gold article) pairs plus three sampled negatives per
// positive; the in-run substitute for an externally trained relevance model.
std::vector<pairscore::TextPair> question_article_pairs(
    const std::vector<corpus::BarQuestion>& questions,
    const std::vector<corpus::StatuteArticle>& articles, std::uint64_t seed) {
    std::map<std::string, const std::string*> content;
    for (const auto& article : articles) {
        content[article.id] = &article.content;
    }
    std::vector<pairscore::TextPair> pairs;
    for (const auto& question : questions) {
        if (question.relevant_article_ids.empty()) {
            continue;
        }
        std::set<std::string> gold(question.relevant_article_ids.begin(),
                                   question.relevant_article_ids.end());
        SplitMix64 gen(seed ^ fnv1a64(question.id));
        for (const auto& id : question.relevant_article_ids) {
            const auto it = content.find(id);
            if (it == content.end()) {
                throw LookupError("question '" + question.id + "' references unknown article '" +
                                  id + "'");
            }
            pairs.push_back({question.content, *it->second, pairscore::PairLabel::positive});
            for (std::size_t n = 0; n < 3; ++n) {
                const auto& negative = articles[gen.next_below(articles.size())];
                if (gold.count(negative.id) != 0) {
                    continue;
                }
                pairs.push_back(
                    {question.content, negative.content, pairscore::PairLabel::negative});
            }
        }
    }
    return pairs;
}

// (question, gold article) pairs labeled by the question's own Y/N label;
// the in-run substitute for an entailment model.
std::vector<pairscore::TextPair> entailment_pairs(
    const std::vector<corpus::BarQuestion>& questions,
    const std::vector<corpus::StatuteArticle>& articles) {
    std::map<std::string, const std::string*> content;
    for (const auto& article : articles) {
        content[article.id] = &article.content;
    }
    std::vector<pairscore::TextPair> pairs;
    for (const auto& question : questions) {
        if (!question.label.has_value()) {
            continue;
        }
        for (const auto& id : question.relevant_article_ids) {
            const auto it = content.find(id);
            if (it == content.end()) {
                throw LookupError("question '" + question.id + "' references unknown article '" +
                                  id + "'");
            }
            pairs.push_back({question.content, *it->second,
                             *question.label ? pairscore::PairLabel::positive
                                             : pairscore::PairLabel::negative});
        }
    }
    return pairs;
}

struct RunOutput {
    std::vector<std::pair<std::string, std::string>> artifacts;  // name -> content
    std::vector<std::pair<std::string, std::string>> inputs;     // path -> fingerprint
};

void note_input(RunOutput& output, const std::string& path) {
    if (!path.empty() && !fs::is_directory(path)) {
        output.inputs.emplace_back(path, file_fingerprint(path));
    }
}

std::string stats_report_json(const corpus::CorpusStats& stats) {
    nlohmann::ordered_json object;
    object["sample_count"] = stats.sample_count;
    object["candidate_count"] = stats.candidate_count;
    object["mean_words_per_doc"] = stats.mean_words_per_doc;
    object["mean_paragraphs_per_doc"] = stats.mean_paragraphs_per_doc;
    object["max_words"] = stats.max_words;
    object["max_paragraphs"] = stats.max_paragraphs;
    object["mean_gold_per_query"] = stats.mean_gold_per_query;
    object["histogram_bucket_width"] = stats.histogram_bucket_width;
    nlohmann::ordered_json histogram = nlohmann::ordered_json::object();
    for (const auto& [bucket, count] : stats.length_histogram) {
        histogram[std::to_string(bucket)] = count;
    }
    object["length_histogram"] = std::move(histogram);
    return object.dump(2) + "\n";
}

std::string stats_report_markdown(const corpus::CorpusStats& stats) {
    std::ostringstream out;
    out << "| Docs | Mean words | Mean paragraphs | Max words | Max paragraphs | Gold/query |\n";
    out << "|------|------------|-----------------|-----------|----------------|------------|\n";
    out << "| " << stats.sample_count << " | " << stats.mean_words_per_doc << " | "
        << stats.mean_paragraphs_per_doc << " | " << stats.max_words << " | "
        << stats.max_paragraphs << " | " << stats.mean_gold_per_query << " |\n";
    return out.str();
}

std::string sweep_report_json(const pipelines::SweepResult& sweep) {
    nlohmann::ordered_json object;
    nlohmann::ordered_json recall = nlohmann::ordered_json::object();
    for (const auto& [k, value] : sweep.recall_at_k) {
        recall[std::to_string(k)] = value;
    }
    object["recall_at_k"] = std::move(recall);
    object["skipped_queries"] = sweep.skipped_queries;
    return object.dump(2) + "\n";
}

std::string sweep_report_markdown(const pipelines::SweepResult& sweep) {
    std::ostringstream out;
    out << "| k | Recall |\n|---|--------|\n";
    for (const auto& [k, value] : sweep.recall_at_k) {
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "%.4f", value);
        out << "| " << k << " | " << buffer << " |\n";
    }
    if (sweep.skipped_queries > 0) {
        out << "\nSkipped (no gold): " << sweep.skipped_queries << "\n";
    }
    return out.str();
}

pairscore::LinearPairScorer obtain_scorer(const RunConfig& config, RunOutput& output,
                                          const std::vector<pairscore::TextPair>& fallback_pairs) {
    if (!config.scorer.empty()) {
        note_input(output, config.scorer);
        return pairscore::LinearPairScorer::load(config.scorer);
    }
    pairscore::TrainHyper hyper;
    hyper.seed = config.seed;
    return pairscore::train(fallback_pairs, hyper);
}

std::vector<eval::QueryJudgment> judgments_from_results(
    const std::vector<pipelines::RetrievalResult>& results,
    const std::map<std::string, std::set<std::string>>& gold) {
    std::vector<eval::QueryJudgment> judgments;
    for (const auto& result : results) {
        eval::QueryJudgment judgment;
        judgment.query_id = result.query_id;
        judgment.predicted = result.selected;
        const auto it = gold.find(result.query_id);
        if (it != gold.end()) {
            judgment.gold = it->second;
        }
        std::vector<std::string> ranked;
        ranked.reserve(result.ranked.size());
        for (const auto& candidate : result.ranked) {
            ranked.push_back(candidate.id);
        }
        judgment.ranked = std::move(ranked);
        judgments.push_back(std::move(judgment));
    }
    return judgments;
}

void add_metrics_reports(RunOutput& output, const eval::MetricsReport& report) {
    output.artifacts.emplace_back("report.json", eval::report_json(report));
    output.artifacts.emplace_back("report.md", eval::report_markdown(report));
}

void run_stats(const RunConfig& config, RunOutput& output) {
    std::vector<corpus::LabeledQuery> queries;
    const std::vector<corpus::LabeledQuery>* queries_ptr = nullptr;
    if (!config.queries.empty()) {
        note_input(output, config.queries);
        queries = load_queries(config.queries);
        queries_ptr = &queries;
    }
    corpus::CorpusStats stats;
    if (!config.cases.empty()) {
        note_input(output, config.cases);
        stats = corpus::compute_corpus_stats(load_cases(config.cases), queries_ptr);
    } else if (!config.articles.empty()) {
        note_input(output, config.articles);
        stats = corpus::compute_corpus_stats(load_articles(config.articles), queries_ptr);
    } else {
        throw ConfigError("missing required key: cases (or articles)");
    }
    output.artifacts.emplace_back("report.json", stats_report_json(stats));
    output.artifacts.emplace_back("report.md", stats_report_markdown(stats));
}

void run_task1_all(const RunConfig& config, RunOutput& output) {
    require_key(config.cases, "cases");
    require_key(config.queries, "queries");
    note_input(output, config.cases);
    note_input(output, config.queries);
    const auto cases = load_cases(config.cases);
    const auto queries = load_queries(config.queries);
    pairscore::WeakLabelConfig weak;
    weak.seed = config.seed;
    const auto scorer = obtain_scorer(config, output, pairscore::extract_weak_pairs(cases, weak));

    std::map<std::string, const corpus::CaseDocument*> by_id;
    for (const auto& doc : cases) {
        by_id[doc.id] = &doc;
    }
    std::vector<pipelines::RetrievalResult> results;
    std::map<std::string, std::set<std::string>> gold;
    for (const auto& query : queries) {
        const auto it = by_id.find(query.id);
        if (it == by_id.end()) {
            throw LookupError("query '" + query.id + "' names no case document");
        }
        std::vector<corpus::CaseDocument> candidates;
        candidates.reserve(cases.size() - 1);
        for (const auto& doc : cases) {
            if (doc.id != query.id) {
                candidates.push_back(doc);
            }
        }
        results.push_back(pipelines::run_task1(*it->second, candidates, scorer, {}, config.fusion,
                                               aggregation_of(config)));
        gold[query.id] = std::set<std::string>(query.gold.begin(), query.gold.end());
    }
    output.artifacts.emplace_back("predictions.jsonl", pipelines::predictions_jsonl(results));
    add_metrics_reports(output,
                        eval::evaluate_run(judgments_from_results(results, gold),
                                           eval_aggregation_of(config)));
}

void run_task2_all(const RunConfig& config, RunOutput& output) {
    require_key(config.cases, "cases");
    require_key(config.queries, "queries");
    note_input(output, config.cases);
    note_input(output, config.queries);
    const auto cases = load_cases(config.cases);
    const auto queries = load_queries(config.queries);
    pairscore::WeakLabelConfig weak;
    weak.seed = config.seed;
    const auto scorer = obtain_scorer(config, output, pairscore::extract_weak_pairs(cases, weak));

    pairscore::ExternalScoreTable table;
    pipelines::LexicalSource source = lexical::Bm25Params{};
    if (!config.scores.empty()) {
        note_input(output, config.scores);
        table = pairscore::load_external_scores(config.scores);
        source = &table;
    }

    std::map<std::string, const corpus::CaseDocument*> by_id;
    for (const auto& doc : cases) {
        by_id[doc.id] = &doc;
    }
    std::vector<pipelines::RetrievalResult> results;
    std::map<std::string, std::set<std::string>> gold;
    for (const auto& query : queries) {
        const auto it = by_id.find(query.id);
        if (it == by_id.end()) {
            throw LookupError("query '" + query.id + "' names no case document");
        }
        std::vector<std::pair<std::string, std::string>> candidates;
        for (const auto& paragraph : it->second->paragraphs) {
            candidates.emplace_back(query.id + "#" + std::to_string(paragraph.ordinal),
                                    paragraph.text);
        }
        results.push_back(
            pipelines::run_task2(query.id, query.text, candidates, scorer, source, config.fusion));
        gold[query.id] = std::set<std::string>(query.gold.begin(), query.gold.end());
    }
    output.artifacts.emplace_back("predictions.jsonl", pipelines::predictions_jsonl(results));
    add_metrics_reports(output,
                        eval::evaluate_run(judgments_from_results(results, gold),
                                           eval_aggregation_of(config)));
}

void run_task3_all(const RunConfig& config, RunOutput& output) {
    require_key(config.articles, "articles");
    require_key(config.questions, "questions");
    note_input(output, config.articles);
    note_input(output, config.questions);
    const auto articles = load_articles(config.articles);
    const auto questions = load_questions(config.questions);
    corpus::validate_question_references(questions, articles);

    std::vector<std::pair<std::string, std::string>> units;
    for (const auto& article : articles) {
        units.emplace_back(article.id, article.content);
    }
    const auto model = lexical::TfidfModel::fit(units);

    // Two members with different seeds stand in for an ensemble of
    // independently trained relevance models.
    std::vector<pairscore::LinearPairScorer> members;
    if (!config.scorer.empty()) {
        note_input(output, config.scorer);
        members.push_back(pairscore::LinearPairScorer::load(config.scorer));
    } else {
        for (const std::uint64_t seed : {config.seed, config.seed + 1}) {
            pairscore::TrainHyper hyper;
            hyper.seed = seed;
            members.push_back(
                pairscore::train(question_article_pairs(questions, articles, seed), hyper));
        }
    }
    std::vector<const pairscore::PairScorer*> classifiers;
    for (const auto& member : members) {
        classifiers.push_back(&member);
    }

    std::vector<pipelines::RetrievalResult> results;
    std::map<std::string, std::set<std::string>> gold;
    for (const auto& question : questions) {
        results.push_back(pipelines::run_task3(question, articles, model, config.k, classifiers,
                                               config.decision_threshold));
        gold[question.id] = std::set<std::string>(question.relevant_article_ids.begin(),
                                                  question.relevant_article_ids.end());
    }
    output.artifacts.emplace_back("predictions.jsonl", pipelines::predictions_jsonl(results));
    add_metrics_reports(output,
                        eval::evaluate_run(judgments_from_results(results, gold),
                                           eval_aggregation_of(config)));
}

void run_task4(const RunConfig& config, RunOutput& output, bool lawfulness) {
    require_key(config.articles, "articles");
    require_key(config.questions, "questions");
    note_input(output, config.articles);
    note_input(output, config.questions);
    const auto articles = load_articles(config.articles);
    const auto questions = load_questions(config.questions);

    std::vector<entail::QuestionAnswer> answers;
    std::size_t correct = 0;
    std::size_t labeled = 0;
    if (lawfulness) {
        std::vector<pairscore::TextPair> pairs;
        for (const auto& sample : entail::augment_lawfulness(articles, questions)) {
            pairs.push_back({sample.text, "",
                             sample.lawful ? pairscore::PairLabel::positive
                                           : pairscore::PairLabel::negative});
        }
        const auto scorer = obtain_scorer(config, output, pairs);
        for (const auto& question : questions) {
            entail::QuestionAnswer answer;
            answer.question_id = question.id;
            answer.approach = entail::AnswerApproach::lawfulness;
            answer.yes = entail::answer_lawfulness(question.content, scorer);
            if (question.label.has_value()) {
                ++labeled;
                correct += answer.yes == *question.label ? 1 : 0;
            }
            answers.push_back(std::move(answer));
        }
    } else {
        corpus::validate_question_references(questions, articles);
        std::vector<std::pair<std::string, std::string>> units;
        std::map<std::string, const std::string*> content;
        for (const auto& article : articles) {
            units.emplace_back(article.id, article.content);
            content[article.id] = &article.content;
        }
        const auto model = lexical::TfidfModel::fit(units);
        const auto scorer = obtain_scorer(config, output, entailment_pairs(questions, articles));
        for (const auto& question : questions) {
            auto pairs = entail::build_entailment_pairs(question, question.relevant_article_ids,
                                                        model, articles);
            for (auto& pair : pairs) {
                const double value = scorer.score(
                    {question.id, pair.article_id, question.content, *content.at(pair.article_id)});
                pair.predicted = value >= config.decision_threshold
                                     ? pairscore::PairLabel::positive
                                     : pairscore::PairLabel::negative;
            }
            entail::QuestionAnswer answer;
            answer.question_id = question.id;
            answer.approach = entail::AnswerApproach::entailment;
            answer.yes = entail::answer_entailment(pairs);
            if (question.label.has_value()) {
                ++labeled;
                correct += answer.yes == *question.label ? 1 : 0;
            }
            answers.push_back(std::move(answer));
        }
    }
    output.artifacts.emplace_back("answers.jsonl", entail::answers_jsonl(answers));
    eval::MetricsReport report;
    if (labeled > 0) {
        report.accuracy = eval::accuracy(correct, labeled);
    }
    report.query_count = answers.size();
    add_metrics_reports(output, report);
}

void run_sweep(const RunConfig& config, RunOutput& output) {
    require_key(config.articles, "articles");
    require_key(config.questions, "questions");
    note_input(output, config.articles);
    note_input(output, config.questions);
    const auto articles = load_articles(config.articles);
    const auto questions = load_questions(config.questions);
    std::vector<std::pair<std::string, std::string>> units;
    for (const auto& article : articles) {
        units.emplace_back(article.id, article.content);
    }
    const auto model = lexical::TfidfModel::fit(units);
    const auto sweep = pipelines::sweep_k(questions, articles, model, config.k_values);
    output.artifacts.emplace_back("report.json", sweep_report_json(sweep));
    output.artifacts.emplace_back("report.md", sweep_report_markdown(sweep));
}

void run_eval(const RunConfig& config, RunOutput& output) {
    require_key(config.predictions, "predictions");
    require_key(config.queries, "queries");
    note_input(output, config.predictions);
    note_input(output, config.queries);
    const auto queries = load_queries(config.queries);
    std::map<std::string, std::set<std::string>> gold;
    for (const auto& query : queries) {
        gold[query.id] = std::set<std::string>(query.gold.begin(), query.gold.end());
    }

    std::ifstream in(config.predictions);
    if (!in) {
        throw IoError("cannot open for reading: " + config.predictions);
    }
    std::vector<eval::QueryJudgment> judgments;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const std::string where = config.predictions + ":" + std::to_string(lineno);
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!record.is_object() || !record.contains("query_id") ||
            !record["query_id"].is_string()) {
            throw ParseError(where + ": expected an object with a 'query_id' string");
        }
        eval::QueryJudgment judgment;
        judgment.query_id = record["query_id"].get<std::string>();
        if (record.contains("selected")) {
            for (const auto& item : record["selected"]) {
                if (!item.is_string()) {
                    throw ParseError(where + ": selected ids must be strings");
                }
                judgment.predicted.insert(item.get<std::string>());
            }
        }
        if (record.contains("ranked")) {
            std::vector<std::string> ranked;
            for (const auto& entry : record["ranked"]) {
                if (!entry.is_array() || entry.empty() || !entry[0].is_string()) {
                    throw ParseError(where + ": ranked entries must be [id, score] arrays");
                }
                ranked.push_back(entry[0].get<std::string>());
            }
            judgment.ranked = std::move(ranked);
        }
        const auto it = gold.find(judgment.query_id);
        if (it != gold.end()) {
            judgment.gold = it->second;
        }
        judgments.push_back(std::move(judgment));
    }
    add_metrics_reports(output, eval::evaluate_run(judgments, eval_aggregation_of(config)));
}

std::string manifest_json(const RunConfig& config, const RunOutput& output) {
    nlohmann::ordered_json object;
    object["tool_version"] = std::string(kToolVersion);
    object["task"] = std::string(task_name(config.task));
    object["config_hash"] = config_hash(config);
    nlohmann::ordered_json settings = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config_entries(config)) {
        settings[key] = value;
    }
    object["config"] = std::move(settings);
    object["seed"] = config.seed;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [path, fingerprint] : output.inputs) {
        inputs[path] = fingerprint;
    }
    object["inputs"] = std::move(inputs);
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    for (const auto& [name, content] : output.artifacts) {
        outputs.push_back(name);
    }
    object["outputs"] = std::move(outputs);
    return object.dump(2) + "\n";
}

}  // namespace

int execute(const RunConfig& config) {
    RunOutput output;
    switch (config.task) {
        case Task::stats:
            run_stats(config, output);
            break;
        case Task::task1:
            run_task1_all(config, output);
            break;
        case Task::task2:
            run_task2_all(config, output);
            break;
        case Task::task3:
            run_task3_all(config, output);
            break;
        case Task::task4_entail:
            run_task4(config, output, false);
            break;
        case Task::task4_lawful:
            run_task4(config, output, true);
            break;
        case Task::sweep_k:
            run_sweep(config, output);
            break;
        case Task::eval:
            run_eval(config, output);
            break;
    }
    fs::create_directories(config.output_dir);
    for (const auto& [name, content] : output.artifacts) {
        atomic_write(fs::path(config.output_dir) / name, content);
    }
    atomic_write(fs::path(config.output_dir) / "manifest.json", manifest_json(config, output));
    return 0;
}

}  // namespace legalir::config
