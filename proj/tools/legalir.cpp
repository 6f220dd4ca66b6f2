// Command-line front end: each subcommand builds a RunConfig (config file
// first, flags override) and delegates to the library. Errors leave as one
// JSON line on stderr and a nonzero exit status so callers can parse them.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "legalir/config.hpp"
#include "legalir/corpus.hpp"
#include "legalir/entail.hpp"
#include "legalir/error.hpp"
#include "legalir/lexical.hpp"
#include "legalir/pairscore.hpp"
#include "legalir/synth.hpp"

namespace {

using namespace legalir;

int log_level() {
    static const int level = [] {
        const char* raw = std::getenv("LEGALIR_LOG");
        if (raw == nullptr) return 0;
        const std::string value = raw;
        if (value == "debug") return 2;
        if (value == "info") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& message) {
    if (log_level() >= 1) {
        std::cerr << "[legalir] " << message << "\n";
    }
}

const char* error_kind(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const CorpusError*>(&e)) return "CorpusError";
    if (dynamic_cast<const ArgumentError*>(&e)) return "ArgumentError";
    if (dynamic_cast<const RangeError*>(&e)) return "RangeError";
    if (dynamic_cast<const LookupError*>(&e)) return "LookupError";
    if (dynamic_cast<const StateError*>(&e)) return "StateError";
    if (dynamic_cast<const TrainingError*>(&e)) return "TrainingError";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "InternalError";
}

// Options shared by the run-style subcommands. Option pointers distinguish
// "given on the command line" from "left at default".
struct CommonFlags {
    std::string config_path;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    double alpha = 0.0;
    std::size_t top_n = 0;
    std::size_t k = 0;
    std::string cases;
    std::string articles;
    std::string questions;
    std::string queries;
    std::string scorer;
    std::string scores;
    std::string predictions;

    CLI::Option* config_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* top_n_opt = nullptr;
    CLI::Option* k_opt = nullptr;
    CLI::Option* cases_opt = nullptr;
    CLI::Option* articles_opt = nullptr;
    CLI::Option* questions_opt = nullptr;
    CLI::Option* queries_opt = nullptr;
    CLI::Option* scorer_opt = nullptr;
    CLI::Option* scores_opt = nullptr;
    CLI::Option* predictions_opt = nullptr;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    f.config_opt = sub->add_option("--config", f.config_path, "key=value configuration file");
    f.seed_opt = sub->add_option("--seed", f.seed, "random seed");
    f.out_opt = sub->add_option("--out", f.out, "output directory");
    f.alpha_opt = sub->add_option("--alpha", f.alpha, "fusion weight on the supporting score");
    f.top_n_opt = sub->add_option("--top-n", f.top_n, "stage-one candidate depth");
    f.k_opt = sub->add_option("--k", f.k, "statute filter depth");
    sub->add_option("--format", f.format, "report format echoed to stdout")
        ->check(CLI::IsMember({"json", "md"}));
    f.cases_opt = sub->add_option("--cases", f.cases, "case corpus (.jsonl or directory)");
    f.articles_opt = sub->add_option("--articles", f.articles, "statute corpus (.jsonl or code text)");
    f.questions_opt = sub->add_option("--questions", f.questions, "bar questions (.jsonl)");
    f.queries_opt = sub->add_option("--queries", f.queries, "labeled queries (.jsonl)");
    f.scorer_opt = sub->add_option("--scorer", f.scorer, "trained pair scorer file");
    f.scores_opt = sub->add_option("--scores", f.scores, "external score table (.tsv)");
    f.predictions_opt = sub->add_option("--predictions", f.predictions, "predictions.jsonl to evaluate");
}

config::RunConfig build_config(const CommonFlags& f, config::Task task) {
    config::RunConfig c;
    if (f.config_opt->count() > 0) {
        std::vector<std::string> warnings;
        c = config::load_config(f.config_path, /*strict=*/true, &warnings);
        for (const auto& warning : warnings) {
            std::cerr << "warning: " << warning << "\n";
        }
    }
    c.task = task;
    if (f.seed_opt->count() > 0) c.seed = f.seed;
    if (f.out_opt->count() > 0) c.output_dir = f.out;
    if (f.alpha_opt->count() > 0) {
        if (!(f.alpha >= 0.0 && f.alpha <= 1.0)) {
            throw RangeError("--alpha outside [0, 1]");
        }
        c.fusion.alpha = f.alpha;
    }
    if (f.top_n_opt->count() > 0) {
        if (f.top_n < 1) throw RangeError("--top-n must be >= 1");
        c.fusion.top_n = f.top_n;
    }
    if (f.k_opt->count() > 0) {
        if (f.k < 1) throw RangeError("--k must be >= 1");
        c.k = f.k;
    }
    if (f.cases_opt->count() > 0) c.cases = f.cases;
    if (f.articles_opt->count() > 0) c.articles = f.articles;
    if (f.questions_opt->count() > 0) c.questions = f.questions;
    if (f.queries_opt->count() > 0) c.queries = f.queries;
    if (f.scorer_opt->count() > 0) c.scorer = f.scorer;
    if (f.scores_opt->count() > 0) c.scores = f.scores;
    if (f.predictions_opt->count() > 0) c.predictions = f.predictions;
    return c;
}

int execute_and_echo(const config::RunConfig& c, const std::string& format) {
    log_info("task " + std::string(config::task_name(c.task)) + ", config hash " +
             config::config_hash(c));
    const int status = config::execute(c);
    const auto report =
        std::filesystem::path(c.output_dir) / (format == "md" ? "report.md" : "report.json");
    std::ifstream in(report);
    if (in) {
        std::cout << in.rdbuf();
    }
    return status;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<corpus::CaseDocument> load_cases_arg(const std::string& path) {
    const auto format = std::filesystem::is_directory(path) ? corpus::CaseFormat::plaintext_dir
                                                            : corpus::CaseFormat::jsonl;
    return corpus::parse_case_corpus(path, format);
}

std::vector<corpus::StatuteArticle> load_articles_arg(const std::string& path) {
    if (std::filesystem::path(path).extension() == ".jsonl") {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open for reading: " + path);
        return corpus::parse_articles_jsonl(in, path);
    }
    return corpus::parse_civil_code(read_file(path));
}

// pairs.jsonl: {"query_id"?, "candidate_id"?, "left", "right", "label"?}
std::vector<pairscore::TextPair> read_pairs_jsonl(const std::string& path,
                                                  std::vector<std::pair<std::string, std::string>>* ids) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<pairscore::TextPair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!record.is_object() || !record.contains("left") || !record["left"].is_string() ||
            !record.contains("right") || !record["right"].is_string()) {
            throw ParseError(where + ": expected an object with 'left' and 'right' strings");
        }
        pairscore::TextPair pair;
        pair.left = record["left"].get<std::string>();
        pair.right = record["right"].get<std::string>();
        if (record.contains("label")) {
            const std::string label = record["label"].get<std::string>();
            if (label == "positive") {
                pair.label = pairscore::PairLabel::positive;
            } else if (label == "negative") {
                pair.label = pairscore::PairLabel::negative;
            } else {
                throw ParseError(where + ": label must be positive or negative");
            }
        }
        if (ids != nullptr) {
            std::string qid = "p" + std::to_string(lineno);
            std::string cid = "c" + std::to_string(lineno);
            if (record.contains("query_id") && record["query_id"].is_string()) {
                qid = record["query_id"].get<std::string>();
            }
            if (record.contains("candidate_id") && record["candidate_id"].is_string()) {
                cid = record["candidate_id"].get<std::string>();
            }
            ids->emplace_back(std::move(qid), std::move(cid));
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::string pairs_jsonl(const std::vector<pairscore::TextPair>& pairs) {
    std::string out;
    for (const auto& pair : pairs) {
        nlohmann::ordered_json record;
        record["left"] = pair.left;
        record["right"] = pair.right;
        if (pair.label.has_value()) {
            record["label"] =
                *pair.label == pairscore::PairLabel::positive ? "positive" : "negative";
        }
        out += record.dump();
        out += "\n";
    }
    return out;
}

int run_ingest(const CommonFlags& f) {
    if (f.out_opt->count() == 0) throw ConfigError("missing required key: out");
    std::filesystem::create_directories(f.out);
    bool any = false;
    if (f.cases_opt->count() > 0) {
        const auto cases = load_cases_arg(f.cases);
        std::ostringstream buffer;
        corpus::write_cases_jsonl(cases, buffer);
        config::atomic_write(std::filesystem::path(f.out) / "cases.jsonl", buffer.str());
        log_info(std::to_string(cases.size()) + " cases ingested");
        any = true;
    }
    if (f.articles_opt->count() > 0) {
        const auto articles = load_articles_arg(f.articles);
        std::ostringstream buffer;
        corpus::write_articles_jsonl(articles, buffer);
        config::atomic_write(std::filesystem::path(f.out) / "articles.jsonl", buffer.str());
        log_info(std::to_string(articles.size()) + " articles ingested");
        any = true;
    }
    if (f.questions_opt->count() > 0) {
        std::ifstream in(f.questions);
        if (!in) throw IoError("cannot open for reading: " + f.questions);
        const auto questions = corpus::parse_questions_jsonl(in, f.questions);
        std::ostringstream buffer;
        corpus::write_questions_jsonl(questions, buffer);
        config::atomic_write(std::filesystem::path(f.out) / "questions.jsonl", buffer.str());
        log_info(std::to_string(questions.size()) + " questions ingested");
        any = true;
    }
    if (f.queries_opt->count() > 0) {
        std::ifstream in(f.queries);
        if (!in) throw IoError("cannot open for reading: " + f.queries);
        const auto queries = corpus::parse_queries_jsonl(in, f.queries);
        std::ostringstream buffer;
        corpus::write_queries_jsonl(queries, buffer);
        config::atomic_write(std::filesystem::path(f.out) / "queries.jsonl", buffer.str());
        log_info(std::to_string(queries.size()) + " queries ingested");
        any = true;
    }
    if (!any) throw ConfigError("missing required key: cases (or articles/questions/queries)");
    return 0;
}

int run_index(const CommonFlags& f) {
    if (f.out_opt->count() == 0) throw ConfigError("missing required key: out");
    std::filesystem::create_directories(f.out);
    if (f.cases_opt->count() > 0) {
        const auto cases = load_cases_arg(f.cases);
        std::vector<std::pair<std::string, std::string>> units;
        for (const auto& doc : cases) {
            for (const auto& paragraph : doc.paragraphs) {
                units.emplace_back(doc.id + "#" + std::to_string(paragraph.ordinal),
                                   paragraph.text);
            }
        }
        const auto index = lexical::InvertedIndex::build(units);
        index.save(std::filesystem::path(f.out) / "index.bin");
        log_info(std::to_string(units.size()) + " paragraph units indexed");
        return 0;
    }
    if (f.articles_opt->count() > 0) {
        const auto articles = load_articles_arg(f.articles);
        std::vector<std::pair<std::string, std::string>> units;
        for (const auto& article : articles) {
            units.emplace_back(article.id, article.content);
        }
        const auto model = lexical::TfidfModel::fit(units);
        model.save(std::filesystem::path(f.out) / "tfidf.bin");
        log_info(std::to_string(units.size()) + " articles vectorized");
        return 0;
    }
    throw ConfigError("missing required key: cases (or articles)");
}

int run_extract_weak(const CommonFlags& f) {
    if (f.cases_opt->count() == 0) throw ConfigError("missing required key: cases");
    if (f.out_opt->count() == 0) throw ConfigError("missing required key: out");
    std::filesystem::create_directories(f.out);
    pairscore::WeakLabelConfig weak;
    if (f.seed_opt->count() > 0) weak.seed = f.seed;
    const auto pairs = pairscore::extract_weak_pairs(load_cases_arg(f.cases), weak);
    config::atomic_write(std::filesystem::path(f.out) / "pairs.jsonl", pairs_jsonl(pairs));
    log_info(std::to_string(pairs.size()) + " weak pairs extracted");
    return 0;
}

int run_train_pair(const CommonFlags& f, const std::string& pairs_path) {
    if (f.out_opt->count() == 0) throw ConfigError("missing required key: out");
    std::filesystem::create_directories(f.out);
    std::vector<pairscore::TextPair> pairs;
    if (!pairs_path.empty()) {
        pairs = read_pairs_jsonl(pairs_path, nullptr);
    } else if (f.cases_opt->count() > 0) {
        pairscore::WeakLabelConfig weak;
        if (f.seed_opt->count() > 0) weak.seed = f.seed;
        pairs = pairscore::extract_weak_pairs(load_cases_arg(f.cases), weak);
    } else {
        throw ConfigError("missing required key: pairs (or cases)");
    }
    pairscore::TrainHyper hyper;
    if (f.seed_opt->count() > 0) hyper.seed = f.seed;
    const auto scorer = pairscore::train(pairs, hyper);
    scorer.save(std::filesystem::path(f.out) / "scorer.bin");
    nlohmann::ordered_json report;
    report["pairs"] = pairs.size();
    report["epochs"] = scorer.trained_epochs();
    report["epoch_losses"] = scorer.epoch_losses();
    config::atomic_write(std::filesystem::path(f.out) / "train_report.json",
                         report.dump(2) + "\n");
    log_info("scorer trained on " + std::to_string(pairs.size()) + " pairs");
    return 0;
}

int run_score(const CommonFlags& f, const std::string& pairs_path) {
    if (f.scorer_opt->count() == 0) throw ConfigError("missing required key: scorer");
    if (pairs_path.empty()) throw ConfigError("missing required key: pairs");
    if (f.out_opt->count() == 0) throw ConfigError("missing required key: out");
    std::filesystem::create_directories(f.out);
    const auto scorer = pairscore::LinearPairScorer::load(f.scorer);
    std::vector<std::pair<std::string, std::string>> ids;
    const auto pairs = read_pairs_jsonl(pairs_path, &ids);
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out << ids[i].first << "\t" << ids[i].second << "\t"
            << scorer.score_text(pairs[i].left, pairs[i].right) << "\n";
    }
    config::atomic_write(std::filesystem::path(f.out) / "scores.tsv", out.str());
    log_info(std::to_string(pairs.size()) + " pairs scored");
    return 0;
}

int run_gen_synth(const CommonFlags& f, synth::SyntheticSpec spec) {
    if (f.out_opt->count() == 0) throw ConfigError("missing required key: out");
    if (f.seed_opt->count() > 0) spec.seed = f.seed;
    std::filesystem::create_directories(f.out);
    const auto corpus = synth::generate_synthetic(spec);
    const auto dir = std::filesystem::path(f.out);
    {
        std::ostringstream buffer;
        corpus::write_cases_jsonl(corpus.cases, buffer);
        config::atomic_write(dir / "cases.jsonl", buffer.str());
    }
    {
        std::ostringstream buffer;
        corpus::write_articles_jsonl(corpus.articles, buffer);
        config::atomic_write(dir / "articles.jsonl", buffer.str());
    }
    {
        std::ostringstream buffer;
        corpus::write_questions_jsonl(corpus.questions, buffer);
        config::atomic_write(dir / "questions.jsonl", buffer.str());
    }
    {
        std::ostringstream buffer;
        corpus::write_queries_jsonl(corpus.case_queries, buffer);
        config::atomic_write(dir / "queries.jsonl", buffer.str());
    }
    nlohmann::ordered_json ledger;
    ledger["cases"] = corpus.cases.size();
    ledger["articles"] = corpus.articles.size();
    ledger["questions"] = corpus.questions.size();
    ledger["queries"] = corpus.case_queries.size();
    ledger["gold_pairs"] = corpus.gold_pair_count();
    ledger["seed"] = spec.seed;
    config::atomic_write(dir / "ledger.json", ledger.dump(2) + "\n");
    log_info("synthetic corpus written to " + f.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-stage legal retrieval and entailment pipelines"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        CommonFlags flags;
    };
    std::map<std::string, Sub> subs;
    for (const char* name : {"ingest", "stats", "index", "train-pair", "extract-weak", "score",
                             "run-task1", "run-task2", "run-task3", "run-task4", "sweep-k",
                             "eval", "gen-synth"}) {
        auto* sub = app.add_subcommand(name);
        subs[name].app = sub;
        add_common(sub, subs[name].flags);
    }

    std::string pairs_path;
    subs["train-pair"].app->add_option("--pairs", pairs_path, "labeled pairs (.jsonl)");
    subs["score"].app->add_option("--pairs", pairs_path, "pairs to score (.jsonl)");

    std::string approach = "entail";
    subs["run-task4"].app->add_option("--approach", approach, "entail or lawful")
        ->check(CLI::IsMember({"entail", "lawful"}));

    synth::SyntheticSpec spec;
    auto* gen = subs["gen-synth"].app;
    gen->add_option("--n-cases", spec.n_cases, "number of case documents");
    gen->add_option("--paragraphs-min", spec.paragraphs_min, "minimum paragraphs per case");
    gen->add_option("--paragraphs-max", spec.paragraphs_max, "maximum paragraphs per case");
    gen->add_option("--support-rate", spec.planted_support_rate, "planted supports per case ratio");
    gen->add_option("--vocab-size", spec.vocab_size, "vocabulary size");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto& [name, sub] = *[&] {
            for (auto it = subs.begin(); it != subs.end(); ++it) {
                if (it->second.app->parsed()) return it;
            }
            return subs.end();
        }();
        const CommonFlags& f = sub.flags;
        if (name == "ingest") return run_ingest(f);
        if (name == "index") return run_index(f);
        if (name == "extract-weak") return run_extract_weak(f);
        if (name == "train-pair") return run_train_pair(f, pairs_path);
        if (name == "score") return run_score(f, pairs_path);
        if (name == "gen-synth") return run_gen_synth(f, spec);
        config::Task task;
        if (name == "stats") {
            task = config::Task::stats;
        } else if (name == "run-task1") {
            task = config::Task::task1;
        } else if (name == "run-task2") {
            task = config::Task::task2;
        } else if (name == "run-task3") {
            task = config::Task::task3;
        } else if (name == "run-task4") {
            task = approach == "lawful" ? config::Task::task4_lawful : config::Task::task4_entail;
        } else if (name == "sweep-k") {
            task = config::Task::sweep_k;
        } else {
            task = config::Task::eval;
        }
        return execute_and_echo(build_config(f, task), f.format);
    } catch (const std::exception& e) {
        nlohmann::ordered_json error;
        error["error"] = error_kind(e);
        error["message"] = e.what();
        std::cerr << error.dump() << "\n";
        return 1;
    }
}
