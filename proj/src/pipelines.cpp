#include "legalir/pipelines.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "legalir/error.hpp"

namespace legalir::pipelines {

void validate(const FusionConfig& config) {
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
        throw RangeError("fusion: alpha outside [0, 1]");
    }
    if (config.top_n < 1) {
        throw ArgumentError("fusion: top_n must be at least 1");
    }
    if (config.selection.kind == Selection::Kind::fixed_k && config.selection.k < 1) {
        throw ArgumentError("fusion: fixed_k selection needs k >= 1");
    }
}

std::map<std::string, double> normalize_scores(const std::map<std::string, double>& raw,
                                               Normalization mode) {
    if (raw.empty()) {
        throw ArgumentError("normalize_scores: empty input");
    }
    if (mode == Normalization::none) {
        return raw;
    }
    double lo = raw.begin()->second;
    double hi = lo;
    for (const auto& [id, value] : raw) {
        lo = std::min(lo, value);
        hi = std::max(hi, value);
    }
    std::map<std::string, double> out;
    if (hi == lo) {
        for (const auto& [id, value] : raw) {
            out[id] = 1.0;
        }
        return out;
    }
    const double span = hi - lo;
    for (const auto& [id, value] : raw) {
        out[id] = (value - lo) / span;
    }
    return out;
}

double fuse(double lexical_norm, double supporting, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw RangeError("fuse: alpha outside [0, 1]");
    }
    if (!(lexical_norm >= 0.0 && lexical_norm <= 1.0)) {
        throw RangeError("fuse: lexical score outside [0, 1]");
    }
    if (!(supporting >= 0.0 && supporting <= 1.0)) {
        throw RangeError("fuse: supporting score outside [0, 1]");
    }
    return alpha * supporting + (1.0 - alpha) * lexical_norm;
}

double aggregate_paragraph_scores(const std::vector<std::vector<double>>& matrix,
                                  const ParagraphAggregation& mode) {
    std::vector<double> entries;
    for (const auto& row : matrix) {
        entries.insert(entries.end(), row.begin(), row.end());
    }
    if (entries.empty()) {
        throw ArgumentError("aggregate_paragraph_scores: empty matrix");
    }
    if (mode.kind == ParagraphAggregation::Kind::max) {
        return *std::max_element(entries.begin(), entries.end());
    }
    if (mode.m < 1) {
        throw ArgumentError("aggregate_paragraph_scores: mean_top_m needs m >= 1");
    }
    const std::size_t take = std::min(mode.m, entries.size());
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(take),
                      entries.end(), std::greater<double>());
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) {
        sum += entries[i];
    }
    return sum / static_cast<double>(take);
}

namespace {

// Shared tail of every retrieval pipeline: fuse the (already normalized)
// lexical scores with supporting scores, order by fused score descending with
// ascending-id tie-break, then apply the selection rule.
void fuse_rank_select(const std::map<std::string, double>& lexical_norm,
                      const std::map<std::string, double>& supporting, const FusionConfig& fusion,
                      RetrievalResult& out) {
    for (const auto& [id, lex] : lexical_norm) {
        const double support = supporting.at(id);
        out.ranked.push_back({id, fuse(lex, support, fusion.alpha), lex, support});
    }
    std::sort(out.ranked.begin(), out.ranked.end(),
              [](const RankedCandidate& a, const RankedCandidate& b) {
                  if (a.fused != b.fused) {
                      return a.fused > b.fused;
                  }
                  return a.id < b.id;
              });
    if (fusion.selection.kind == Selection::Kind::threshold) {
        for (const auto& candidate : out.ranked) {
            if (candidate.fused >= fusion.selection.tau) {
                out.selected.insert(candidate.id);
            }
        }
    } else {
        const std::size_t take = std::min(fusion.selection.k, out.ranked.size());
        for (std::size_t i = 0; i < take; ++i) {
            out.selected.insert(out.ranked[i].id);
        }
    }
}

std::string paragraph_unit_id(const std::string& doc_id, std::size_t ordinal) {
    return doc_id + "#" + std::to_string(ordinal);
}

}  // namespace

RetrievalResult run_task1(const corpus::CaseDocument& base_case,
                          const std::vector<corpus::CaseDocument>& candidates,
                          const pairscore::PairScorer& scorer,
                          const lexical::Bm25Params& bm25_params, const FusionConfig& fusion,
                          const ParagraphAggregation& aggregation) {
    validate(fusion);
    if (candidates.empty()) {
        throw ArgumentError("run_task1: no candidates");
    }
    for (const auto& candidate : candidates) {
        if (candidate.id == base_case.id) {
            throw ArgumentError("run_task1: base case among candidates: " + base_case.id);
        }
    }

    // One index over every candidate paragraph; unit ids are doc#ordinal.
    std::vector<std::pair<std::string, std::string>> units;
    std::vector<std::size_t> offsets(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        offsets[c] = units.size();
        for (const auto& paragraph : candidates[c].paragraphs) {
            units.emplace_back(paragraph_unit_id(candidates[c].id, paragraph.ordinal),
                               paragraph.text);
        }
    }
    const auto index = lexical::InvertedIndex::build(units);

    const std::size_t rows = base_case.paragraphs.size();
    std::vector<std::vector<std::vector<double>>> matrices(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        matrices[c].assign(rows, std::vector<double>(candidates[c].paragraphs.size(), 0.0));
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const auto tokens = lexical::tokenize(base_case.paragraphs[r].text);
        const auto scores = index.bm25_all(bm25_params, tokens);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            for (std::size_t j = 0; j < candidates[c].paragraphs.size(); ++j) {
                matrices[c][r][j] = scores[offsets[c] + j];
            }
        }
    }

    std::vector<std::pair<double, std::size_t>> stage1(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        stage1[c] = {aggregate_paragraph_scores(matrices[c], aggregation), c};
    }
    std::sort(stage1.begin(), stage1.end(),
              [&](const std::pair<double, std::size_t>& a, const std::pair<double, std::size_t>& b) {
                  if (a.first != b.first) {
                      return a.first > b.first;
                  }
                  return candidates[a.second].id < candidates[b.second].id;
              });
    const std::size_t survivors = std::min(fusion.top_n, candidates.size());

    std::map<std::string, double> lexical_raw;
    std::map<std::string, double> supporting;
    for (std::size_t rank = 0; rank < survivors; ++rank) {
        const auto& [bm25_agg, c] = stage1[rank];
        const auto& candidate = candidates[c];
        lexical_raw[candidate.id] = bm25_agg;

        std::vector<std::vector<double>> matrix(
            rows, std::vector<double>(candidate.paragraphs.size(), 0.0));
        try {
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = 0; j < candidate.paragraphs.size(); ++j) {
                    matrix[r][j] = scorer.score({base_case.id, candidate.id,
                                                 base_case.paragraphs[r].text,
                                                 candidate.paragraphs[j].text});
                }
            }
        } catch (const Error& e) {
            throw Error("run_task1: query " + base_case.id + ", candidate " + candidate.id +
                        ": " + e.what());
        }
        supporting[candidate.id] = aggregate_paragraph_scores(matrix, aggregation);
    }

    RetrievalResult result;
    result.query_id = base_case.id;
    fuse_rank_select(normalize_scores(lexical_raw, fusion.normalization), supporting, fusion,
                     result);
    return result;
}

RetrievalResult run_task2(std::string_view query_id, std::string_view fragment,
                          const std::vector<std::pair<std::string, std::string>>& candidates,
                          const pairscore::PairScorer& scorer, const LexicalSource& lexical_source,
                          const FusionConfig& fusion) {
    validate(fusion);
    if (candidates.empty()) {
        throw ArgumentError("run_task2: no candidates");
    }

    RetrievalResult result;
    result.query_id = std::string(query_id);

    std::map<std::string, double> lexical_raw;
    if (const auto* params = std::get_if<lexical::Bm25Params>(&lexical_source)) {
        const auto index = lexical::InvertedIndex::build(candidates);
        const auto scores = index.bm25_all(*params, lexical::tokenize(fragment));
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            lexical_raw[candidates[i].first] = scores[index.unit_ordinal(candidates[i].first)];
        }
    } else {
        const auto* table = std::get<const pairscore::ExternalScoreTable*>(lexical_source);
        if (table == nullptr) {
            throw ArgumentError("run_task2: external score table is null");
        }
        for (const auto& [id, text] : candidates) {
            if (table->contains(query_id, id)) {
                lexical_raw[id] = table->score({query_id, id, fragment, text});
            } else {
                lexical_raw[id] = table->default_score();
                ++result.warnings;
            }
        }
        if (lexical_raw.size() != candidates.size()) {
            throw CorpusError("run_task2: duplicate candidate id");
        }
    }

    std::map<std::string, double> supporting;
    for (const auto& [id, text] : candidates) {
        try {
            supporting[id] = scorer.score({query_id, id, fragment, text});
        } catch (const Error& e) {
            throw Error("run_task2: query " + std::string(query_id) + ", candidate " + id + ": " +
                        e.what());
        }
    }

    fuse_rank_select(normalize_scores(lexical_raw, fusion.normalization), supporting, fusion,
                     result);
    return result;
}

RetrievalResult run_task3(const corpus::BarQuestion& question,
                          const std::vector<corpus::StatuteArticle>& articles,
                          const lexical::TfidfModel& model, std::size_t k,
                          const std::vector<const pairscore::PairScorer*>& classifiers,
                          double decision_threshold) {
    if (!model.fitted()) {
        throw StateError("run_task3: tf-idf model is not fitted");
    }
    if (k < 1) {
        throw ArgumentError("run_task3: k must be at least 1");
    }
    if (articles.empty()) {
        throw ArgumentError("run_task3: no articles");
    }
    if (classifiers.empty()) {
        throw ArgumentError("run_task3: no classifiers");
    }
    if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0)) {
        throw RangeError("run_task3: decision threshold outside [0, 1]");
    }

    std::vector<std::pair<std::string, std::string>> units;
    units.reserve(articles.size());
    std::map<std::string, const std::string*> texts;
    for (const auto& article : articles) {
        units.emplace_back(article.id, article.content);
        texts[article.id] = &article.content;
    }
    const auto topk = lexical::cosine_rank_topk(model, question.content, units, k);

    RetrievalResult result;
    result.query_id = question.id;
    std::vector<std::set<std::string>> per_classifier(classifiers.size());
    std::map<std::string, double> best_support;
    for (const auto& scored : topk) {
        best_support[scored.id] = 0.0;
    }
    for (std::size_t m = 0; m < classifiers.size(); ++m) {
        if (classifiers[m] == nullptr) {
            throw ArgumentError("run_task3: null classifier");
        }
        for (const auto& scored : topk) {
            const double value = classifiers[m]->score(
                {question.id, scored.id, question.content, *texts.at(scored.id)});
            best_support[scored.id] = std::max(best_support[scored.id], value);
            if (value >= decision_threshold) {
                per_classifier[m].insert(scored.id);
            }
        }
    }
    result.selected = ensemble_or(per_classifier);
    if (result.selected.empty()) {
        result.selected.insert(topk.front().id);  // always answer with something
    }
    for (const auto& scored : topk) {
        result.ranked.push_back(
            {scored.id, scored.similarity, scored.similarity, best_support.at(scored.id)});
    }
    return result;
}

std::set<std::string> ensemble_or(const std::vector<std::set<std::string>>& predictions) {
    if (predictions.empty()) {
        throw ArgumentError("ensemble_or: no prediction sets");
    }
    std::set<std::string> out;
    for (const auto& prediction : predictions) {
        out.insert(prediction.begin(), prediction.end());
    }
    return out;
}

SweepResult sweep_k(const std::vector<corpus::BarQuestion>& questions,
                    const std::vector<corpus::StatuteArticle>& articles,
                    const lexical::TfidfModel& model, const std::vector<std::size_t>& k_values) {
    if (!model.fitted()) {
        throw StateError("sweep_k: tf-idf model is not fitted");
    }
    if (questions.empty() || articles.empty() || k_values.empty()) {
        throw ArgumentError("sweep_k: questions, articles and k values must be non-empty");
    }
    for (const std::size_t k : k_values) {
        if (k < 1) {
            throw ArgumentError("sweep_k: k must be at least 1");
        }
    }

    std::vector<std::pair<std::string, std::string>> units;
    units.reserve(articles.size());
    for (const auto& article : articles) {
        units.emplace_back(article.id, article.content);
    }

    SweepResult out;
    std::map<std::size_t, std::size_t> hits;
    for (const std::size_t k : k_values) {
        hits[k] = 0;
    }
    std::size_t total_pairs = 0;
    for (const auto& question : questions) {
        if (question.relevant_article_ids.empty()) {
            ++out.skipped_queries;
            continue;
        }
        // Rank the whole collection once; the top-k list is a prefix of it.
        const auto ranking =
            lexical::cosine_rank_topk(model, question.content, units, units.size());
        std::map<std::string, std::size_t> position;
        for (std::size_t i = 0; i < ranking.size(); ++i) {
            position[ranking[i].id] = i;
        }
        for (const auto& gold : question.relevant_article_ids) {
            ++total_pairs;
            const auto it = position.find(gold);
            if (it == position.end()) {
                continue;  // gold article missing from the collection; never retrievable
            }
            for (auto& [k, count] : hits) {
                if (it->second < k) {
                    ++count;
                }
            }
        }
    }
    if (total_pairs == 0) {
        throw ArgumentError("sweep_k: no question carries gold article ids");
    }
    for (const auto& [k, count] : hits) {
        out.recall_at_k[k] = static_cast<double>(count) / static_cast<double>(total_pairs);
    }
    return out;
}

std::string predictions_jsonl(const std::vector<RetrievalResult>& results) {
    std::string out;
    for (const auto& result : results) {
        nlohmann::ordered_json object;
        object["query_id"] = result.query_id;
        object["selected"] = result.selected;  // sets serialize in ascending order
        nlohmann::ordered_json ranked = nlohmann::ordered_json::array();
        for (const auto& candidate : result.ranked) {
            ranked.push_back({candidate.id, candidate.fused});
        }
        object["ranked"] = std::move(ranked);
        if (result.warnings > 0) {
            object["warnings"] = result.warnings;
        }
        out += object.dump();
        out += "\n";
    }
    return out;
}

void write_predictions_jsonl(const std::filesystem::path& path,
                             const std::vector<RetrievalResult>& results) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << predictions_jsonl(results);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace legalir::pipelines
