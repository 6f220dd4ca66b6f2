#include "legalir/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "legalir/bytesio.hpp"
#include "legalir/error.hpp"
#include "legalir/rng.hpp"

namespace legalir::lexical {

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        if (current.size() >= config.min_token_len && !config.stopwords.count(current))
            out.push_back(current);
        current.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(config.lowercase ? static_cast<char>(std::tolower(c))
                                               : static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

InvertedIndex InvertedIndex::build(const std::vector<std::pair<std::string, std::string>>& units,
                                   const TokenizerConfig& config) {
    if (units.empty()) throw ArgumentError("build_index: zero units");
    InvertedIndex index;
    std::uint64_t total_len = 0;
    for (const auto& [id, text] : units) {
        if (index.unit_ordinals_.count(id))
            throw CorpusError("build_index: duplicate unit id '" + id + "'");
        const auto ordinal = static_cast<std::uint32_t>(index.unit_ids_.size());
        index.unit_ordinals_.emplace(id, ordinal);
        index.unit_ids_.push_back(id);

        auto tokens = tokenize(text, config);
        std::map<std::string, std::uint32_t> counts;
        for (auto& t : tokens) ++counts[t];
        for (auto& [token, tf] : counts)
            index.postings_[token].push_back(Posting{ordinal, tf});
        index.doc_len_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_len += tokens.size();
    }
    index.avgdl_ = static_cast<double>(total_len) / static_cast<double>(units.size());
    return index;
}

bool InvertedIndex::has_unit(std::string_view unit_id) const {
    return unit_ordinals_.count(std::string(unit_id)) > 0;
}

std::uint32_t InvertedIndex::unit_ordinal(std::string_view unit_id) const {
    auto it = unit_ordinals_.find(std::string(unit_id));
    if (it == unit_ordinals_.end())
        throw LookupError("unknown unit id '" + std::string(unit_id) + "'");
    return it->second;
}

std::size_t InvertedIndex::doc_len(std::string_view unit_id) const {
    return doc_len_[unit_ordinal(unit_id)];
}

std::size_t InvertedIndex::df(std::string_view token) const {
    auto it = postings_.find(std::string(token));
    return it == postings_.end() ? 0 : it->second.size();
}

std::uint32_t InvertedIndex::term_frequency(std::string_view token, std::uint32_t unit_ordinal) const {
    auto it = postings_.find(std::string(token));
    if (it == postings_.end()) return 0;
    const auto& list = it->second;
    auto pos = std::lower_bound(list.begin(), list.end(), unit_ordinal,
                                [](const Posting& p, std::uint32_t u) { return p.unit < u; });
    if (pos == list.end() || pos->unit != unit_ordinal) return 0;
    return pos->tf;
}

double InvertedIndex::bm25_for_ordinal(const Bm25Params& params,
                                       const std::vector<std::string>& query_tokens,
                                       std::uint32_t ordinal) const {
    const double n = static_cast<double>(unit_count());
    const double dl = doc_len_[ordinal];
    double score = 0.0;
    for (const auto& token : query_tokens) {
        auto it = postings_.find(token);
        if (it == postings_.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double tf = term_frequency(token, ordinal);
        if (tf == 0.0) continue;
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        const double denom = tf + params.k1 * (1.0 - params.b + params.b * dl / avgdl_);
        score += idf * tf * (params.k1 + 1.0) / denom;
    }
    return score;
}

double InvertedIndex::bm25(const Bm25Params& params, const std::vector<std::string>& query_tokens,
                           std::string_view unit_id) const {
    return bm25_for_ordinal(params, query_tokens, unit_ordinal(unit_id));
}

std::vector<double> InvertedIndex::bm25_all(const Bm25Params& params,
                                            const std::vector<std::string>& query_tokens) const {
    std::vector<double> scores(unit_count(), 0.0);
    const double n = static_cast<double>(unit_count());
    for (const auto& token : query_tokens) {
        auto it = postings_.find(token);
        if (it == postings_.end()) continue;
        const double df = static_cast<double>(it->second.size());
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        for (const auto& posting : it->second) {
            const double tf = posting.tf;
            const double dl = doc_len_[posting.unit];
            const double denom = tf + params.k1 * (1.0 - params.b + params.b * dl / avgdl_);
            scores[posting.unit] += idf * tf * (params.k1 + 1.0) / denom;
        }
    }
    return scores;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write("LIRX1", 5);
    bytesio::write_u64(out, unit_ids_.size());
    for (std::size_t i = 0; i < unit_ids_.size(); ++i) {
        bytesio::write_str(out, unit_ids_[i]);
        bytesio::write_u32(out, doc_len_[i]);
    }
    bytesio::write_f64(out, avgdl_);
    bytesio::write_u64(out, postings_.size());
    for (const auto& [token, list] : postings_) {
        bytesio::write_str(out, token);
        bytesio::write_u64(out, list.size());
        for (const auto& p : list) {
            bytesio::write_u32(out, p.unit);
            bytesio::write_u32(out, p.tf);
        }
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    bytesio::expect_magic(in, "LIRX1", path.string());
    InvertedIndex index;
    const auto n_units = bytesio::read_u64(in);
    for (std::uint64_t i = 0; i < n_units; ++i) {
        std::string id = bytesio::read_str(in);
        index.unit_ordinals_.emplace(id, static_cast<std::uint32_t>(i));
        index.unit_ids_.push_back(std::move(id));
        index.doc_len_.push_back(bytesio::read_u32(in));
    }
    index.avgdl_ = bytesio::read_f64(in);
    const auto n_tokens = bytesio::read_u64(in);
    for (std::uint64_t i = 0; i < n_tokens; ++i) {
        std::string token = bytesio::read_str(in);
        const auto n_postings = bytesio::read_u64(in);
        std::vector<Posting> list;
        list.reserve(n_postings);
        for (std::uint64_t j = 0; j < n_postings; ++j) {
            Posting p;
            p.unit = bytesio::read_u32(in);
            p.tf = bytesio::read_u32(in);
            list.push_back(p);
        }
        index.postings_.emplace(std::move(token), std::move(list));
    }
    return index;
}

double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_tokens, std::string_view unit_id) {
    return index.bm25(params, query_tokens, unit_id);
}

std::vector<std::vector<double>> bm25_pair_matrix(const std::vector<std::string>& query_paragraphs,
                                                  const std::vector<std::string>& candidate_paragraphs,
                                                  const Bm25Params& params,
                                                  const TokenizerConfig& config) {
    if (query_paragraphs.empty() || candidate_paragraphs.empty())
        throw ArgumentError("bm25_pair_matrix: empty paragraph sequence");
    std::vector<std::pair<std::string, std::string>> units;
    units.reserve(candidate_paragraphs.size());
    for (std::size_t j = 0; j < candidate_paragraphs.size(); ++j)
        units.emplace_back(std::to_string(j), candidate_paragraphs[j]);
    const auto index = InvertedIndex::build(units, config);

    std::vector<std::vector<double>> matrix;
    matrix.reserve(query_paragraphs.size());
    for (const auto& query : query_paragraphs)
        matrix.push_back(index.bm25_all(params, tokenize(query, config)));
    return matrix;
}

TfidfModel TfidfModel::fit(const std::vector<std::pair<std::string, std::string>>& units,
                           const TokenizerConfig& config) {
    if (units.empty()) throw ArgumentError("tfidf_fit: zero units");
    TfidfModel model;
    model.config_ = config;

    std::map<std::string, std::uint32_t> df;
    std::uint64_t fp = kFnvBasis;
    for (const auto& [id, text] : units) {
        fp = fnv1a64(id, fp);
        fp = fnv1a64(text, fp);
        auto tokens = tokenize(text, config);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& t : tokens) ++df[t];
    }
    const double n = static_cast<double>(units.size());
    model.idf_.reserve(df.size());
    for (auto& [token, count] : df) {
        const auto dim = static_cast<std::uint32_t>(model.vocab_.size());
        model.vocab_.emplace(token, dim);
        model.idf_.push_back(std::log(n / static_cast<double>(count)) + 1.0);
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fp));
    model.fingerprint_ = hex;
    return model;
}

double TfidfModel::idf(std::string_view token) const {
    auto it = vocab_.find(std::string(token));
    return it == vocab_.end() ? 0.0 : idf_[it->second];
}

std::map<std::uint32_t, double> TfidfModel::vector(std::string_view text) const {
    std::map<std::uint32_t, double> vec;
    for (const auto& token : tokenize(text, config_)) {
        auto it = vocab_.find(token);
        if (it == vocab_.end()) continue;
        vec[it->second] += idf_[it->second];
    }
    return vec;
}

void TfidfModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write("LTFV1", 5);
    bytesio::write_u8(out, config_.lowercase ? 1 : 0);
    bytesio::write_u64(out, config_.min_token_len);
    bytesio::write_u64(out, config_.stopwords.size());
    for (const auto& w : config_.stopwords) bytesio::write_str(out, w);
    bytesio::write_str(out, fingerprint_);
    bytesio::write_u64(out, vocab_.size());
    for (const auto& [token, dim] : vocab_) {
        bytesio::write_str(out, token);
        bytesio::write_u32(out, dim);
    }
    for (double v : idf_) bytesio::write_f64(out, v);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

TfidfModel TfidfModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    bytesio::expect_magic(in, "LTFV1", path.string());
    TfidfModel model;
    model.config_.lowercase = bytesio::read_u8(in) != 0;
    model.config_.min_token_len = bytesio::read_u64(in);
    const auto n_stop = bytesio::read_u64(in);
    for (std::uint64_t i = 0; i < n_stop; ++i) model.config_.stopwords.insert(bytesio::read_str(in));
    model.fingerprint_ = bytesio::read_str(in);
    const auto n_vocab = bytesio::read_u64(in);
    for (std::uint64_t i = 0; i < n_vocab; ++i) {
        std::string token = bytesio::read_str(in);
        model.vocab_.emplace(std::move(token), bytesio::read_u32(in));
    }
    model.idf_.resize(n_vocab);
    for (auto& v : model.idf_) v = bytesio::read_f64(in);
    return model;
}

namespace {

double sparse_norm(const std::map<std::uint32_t, double>& v) {
    double s = 0.0;
    for (auto& [dim, w] : v) s += w * w;
    return std::sqrt(s);
}

void normalize_inplace(std::map<std::uint32_t, double>& v) {
    const double norm = sparse_norm(v);
    if (norm <= 0.0) {
        v.clear();
        return;
    }
    for (auto& [dim, w] : v) w /= norm;
}

double sparse_dot(const std::map<std::uint32_t, double>& a, const std::map<std::uint32_t, double>& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& big = a.size() <= b.size() ? b : a;
    double s = 0.0;
    for (auto& [dim, w] : small) {
        auto it = big.find(dim);
        if (it != big.end()) s += w * it->second;
    }
    return s;
}

std::vector<ScoredUnit> rank_normalized(const std::vector<std::string>& ids,
                                        const std::vector<std::map<std::uint32_t, double>>& vectors,
                                        const std::map<std::uint32_t, double>& query_vec,
                                        std::size_t k) {
    std::vector<ScoredUnit> scored;
    scored.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        scored.push_back(ScoredUnit{ids[i], sparse_dot(query_vec, vectors[i])});
    std::sort(scored.begin(), scored.end(), [](const ScoredUnit& a, const ScoredUnit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.id < b.id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

}  // namespace

std::vector<ScoredUnit> cosine_rank_topk(const TfidfModel& model, std::string_view query_text,
                                         const std::vector<std::pair<std::string, std::string>>& units,
                                         std::size_t k) {
    if (k < 1) throw ArgumentError("cosine_rank_topk: k < 1");
    if (!model.fitted()) throw StateError("cosine_rank_topk: tfidf model not fitted");
    TfidfCorpus corpus(model, units);
    return corpus.rank_topk(model, query_text, k);
}

TfidfCorpus::TfidfCorpus(const TfidfModel& model,
                         const std::vector<std::pair<std::string, std::string>>& units) {
    if (!model.fitted()) throw StateError("TfidfCorpus: tfidf model not fitted");
    ids_.reserve(units.size());
    vectors_.reserve(units.size());
    for (const auto& [id, text] : units) {
        ids_.push_back(id);
        auto vec = model.vector(text);
        normalize_inplace(vec);
        vectors_.push_back(std::move(vec));
    }
}

std::vector<ScoredUnit> TfidfCorpus::rank_topk(const TfidfModel& model, std::string_view query_text,
                                               std::size_t k) const {
    if (k < 1) throw ArgumentError("rank_topk: k < 1");
    auto query_vec = model.vector(query_text);
    normalize_inplace(query_vec);
    return rank_normalized(ids_, vectors_, query_vec, k);
}

}  // namespace legalir::lexical
