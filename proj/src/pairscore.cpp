#include "legalir/pairscore.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "legalir/bytesio.hpp"
#include "legalir/error.hpp"
#include "legalir/lexical.hpp"
#include "legalir/rng.hpp"

namespace legalir::pairscore {

namespace {

constexpr char kFieldSep = '\x1f';

// Marker match ignores a leading "[n]" paragraph ordinal and requires a
// non-alphanumeric boundary after the marker ("Therefore," yes,
// "Thereforeland" no).
bool starts_with_marker(std::string_view sentence, const std::vector<std::string>& markers) {
    std::size_t pos = 0;
    if (!sentence.empty() && sentence[0] == '[') {
        std::size_t digits = 1;
        while (digits < sentence.size() &&
               std::isdigit(static_cast<unsigned char>(sentence[digits]))) {
            ++digits;
        }
        if (digits > 1 && digits < sentence.size() && sentence[digits] == ']') {
            pos = digits + 1;
            while (pos < sentence.size() &&
                   std::isspace(static_cast<unsigned char>(sentence[pos]))) {
                ++pos;
            }
        }
    }
    const std::string_view rest = sentence.substr(pos);
    for (const auto& marker : markers) {
        if (rest.size() < marker.size() || rest.compare(0, marker.size(), marker) != 0) {
            continue;
        }
        if (rest.size() == marker.size() ||
            !std::isalnum(static_cast<unsigned char>(rest[marker.size()]))) {
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<TextPair> extract_weak_pairs(const std::vector<corpus::CaseDocument>& docs,
                                         const WeakLabelConfig& config) {
    if (config.markers.empty()) {
        throw ArgumentError("extract_weak_pairs: marker list is empty");
    }
    std::vector<TextPair> pairs;
    for (const auto& doc : docs) {
        // Seeding per document keeps the sampled negatives independent of
        // the order documents arrive in.
        SplitMix64 gen(config.seed ^ fnv1a64(doc.id));
        for (std::size_t q = 0; q < doc.paragraphs.size(); ++q) {
            for (const auto& sentence : doc.paragraphs[q].sentences) {
                if (!starts_with_marker(sentence, config.markers)) {
                    continue;
                }
                if (q == 0) {
                    continue;  // no preceding paragraph to support the conclusion
                }
                pairs.push_back(
                    {sentence, doc.paragraphs[q - 1].text, PairLabel::positive});

                std::vector<std::size_t> candidates;
                for (std::size_t p = 0; p < doc.paragraphs.size(); ++p) {
                    const std::size_t distance = p > q ? p - q : q - p;
                    if (distance >= config.min_negative_distance) {
                        candidates.push_back(p);
                    }
                }
                const std::size_t take =
                    std::min(config.negatives_per_positive, candidates.size());
                for (std::size_t i = 0; i < take; ++i) {
                    const std::size_t j =
                        i + static_cast<std::size_t>(
                                gen.next_below(static_cast<std::uint64_t>(candidates.size() - i)));
                    std::swap(candidates[i], candidates[j]);
                    pairs.push_back(
                        {sentence, doc.paragraphs[candidates[i]].text, PairLabel::negative});
                }
            }
        }
    }
    return pairs;
}

namespace {

std::uint32_t feature_slot(const std::string& key, std::uint64_t hash_seed, std::size_t dim) {
    return static_cast<std::uint32_t>(fnv1a64(key, kFnvBasis ^ hash_seed) &
                                      (static_cast<std::uint64_t>(dim) - 1));
}

void add_ngrams(const std::vector<std::string>& tokens, char ns, std::uint64_t hash_seed,
                std::size_t dim, FeatureVector& out) {
    std::string key;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        key.assign(1, ns);
        key += kFieldSep;
        key += tokens[i];
        out[feature_slot(key, hash_seed, dim)] += 1.0;
        if (i + 1 < tokens.size()) {
            key += kFieldSep;
            key += tokens[i + 1];
            out[feature_slot(key, hash_seed, dim)] += 1.0;
        }
    }
}

}  // namespace

FeatureVector featurize(std::string_view left, std::string_view right, std::uint64_t hash_seed,
                        std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw ArgumentError("featurize: dim must be a power of two");
    }
    const lexical::TokenizerConfig tok;
    const auto left_tokens = lexical::tokenize(left, tok);
    const auto right_tokens = lexical::tokenize(right, tok);

    FeatureVector out;
    add_ngrams(left_tokens, 'L', hash_seed, dim, out);
    add_ngrams(right_tokens, 'R', hash_seed, dim, out);

    const std::set<std::string> left_set(left_tokens.begin(), left_tokens.end());
    const std::set<std::string> right_set(right_tokens.begin(), right_tokens.end());
    std::size_t shared = 0;
    std::string key;
    for (const auto& token : left_set) {
        if (right_set.count(token) != 0) {
            ++shared;
            key.assign(1, 'X');
            key += kFieldSep;
            key += token;
            out[feature_slot(key, hash_seed, dim)] += 1.0;
        }
    }
    const std::size_t unioned = left_set.size() + right_set.size() - shared;
    const double jaccard =
        unioned == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(unioned);
    key.assign(1, 'J');
    key += kFieldSep;
    key += "overlap";
    out[feature_slot(key, hash_seed, dim)] += jaccard;
    return out;
}

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow for large |z|.
double softplus(double z) {
    if (z > 0.0) {
        return z + std::log1p(std::exp(-z));
    }
    return std::log1p(std::exp(z));
}

double margin(const FeatureVector& features, const std::vector<double>& weights, double bias) {
    double z = bias;
    for (const auto& [slot, value] : features) {
        z += weights[slot] * value;
    }
    return z;
}

}  // namespace

double dataset_loss(const std::vector<FeatureVector>& features, const std::vector<bool>& positive,
                    const std::vector<double>& weights, double bias) {
    if (features.empty() || features.size() != positive.size()) {
        throw ArgumentError("dataset_loss: features and labels must be non-empty and aligned");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double z = margin(features[i], weights, bias);
        // -log p(y|x): softplus(-z) for positives, softplus(z) for negatives.
        total += positive[i] ? softplus(-z) : softplus(z);
    }
    return total / static_cast<double>(features.size());
}

void dataset_gradient(const std::vector<FeatureVector>& features, const std::vector<bool>& positive,
                      const std::vector<double>& weights, double bias,
                      std::vector<double>& grad_weights, double& grad_bias) {
    if (features.empty() || features.size() != positive.size()) {
        throw ArgumentError("dataset_gradient: features and labels must be non-empty and aligned");
    }
    grad_weights.assign(weights.size(), 0.0);
    grad_bias = 0.0;
    const double inv_n = 1.0 / static_cast<double>(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double z = margin(features[i], weights, bias);
        const double residual = logistic(z) - (positive[i] ? 1.0 : 0.0);
        for (const auto& [slot, value] : features[i]) {
            grad_weights[slot] += residual * value * inv_n;
        }
        grad_bias += residual * inv_n;
    }
}

LinearPairScorer::LinearPairScorer(std::size_t dim, std::uint64_t hash_seed)
    : hash_seed_(hash_seed) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw ArgumentError("LinearPairScorer: dim must be a power of two");
    }
    weights_.assign(dim, 0.0);
}

double LinearPairScorer::score(const ScoreRequest& request) const {
    return score_text(request.left, request.right);
}

double LinearPairScorer::score_text(std::string_view left, std::string_view right) const {
    const auto features = featurize(left, right, hash_seed_, weights_.size());
    return logistic(margin(features, weights_, bias_));
}

void LinearPairScorer::fit(const std::vector<TextPair>& pairs, const TrainHyper& hyper) {
    if (pairs.empty()) {
        throw TrainingError("fit: no training pairs");
    }
    bool has_positive = false;
    bool has_negative = false;
    std::vector<FeatureVector> features;
    std::vector<bool> positive;
    features.reserve(pairs.size());
    positive.reserve(pairs.size());
    for (const auto& pair : pairs) {
        if (!pair.label.has_value()) {
            throw TrainingError("fit: unlabeled pair");
        }
        const bool is_positive = *pair.label == PairLabel::positive;
        has_positive = has_positive || is_positive;
        has_negative = has_negative || !is_positive;
        features.push_back(featurize(pair.left, pair.right, hash_seed_, weights_.size()));
        positive.push_back(is_positive);
    }
    if (!has_positive || !has_negative) {
        throw TrainingError("fit: training pairs cover only one class");
    }

    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    SplitMix64 gen(hyper.seed);
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        shuffle(order, gen);
        for (const std::size_t i : order) {
            const double z = margin(features[i], weights_, bias_);
            const double residual = logistic(z) - (positive[i] ? 1.0 : 0.0);
            for (const auto& [slot, value] : features[i]) {
                weights_[slot] -= hyper.lr * (residual * value + hyper.l2 * weights_[slot]);
            }
            bias_ -= hyper.lr * residual;
        }
        epoch_losses_.push_back(dataset_loss(features, positive, weights_, bias_));
        ++trained_epochs_;
    }
}

void LinearPairScorer::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out.write("LPSC1", 5);
    bytesio::write_u64(out, static_cast<std::uint64_t>(weights_.size()));
    bytesio::write_u64(out, hash_seed_);
    bytesio::write_u64(out, static_cast<std::uint64_t>(trained_epochs_));
    bytesio::write_f64(out, bias_);
    for (const double w : weights_) {
        bytesio::write_f64(out, w);
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

LinearPairScorer LinearPairScorer::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    bytesio::expect_magic(in, "LPSC1", path.string());
    const auto dim = static_cast<std::size_t>(bytesio::read_u64(in));
    const std::uint64_t hash_seed = bytesio::read_u64(in);
    const auto trained_epochs = static_cast<std::size_t>(bytesio::read_u64(in));
    LinearPairScorer scorer(dim, hash_seed);
    scorer.bias_ = bytesio::read_f64(in);
    for (std::size_t i = 0; i < dim; ++i) {
        scorer.weights_[i] = bytesio::read_f64(in);
    }
    scorer.trained_epochs_ = trained_epochs;
    return scorer;
}

LinearPairScorer train(const std::vector<TextPair>& pairs, const TrainHyper& hyper,
                       std::size_t dim, std::uint64_t hash_seed) {
    LinearPairScorer scorer(dim, hash_seed);
    scorer.fit(pairs, hyper);
    return scorer;
}

ExternalScoreTable::ExternalScoreTable(double default_score) : default_score_(default_score) {
    if (!(default_score >= 0.0 && default_score <= 1.0)) {
        throw RangeError("ExternalScoreTable: default score outside [0, 1]");
    }
}

void ExternalScoreTable::insert(std::string query_id, std::string candidate_id, double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw RangeError("ExternalScoreTable: score outside [0, 1]");
    }
    scores_[{std::move(query_id), std::move(candidate_id)}] = value;
}

bool ExternalScoreTable::contains(std::string_view query_id, std::string_view candidate_id) const {
    return scores_.find({std::string(query_id), std::string(candidate_id)}) != scores_.end();
}

double ExternalScoreTable::score(const ScoreRequest& request) const {
    const auto it =
        scores_.find({std::string(request.query_id), std::string(request.candidate_id)});
    return it == scores_.end() ? default_score_ : it->second;
}

ExternalScoreTable load_external_scores(const std::filesystem::path& path, double default_score) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    ExternalScoreTable table(default_score);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto where = path.string() + ":" + std::to_string(lineno);
        const std::size_t tab1 = line.find('\t');
        const std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                           : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos ||
            line.find('\t', tab2 + 1) != std::string::npos) {
            throw ParseError(where + ": expected query_id<TAB>candidate_id<TAB>score");
        }
        const std::string query_id = line.substr(0, tab1);
        const std::string candidate_id = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const std::string score_text = line.substr(tab2 + 1);
        if (query_id.empty() || candidate_id.empty()) {
            throw ParseError(where + ": empty id field");
        }
        double value = 0.0;
        std::size_t consumed = 0;
        try {
            value = std::stod(score_text, &consumed);
        } catch (const std::exception&) {
            throw ParseError(where + ": score is not a number: " + score_text);
        }
        if (consumed != score_text.size()) {
            throw ParseError(where + ": score is not a number: " + score_text);
        }
        if (!(value >= 0.0 && value <= 1.0)) {
            throw RangeError(where + ": score outside [0, 1]: " + score_text);
        }
        table.insert(query_id, candidate_id, value);
    }
    return table;
}

}  // namespace legalir::pairscore
