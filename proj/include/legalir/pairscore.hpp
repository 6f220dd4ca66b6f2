#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "legalir/corpus.hpp"

namespace legalir::pairscore {

enum class PairLabel { positive, negative };

struct TextPair {
    std::string left;   // decision sentence / fragment / question
    std::string right;  // candidate paragraph / article
    std::optional<PairLabel> label;
};

struct WeakLabelConfig {
    std::vector<std::string> markers = {"Therefore", "Accordingly", "For these reasons",
                                        "Consequently"};
    std::size_t negatives_per_positive = 3;
    std::size_t min_negative_distance = 2;  // paragraphs away from the marker sentence
    std::uint64_t seed = 0;
};

// For each sentence that begins with a discourse marker (after an optional
// leading "[n]" ordinal), emits a positive pair with the immediately
// preceding paragraph plus sampled distant negatives from the same document.
// Negative sampling is seeded per document, so the output multiset does not
// depend on input document order.
std::vector<TextPair> extract_weak_pairs(const std::vector<corpus::CaseDocument>& docs,
                                         const WeakLabelConfig& config = {});

// What a scorer may look at: table-backed scorers use the ids, text scorers
// use the texts. Pipelines fill in whatever they have.
struct ScoreRequest {
    std::string_view query_id;
    std::string_view candidate_id;
    std::string_view left;
    std::string_view right;
};

class PairScorer {
public:
    virtual ~PairScorer() = default;
    virtual double score(const ScoreRequest& request) const = 0;  // in [0, 1]
};

using FeatureVector = std::map<std::uint32_t, double>;

// Hashed unigrams/bigrams of each side (namespaces L and R), hashed shared
// tokens (namespace X), plus one real-valued Jaccard overlap feature.
// Unsigned additive hashing into `dim` slots; `dim` must be a power of two.
FeatureVector featurize(std::string_view left, std::string_view right, std::uint64_t hash_seed,
                        std::size_t dim);

struct TrainHyper {
    double lr = 0.1;
    std::size_t epochs = 5;
    double l2 = 1e-6;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultFeatureDim = std::size_t{1} << 18;

/// Feature-hashed logistic classifier trained with SGD. Deterministic:
/// identical pairs, hyperparameters and seed give bit-identical weights.
class LinearPairScorer : public PairScorer {
public:
    explicit LinearPairScorer(std::size_t dim = kDefaultFeatureDim, std::uint64_t hash_seed = 0);

    double score(const ScoreRequest& request) const override;
    double score_text(std::string_view left, std::string_view right) const;

    // Continues from the current weights; trained_epochs accumulates.
    void fit(const std::vector<TextPair>& pairs, const TrainHyper& hyper = {});

    std::size_t dim() const { return weights_.size(); }
    std::uint64_t hash_seed() const { return hash_seed_; }
    double bias() const { return bias_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t trained_epochs() const { return trained_epochs_; }
    const std::vector<double>& epoch_losses() const { return epoch_losses_; }

    void save(const std::filesystem::path& path) const;
    static LinearPairScorer load(const std::filesystem::path& path);

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::uint64_t hash_seed_ = 0;
    std::size_t trained_epochs_ = 0;
    std::vector<double> epoch_losses_;  // average logistic loss per epoch, most recent fit's history appended
};

LinearPairScorer train(const std::vector<TextPair>& pairs, const TrainHyper& hyper = {},
                       std::size_t dim = kDefaultFeatureDim, std::uint64_t hash_seed = 0);

/// Precomputed (query_id, candidate_id) -> score table; the entry point for
/// scores produced by external neural models.
class ExternalScoreTable : public PairScorer {
public:
    explicit ExternalScoreTable(double default_score = 0.0);

    void insert(std::string query_id, std::string candidate_id, double value);
    bool contains(std::string_view query_id, std::string_view candidate_id) const;
    double score(const ScoreRequest& request) const override;
    std::size_t size() const { return scores_.size(); }
    double default_score() const { return default_score_; }

private:
    std::map<std::pair<std::string, std::string>, double> scores_;
    double default_score_;
};

// TSV contract: "query_id<TAB>candidate_id<TAB>score", no header.
ExternalScoreTable load_external_scores(const std::filesystem::path& path, double default_score = 0.0);

double logistic(double z);

// Full-batch logistic loss and gradient over featurized pairs; the analytic
// gradient is what the finite-difference property test checks against.
double dataset_loss(const std::vector<FeatureVector>& features, const std::vector<bool>& positive,
                    const std::vector<double>& weights, double bias);
void dataset_gradient(const std::vector<FeatureVector>& features, const std::vector<bool>& positive,
                      const std::vector<double>& weights, double bias,
                      std::vector<double>& grad_weights, double& grad_bias);

}  // namespace legalir::pairscore
