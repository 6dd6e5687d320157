#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace rnr {

// Skip-gram/negative-sampling hyperparameters. Only the dimensionality
// (300) is pinned by the experiments; the rest follow common practice and
// are exposed in the experiment config. threads > 1 opts into hogwild-style parallel
// training, which is faster but not bit-reproducible.
struct EmbeddingConfig {
    int dim = 300;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;  // linearly decayed to 1e-4 of itself
    int min_count = 1;
    std::uint64_t seed = 0;
    int threads = 1;

    friend bool operator==(const EmbeddingConfig&, const EmbeddingConfig&) = default;
};

struct EmbeddingModel {
    EmbeddingConfig config;
    std::unordered_map<std::string, int> vocabulary;  // token → row
    std::vector<double> matrix;                       // row-major |V| × dim input vectors

    const double* row(int index) const {
        return matrix.data() + static_cast<std::size_t>(index) * config.dim;
    }

    friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;
};

// Trains skip-gram embeddings with negative sampling. Deterministic for a
// fixed seed when threads == 1: sentences are visited in corpus order and
// all randomness comes from the seed. Vocabulary keeps tokens with
// frequency >= min_count, rows ordered by (frequency desc, token asc).
// Throws DataError on an empty corpus or an empty surviving vocabulary.
EmbeddingModel train_embeddings(const std::vector<std::vector<std::string>>& corpus,
                                const EmbeddingConfig& config);

// Mean of the in-vocabulary token rows; the zero vector when nothing is in
// vocabulary. Permutation-invariant in `tokens`.
std::vector<double> tweet_vector(const EmbeddingModel& model,
                                 const std::vector<std::string>& tokens);

// Version-tagged text format: header line, config line, then one
// `token v1 … vd` line per vocabulary row with round-trip-exact doubles.
void save_embeddings(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_embeddings(const std::string& path);

}  // namespace rnr
