#include "rnr/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "rnr/errors.hpp"
#include "rnr/rng.hpp"

namespace rnr {

namespace {

double sigmoid(double x) {
    // Clamp keeps exp() well away from overflow; saturation this deep is
    // gradient-free anyway.
    if (x > 30.0) return 1.0;
    if (x < -30.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

// Cumulative unigram^0.75 table for negative sampling.
struct NegativeTable {
    std::vector<double> cumulative;  // per vocabulary row
    double total = 0.0;

    int sample(Rng& rng) const {
        double u = rng.next_double() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) return static_cast<int>(cumulative.size()) - 1;
        return static_cast<int>(it - cumulative.begin());
    }
};

struct TrainState {
    std::vector<std::vector<int>> sentences;  // corpus mapped to vocab rows
    std::int64_t total_tokens = 0;            // in-vocabulary tokens per epoch
};

// One skip-gram/negative-sampling update for a (center, context) pair:
// the center's input vector is trained to score the true context word high
// and `negatives` sampled words low.
void train_pair(std::vector<double>& input, std::vector<double>& output, int dim, int center,
                int context, int negatives, double alpha, const NegativeTable& table, Rng& rng,
                std::vector<double>& scratch) {
    double* v = input.data() + static_cast<std::size_t>(center) * dim;
    std::fill(scratch.begin(), scratch.end(), 0.0);

    for (int k = 0; k <= negatives; ++k) {
        int target;
        double label;
        if (k == 0) {
            target = context;
            label = 1.0;
        } else {
            target = table.sample(rng);
            if (target == context) continue;  // skip accidental positives
            label = 0.0;
        }
        double* u = output.data() + static_cast<std::size_t>(target) * dim;
        double dot = 0.0;
        for (int j = 0; j < dim; ++j) dot += v[j] * u[j];
        double g = alpha * (label - sigmoid(dot));
        for (int j = 0; j < dim; ++j) scratch[j] += g * u[j];
        for (int j = 0; j < dim; ++j) u[j] += g * v[j];
    }
    for (int j = 0; j < dim; ++j) v[j] += scratch[j];
}

// Trains the input/output matrices over sentences [begin, end). `processed`
// tracks tokens consumed across all epochs for the linear LR decay; in the
// parallel mode each worker owns a disjoint sentence range and its own RNG,
// and matrix rows race benignly (hogwild).
void train_range(const TrainState& state, const EmbeddingConfig& config,
                 const NegativeTable& table,
                 std::vector<double>& input, std::vector<double>& output, std::size_t begin,
                 std::size_t end, std::int64_t word_budget, Rng rng) {
    std::vector<double> scratch(config.dim, 0.0);
    std::int64_t processed = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t s = begin; s < end; ++s) {
            const std::vector<int>& sentence = state.sentences[s];
            double alpha = config.learning_rate *
                           std::max(1e-4, 1.0 - static_cast<double>(processed) /
                                              static_cast<double>(word_budget));
            for (std::size_t i = 0; i < sentence.size(); ++i) {
                // Reduced window as in the reference implementation: the
                // effective half-width is uniform in [1, window].
                int half = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.window)));
                std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
                std::size_t hi = std::min(sentence.size() - 1, i + half);
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    train_pair(input, output, config.dim, sentence[i], sentence[j],
                               config.negatives, alpha, table, rng, scratch);
                }
            }
            processed += static_cast<std::int64_t>(sentence.size());
        }
    }
}

}  // namespace

EmbeddingModel train_embeddings(const std::vector<std::vector<std::string>>& corpus,
                                const EmbeddingConfig& config) {
    if (corpus.empty()) {
        throw DataError("train_embeddings: empty corpus");
    }
    if (config.dim <= 0 || config.window <= 0 || config.epochs <= 0 || config.negatives < 0 ||
        config.min_count < 1 || config.learning_rate <= 0.0 || config.threads < 1) {
        throw DataError("train_embeddings: invalid configuration");
    }

    // Vocabulary: frequency >= min_count, rows by (count desc, token asc).
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& sentence : corpus) {
        for (const auto& token : sentence) ++counts[token];
    }
    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (auto& [token, count] : counts) {
        if (count >= config.min_count) kept.emplace_back(token, count);
    }
    if (kept.empty()) {
        throw DataError("train_embeddings: no token meets min_count=" +
                        std::to_string(config.min_count));
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    EmbeddingModel model;
    model.config = config;
    for (const auto& [token, count] : kept) {
        model.vocabulary.emplace(token, static_cast<int>(model.vocabulary.size()));
    }
    const int vocab_size = static_cast<int>(kept.size());
    const int dim = config.dim;

    NegativeTable table;
    table.cumulative.reserve(kept.size());
    for (const auto& [token, count] : kept) {
        table.total += std::pow(static_cast<double>(count), 0.75);
        table.cumulative.push_back(table.total);
    }

    TrainState state;
    state.sentences.reserve(corpus.size());
    for (const auto& sentence : corpus) {
        std::vector<int> mapped;
        mapped.reserve(sentence.size());
        for (const auto& token : sentence) {
            if (auto it = model.vocabulary.find(token); it != model.vocabulary.end()) {
                mapped.push_back(it->second);
            }
        }
        state.total_tokens += static_cast<std::int64_t>(mapped.size());
        state.sentences.push_back(std::move(mapped));
    }

    // Input rows start small and uniform, output rows at zero, as in the
    // reference implementation.
    std::vector<double>& input = model.matrix;
    input.resize(static_cast<std::size_t>(vocab_size) * dim);
    std::vector<double> output(static_cast<std::size_t>(vocab_size) * dim, 0.0);
    Rng init_rng(derive_seed(config.seed, /*stream=*/1));
    for (auto& value : input) value = (init_rng.next_double() - 0.5) / dim;

    const std::int64_t word_budget =
        static_cast<std::int64_t>(config.epochs) * std::max<std::int64_t>(1, state.total_tokens) + 1;

    if (config.threads == 1) {
        train_range(state, config, table, input, output, 0, state.sentences.size(), word_budget,
                    Rng(derive_seed(config.seed, /*stream=*/2)));
    } else {
        // Opt-in hogwild mode: disjoint sentence ranges, shared matrices,
        // no locks — fast but not bit-reproducible.
        std::size_t n = state.sentences.size();
        std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), n);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            std::size_t begin = n * w / workers;
            std::size_t end = n * (w + 1) / workers;
            pool.emplace_back([&, begin, end, w] {
                train_range(state, config, table, input, output, begin, end, word_budget,
                            Rng(derive_seed(config.seed, /*stream=*/2, /*index=*/w)));
            });
        }
        for (auto& t : pool) t.join();
    }

    for (double value : model.matrix) {
        if (!std::isfinite(value)) {
            throw NumericError("train_embeddings: non-finite embedding value");
        }
    }
    return model;
}

std::vector<double> tweet_vector(const EmbeddingModel& model,
                                 const std::vector<std::string>& tokens) {
    std::vector<double> mean(static_cast<std::size_t>(model.config.dim), 0.0);
    int hits = 0;
    for (const auto& token : tokens) {
        auto it = model.vocabulary.find(token);
        if (it == model.vocabulary.end()) continue;
        const double* row = model.row(it->second);
        for (int j = 0; j < model.config.dim; ++j) mean[static_cast<std::size_t>(j)] += row[j];
        ++hits;
    }
    if (hits > 0) {
        for (double& v : mean) v /= hits;
    }
    return mean;
}

void save_embeddings(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    out << "rnr-embeddings v1\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", model.config.learning_rate);
    out << model.vocabulary.size() << ' ' << model.config.dim << ' ' << model.config.window << ' '
        << model.config.negatives << ' ' << model.config.epochs << ' ' << buf << ' '
        << model.config.min_count << ' ' << model.config.seed << ' ' << model.config.threads
        << '\n';

    // Rows in index order so the file is canonical for a given model.
    std::vector<const std::string*> tokens(model.vocabulary.size());
    for (const auto& [token, index] : model.vocabulary) {
        tokens[static_cast<std::size_t>(index)] = &token;
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i]->find_first_of(" \t\n") != std::string::npos) {
            throw DataError("save_embeddings: token contains whitespace: '" + *tokens[i] + "'");
        }
        out << *tokens[i];
        const double* row = model.matrix.data() + i * static_cast<std::size_t>(model.config.dim);
        for (int j = 0; j < model.config.dim; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", row[j]);
            out << ' ' << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw DataError("write to '" + path + "' failed");
    }
}

EmbeddingModel load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::string header;
    std::getline(in, header);
    if (header != "rnr-embeddings v1") {
        throw DataError("'" + path + "': not an embeddings file (bad header)");
    }

    EmbeddingModel model;
    std::size_t vocab_size = 0;
    in >> vocab_size >> model.config.dim >> model.config.window >> model.config.negatives >>
        model.config.epochs >> model.config.learning_rate >> model.config.min_count >>
        model.config.seed >> model.config.threads;
    if (!in || model.config.dim <= 0) {
        throw DataError("'" + path + "': malformed embeddings header");
    }

    model.matrix.resize(vocab_size * static_cast<std::size_t>(model.config.dim));
    for (std::size_t i = 0; i < vocab_size; ++i) {
        std::string token;
        in >> token;
        if (!in || token.empty()) {
            throw DataError("'" + path + "': truncated vocabulary at row " + std::to_string(i));
        }
        if (!model.vocabulary.emplace(token, static_cast<int>(i)).second) {
            throw DataError("'" + path + "': duplicate token '" + token + "'");
        }
        for (int j = 0; j < model.config.dim; ++j) {
            double value;
            in >> value;
            if (!in || !std::isfinite(value)) {
                throw DataError("'" + path + "': bad value in row for '" + token + "'");
            }
            model.matrix[i * static_cast<std::size_t>(model.config.dim) +
                         static_cast<std::size_t>(j)] = value;
        }
    }
    return model;
}

}  // namespace rnr
