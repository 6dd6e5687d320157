#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rnr/core.hpp"
#include "rnr/features.hpp"

namespace rnr {

// One event timeline prepared for the chain model; y is empty at inference.
struct SequenceInstance {
    std::vector<FeatureVector> x;
    std::vector<Label> y;
};

struct ChainCrfConfig {
    double l2_lambda = 1.0;
    int max_iter = 500;
    double tol = 1e-5;  // gradient infinity-norm
};

// Linear-chain model over the two labels. Unary score of label y at
// position i is unary_weights[y]·x[i] + bias[y]; transition score of the
// pair (a, b) is transitions[a][b], position-independent. The bias column
// exists so that on length-1 sequences the model is exactly the MaxEnt
// classifier (which has one); it is regularized like every other weight.
struct ChainCrfModel {
    int feature_width = 0;
    std::vector<double> unary_weights;  // kNumLabels × feature_width, row-major
    std::vector<double> bias;           // kNumLabels
    std::vector<double> transitions;    // kNumLabels × kNumLabels, row-major
    double l2_lambda = 1.0;
    std::string layout_fingerprint;

    friend bool operator==(const ChainCrfModel&, const ChainCrfModel&) = default;
};

// Log-space factor scores for one sequence.
struct LogPotentials {
    std::vector<double> unary;       // n × kNumLabels, row-major
    std::vector<double> transitions; // kNumLabels × kNumLabels copy
    std::size_t length() const { return unary.size() / kNumLabels; }
};

// Throws DataError when the sequence's layout fingerprint differs from the
// model's.
LogPotentials log_potentials(const ChainCrfModel& model, const std::vector<FeatureVector>& x);

struct ForwardBackward {
    std::vector<double> marginals;  // n × kNumLabels: P(y_i = y | x)
    std::vector<double> pairwise;   // (n-1) × kNumLabels²: P(y_i = a, y_{i+1} = b | x)
    std::vector<double> alphas;     // n × kNumLabels forward log-messages
    double log_z = 0.0;
    double log_z_backward = 0.0;    // same quantity from the backward pass
};

ForwardBackward forward_backward(const LogPotentials& scores);

struct ViterbiResult {
    std::vector<Label> labels;
    double score = 0.0;  // joint log-score of the returned sequence
};

// MAP sequence; among ties, the lexicographically smallest sequence under
// NON_RUMOUR < RUMOUR with earlier positions most significant.
ViterbiResult viterbi(const LogPotentials& scores);

// Per-position predictions that only ever look backwards: the label at i is
// the last label of the MAP decoding of x[1..i], the score is the filtered
// marginal P(y_i = RUMOUR | x[1..i]).
std::vector<Prediction> prefix_decode(const ChainCrfModel& model,
                                      const std::vector<FeatureVector>& x,
                                      const std::vector<std::string>& post_ids);

// Regularized negative log-likelihood over a batch and its gradient with
// respect to (unary_weights, bias, transitions) packed in that order.
// loss = −Σ log p(y|x) + (λ/2)·‖w‖²  with every parameter regularized.
double nll_and_gradient(const ChainCrfModel& model,
                        const std::vector<SequenceInstance>& batch,
                        std::vector<double>& gradient);

// Parameter packing used by nll_and_gradient and train (unary, bias,
// transitions); exposed for the finite-difference tests.
std::vector<double> pack_parameters(const ChainCrfModel& model);
void unpack_parameters(const std::vector<double>& params, ChainCrfModel& model);

// Deterministic training: zero initialization, L-BFGS on the convex
// objective. Throws DataError on an empty/unlabeled batch and NumericError
// on a non-finite loss.
ChainCrfModel train_crf(const std::vector<SequenceInstance>& sequences,
                        const ChainCrfConfig& config, const std::string& layout_fingerprint);

// Versioned text serialization with round-trip-exact weights.
void save_crf(const ChainCrfModel& model, const std::string& path);
ChainCrfModel load_crf(const std::string& path);

}  // namespace rnr
