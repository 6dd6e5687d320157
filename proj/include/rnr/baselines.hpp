#pragma once

#include <cstdint>
#include <regex>
#include <string>
#include <vector>

#include "rnr/core.hpp"
#include "rnr/features.hpp"

namespace rnr {

enum class ClassifierKind : std::uint8_t { MaxEnt, NaiveBayes, LinearSvm };

std::string_view to_string(ClassifierKind kind);

// Non-sequential classifier over standardized feature vectors (NB consumes
// raw vectors). Parameter blocks are populated per kind and empty otherwise.
struct PointClassifier {
    ClassifierKind kind = ClassifierKind::MaxEnt;
    std::string layout_fingerprint;

    // MaxEnt: per-class weights (kNumLabels × F) and biases — the same
    // multinomial parameterization as the chain model's unary part, so the
    // two agree exactly on length-1 sequences.
    // LinearSvm: weights holds one row (F), bias one entry.
    std::vector<double> weights;
    std::vector<double> bias;

    // NaiveBayes: per-class Gaussians and priors.
    std::vector<double> means;      // kNumLabels × F
    std::vector<double> variances;  // kNumLabels × F, floored > 0
    std::vector<double> priors;     // kNumLabels

    friend bool operator==(const PointClassifier&, const PointClassifier&) = default;
};

struct MaxEntConfig {
    double l2_lambda = 1.0;
    int max_iter = 500;
    double tol = 1e-5;
};

struct SvmConfig {
    double c = 1.0;
    int epochs = 100;
    std::uint64_t seed = 0;
};

// L2-regularized multinomial logistic regression; deterministic (zero
// initialization, L-BFGS). Throws DataError on empty/degenerate input.
PointClassifier train_maxent(const std::vector<FeatureVector>& vectors,
                             const std::vector<Label>& labels, const MaxEntConfig& config);

// Exposed for the finite-difference gradient check: regularized NLL of the
// packed (weights, bias) parameter vector on the given data.
double maxent_nll_and_gradient(const std::vector<double>& params,
                               const std::vector<FeatureVector>& vectors,
                               const std::vector<Label>& labels, double l2_lambda,
                               std::vector<double>& gradient);

// Per-class, per-dimension Gaussian fit with priors from class frequencies.
// Variance floor = var_smoothing × (largest per-dimension variance over the
// whole training set), falling back to var_smoothing itself when every
// dimension is constant. Throws DataError when only one class is present.
PointClassifier train_nb(const std::vector<FeatureVector>& vectors,
                         const std::vector<Label>& labels, double var_smoothing = 1e-9);

// Linear hinge-loss model trained by seeded stochastic subgradient descent
// (Pegasos-style schedule, λ = 1/(C·N), unregularized intercept).
// Deterministic for a fixed seed.
PointClassifier train_svm(const std::vector<FeatureVector>& vectors,
                          const std::vector<Label>& labels, const SvmConfig& config);

// Primal SVM objective (λ/2)‖w‖² + mean hinge loss — for the reference
// comparison test.
double svm_objective(const PointClassifier& model, const std::vector<FeatureVector>& vectors,
                     const std::vector<Label>& labels, double c);

// Score = P(RUMOUR | x) (MaxEnt, NB posterior) or the logistic link of the
// margin (SVM); label = RUMOUR iff score > 0.5, ties to NON_RUMOUR.
// Throws DataError when the vector's layout differs from the trained one.
Prediction predict(const PointClassifier& classifier, const FeatureVector& vector,
                   const std::string& post_id = "");

// The five enquiry patterns, case-insensitive unanchored substring search.
// Pattern 2 is transcribed verbatim (`wh[a]*t[?!][?1]*`, character class
// `[?1]` and all); corrected_pattern swaps in the presumably intended
// `[?!]*` tail.
class EnquiryRule {
public:
    explicit EnquiryRule(bool corrected_pattern = false);

    const std::vector<std::string>& patterns() const { return patterns_; }
    bool matches(const std::string& text) const;

private:
    std::vector<std::string> patterns_;
    std::vector<std::regex> compiled_;
};

// RUMOUR iff at least one reply matches at least one pattern; the source
// text itself is never searched. Score 1.0 on match, else 0.0.
Prediction enquiry_baseline(const Post& post, const EnquiryRule& rule);

// Versioned text serialization, same scheme as the chain model.
void save_classifier(const PointClassifier& model, const std::string& path);
PointClassifier load_classifier(const std::string& path);

}  // namespace rnr
