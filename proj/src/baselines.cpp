#include "rnr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "rnr/errors.hpp"
#include "rnr/lbfgs.hpp"
#include "rnr/rng.hpp"

namespace rnr {

namespace {

constexpr int kY = kNumLabels;
constexpr double kPi = 3.14159265358979323846;

void check_training_input(const std::vector<FeatureVector>& vectors,
                          const std::vector<Label>& labels) {
    if (vectors.empty() || vectors.size() != labels.size()) {
        throw DataError("trainer: need equally many non-empty vectors and labels");
    }
    const FeatureLayout& layout = *vectors.front().layout;
    for (const auto& v : vectors) {
        if (!v.layout || !(*v.layout == layout)) {
            throw DataError("trainer: mixed feature layouts");
        }
    }
}

double sigmoid(double x) {
    if (x > 30.0) return 1.0;
    if (x < -30.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

// P(RUMOUR | x) under the multinomial parameterization: softmax over the
// two class scores collapses to a sigmoid of their difference.
double maxent_rumour_probability(const PointClassifier& model, const std::vector<double>& x) {
    const std::size_t width = x.size();
    double score[kY];
    for (int y = 0; y < kY; ++y) {
        const double* w = model.weights.data() + static_cast<std::size_t>(y) * width;
        double dot = model.bias[static_cast<std::size_t>(y)];
        for (std::size_t f = 0; f < width; ++f) dot += w[f] * x[f];
        score[y] = dot;
    }
    return sigmoid(score[1] - score[0]);
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::MaxEnt: return "maxent";
        case ClassifierKind::NaiveBayes: return "nb";
        case ClassifierKind::LinearSvm: return "svm";
    }
    return "maxent";
}

double maxent_nll_and_gradient(const std::vector<double>& params,
                               const std::vector<FeatureVector>& vectors,
                               const std::vector<Label>& labels, double l2_lambda,
                               std::vector<double>& gradient) {
    const std::size_t width = vectors.front().values.size();
    const std::size_t wn = width * kY;
    gradient.assign(wn + kY, 0.0);
    double* grad_w = gradient.data();
    double* grad_b = gradient.data() + wn;

    double loss = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const double* x = vectors[i].values.data();
        double score[kY];
        for (int y = 0; y < kY; ++y) {
            const double* w = params.data() + static_cast<std::size_t>(y) * width;
            double dot = params[wn + static_cast<std::size_t>(y)];
            for (std::size_t f = 0; f < width; ++f) dot += w[f] * x[f];
            score[y] = dot;
        }
        double m = std::max(score[0], score[1]);
        double log_z = m + std::log(std::exp(score[0] - m) + std::exp(score[1] - m));
        int yi = static_cast<int>(labels[i]);
        loss += log_z - score[yi];
        for (int y = 0; y < kY; ++y) {
            double coeff = std::exp(score[y] - log_z) - (y == yi ? 1.0 : 0.0);
            if (coeff == 0.0) continue;
            double* g = grad_w + static_cast<std::size_t>(y) * width;
            for (std::size_t f = 0; f < width; ++f) g[f] += coeff * x[f];
            grad_b[y] += coeff;
        }
    }
    for (std::size_t j = 0; j < params.size(); ++j) {
        loss += 0.5 * l2_lambda * params[j] * params[j];
        gradient[j] += l2_lambda * params[j];
    }
    return loss;
}

PointClassifier train_maxent(const std::vector<FeatureVector>& vectors,
                             const std::vector<Label>& labels, const MaxEntConfig& config) {
    check_training_input(vectors, labels);
    const std::size_t width = vectors.front().values.size();

    auto objective = [&](const std::vector<double>& params, std::vector<double>& grad) {
        return maxent_nll_and_gradient(params, vectors, labels, config.l2_lambda, grad);
    };
    LbfgsConfig opt;
    opt.max_iter = config.max_iter;
    opt.tol = config.tol;
    LbfgsResult fit = minimize(objective, std::vector<double>(width * kY + kY, 0.0), opt);

    PointClassifier model;
    model.kind = ClassifierKind::MaxEnt;
    model.layout_fingerprint = vectors.front().layout->fingerprint();
    model.weights.assign(fit.x.begin(), fit.x.begin() + static_cast<std::ptrdiff_t>(width * kY));
    model.bias.assign(fit.x.begin() + static_cast<std::ptrdiff_t>(width * kY), fit.x.end());
    return model;
}

PointClassifier train_nb(const std::vector<FeatureVector>& vectors,
                         const std::vector<Label>& labels, double var_smoothing) {
    check_training_input(vectors, labels);
    const std::size_t width = vectors.front().values.size();

    std::size_t class_count[kY] = {0, 0};
    for (Label y : labels) ++class_count[static_cast<int>(y)];
    if (class_count[0] == 0 || class_count[1] == 0) {
        throw DataError("train_nb: training data contains a single class");
    }

    PointClassifier model;
    model.kind = ClassifierKind::NaiveBayes;
    model.layout_fingerprint = vectors.front().layout->fingerprint();
    model.means.assign(static_cast<std::size_t>(kY) * width, 0.0);
    model.variances.assign(static_cast<std::size_t>(kY) * width, 0.0);
    model.priors.assign(kY, 0.0);

    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const int y = static_cast<int>(labels[i]);
        double* mean = model.means.data() + static_cast<std::size_t>(y) * width;
        for (std::size_t f = 0; f < width; ++f) mean[f] += vectors[i].values[f];
    }
    for (int y = 0; y < kY; ++y) {
        double* mean = model.means.data() + static_cast<std::size_t>(y) * width;
        for (std::size_t f = 0; f < width; ++f) mean[f] /= static_cast<double>(class_count[y]);
        model.priors[static_cast<std::size_t>(y)] =
            static_cast<double>(class_count[y]) / static_cast<double>(vectors.size());
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const int y = static_cast<int>(labels[i]);
        const double* mean = model.means.data() + static_cast<std::size_t>(y) * width;
        double* var = model.variances.data() + static_cast<std::size_t>(y) * width;
        for (std::size_t f = 0; f < width; ++f) {
            double d = vectors[i].values[f] - mean[f];
            var[f] += d * d;
        }
    }
    for (int y = 0; y < kY; ++y) {
        double* var = model.variances.data() + static_cast<std::size_t>(y) * width;
        for (std::size_t f = 0; f < width; ++f) var[f] /= static_cast<double>(class_count[y]);
    }

    // Floor relative to the widest dimension of the whole training set;
    // absolute fallback when every dimension is constant.
    std::vector<double> global_mean(width, 0.0), global_var(width, 0.0);
    for (const auto& v : vectors) {
        for (std::size_t f = 0; f < width; ++f) global_mean[f] += v.values[f];
    }
    for (std::size_t f = 0; f < width; ++f) global_mean[f] /= static_cast<double>(vectors.size());
    for (const auto& v : vectors) {
        for (std::size_t f = 0; f < width; ++f) {
            double d = v.values[f] - global_mean[f];
            global_var[f] += d * d;
        }
    }
    double max_var = 0.0;
    for (std::size_t f = 0; f < width; ++f) {
        max_var = std::max(max_var, global_var[f] / static_cast<double>(vectors.size()));
    }
    const double floor = max_var > 0.0 ? var_smoothing * max_var : var_smoothing;
    for (double& v : model.variances) v = std::max(v, floor);
    return model;
}

PointClassifier train_svm(const std::vector<FeatureVector>& vectors,
                          const std::vector<Label>& labels, const SvmConfig& config) {
    check_training_input(vectors, labels);
    if (config.c <= 0.0 || config.epochs < 1) {
        throw DataError("train_svm: invalid configuration");
    }
    const std::size_t width = vectors.front().values.size();
    const std::size_t n = vectors.size();
    const double lambda = 1.0 / (config.c * static_cast<double>(n));

    std::vector<double> w(width, 0.0);
    double b = 0.0;
    Rng rng(derive_seed(config.seed, /*stream=*/3));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::int64_t t = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher–Yates with our own RNG so the visit order is seed-stable.
        for (std::size_t i = n - 1; i > 0; --i) {
            std::size_t j = rng.below(i + 1);
            std::swap(order[i], order[j]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = order[k];
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double y = labels[i] == Label::Rumour ? 1.0 : -1.0;
            const double* x = vectors[i].values.data();
            double margin = b;
            for (std::size_t f = 0; f < width; ++f) margin += w[f] * x[f];
            margin *= y;
            const double shrink = 1.0 - eta * lambda;
            if (margin < 1.0) {
                for (std::size_t f = 0; f < width; ++f) w[f] = shrink * w[f] + eta * y * x[f];
                b += eta * y;
            } else {
                for (std::size_t f = 0; f < width; ++f) w[f] *= shrink;
            }
        }
    }

    PointClassifier model;
    model.kind = ClassifierKind::LinearSvm;
    model.layout_fingerprint = vectors.front().layout->fingerprint();
    model.weights = std::move(w);
    model.bias.assign(1, b);
    for (double v : model.weights) {
        if (!std::isfinite(v)) throw NumericError("train_svm: non-finite weight");
    }
    return model;
}

double svm_objective(const PointClassifier& model, const std::vector<FeatureVector>& vectors,
                     const std::vector<Label>& labels, double c) {
    const std::size_t width = vectors.front().values.size();
    const double lambda = 1.0 / (c * static_cast<double>(vectors.size()));
    double reg = 0.0;
    for (double v : model.weights) reg += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const double y = labels[i] == Label::Rumour ? 1.0 : -1.0;
        double margin = model.bias[0];
        for (std::size_t f = 0; f < width; ++f) margin += model.weights[f] * vectors[i].values[f];
        hinge += std::max(0.0, 1.0 - y * margin);
    }
    return 0.5 * lambda * reg + hinge / static_cast<double>(vectors.size());
}

Prediction predict(const PointClassifier& classifier, const FeatureVector& vector,
                   const std::string& post_id) {
    if (!vector.layout || vector.layout->fingerprint() != classifier.layout_fingerprint) {
        throw DataError("predict: feature layout does not match the trained classifier");
    }

    double score = 0.0;
    switch (classifier.kind) {
        case ClassifierKind::MaxEnt:
            score = maxent_rumour_probability(classifier, vector.values);
            break;
        case ClassifierKind::NaiveBayes: {
            const std::size_t width = vector.values.size();
            double log_joint[kY];
            for (int y = 0; y < kY; ++y) {
                const double* mean = classifier.means.data() + static_cast<std::size_t>(y) * width;
                const double* var =
                    classifier.variances.data() + static_cast<std::size_t>(y) * width;
                double lj = std::log(classifier.priors[static_cast<std::size_t>(y)]);
                for (std::size_t f = 0; f < width; ++f) {
                    double d = vector.values[f] - mean[f];
                    lj += -0.5 * (std::log(2.0 * kPi * var[f]) + d * d / var[f]);
                }
                log_joint[y] = lj;
            }
            score = sigmoid(log_joint[1] - log_joint[0]);
            break;
        }
        case ClassifierKind::LinearSvm: {
            double margin = classifier.bias[0];
            for (std::size_t f = 0; f < vector.values.size(); ++f) {
                margin += classifier.weights[f] * vector.values[f];
            }
            score = sigmoid(margin);  // logistic link onto [0,1]
            break;
        }
    }

    Prediction p;
    p.post_id = post_id;
    p.score = score;
    p.label = score > 0.5 ? Label::Rumour : Label::NonRumour;  // ties → NON_RUMOUR
    return p;
}

EnquiryRule::EnquiryRule(bool corrected_pattern) {
    patterns_ = {
        "is (that|this|it) true",
        corrected_pattern ? "wh[a]*t[?!][?!]*" : "wh[a]*t[?!][?1]*",
        "real\\?|really ?|unconfirmed",
        "rumor|debunk",
        "(that|this|it) is not true",
    };
    for (const auto& p : patterns_) {
        compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    }
}

bool EnquiryRule::matches(const std::string& text) const {
    for (const auto& re : compiled_) {
        if (std::regex_search(text, re)) return true;
    }
    return false;
}

Prediction enquiry_baseline(const Post& post, const EnquiryRule& rule) {
    Prediction p;
    p.post_id = post.id;
    bool hit = false;
    for (const auto& reply : post.reply_texts) {
        if (rule.matches(reply)) {
            hit = true;
            break;
        }
    }
    p.label = hit ? Label::Rumour : Label::NonRumour;
    p.score = hit ? 1.0 : 0.0;
    return p;
}

void save_classifier(const PointClassifier& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    char buf[64];
    auto block = [&](const char* name, const std::vector<double>& values) {
        out << name;
        for (double v : values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ' ' << buf;
        }
        out << '\n';
    };
    out << "rnr-point v1\n";
    out << "kind " << to_string(model.kind) << '\n';
    out << "fingerprint " << (model.layout_fingerprint.empty() ? "-" : model.layout_fingerprint)
        << '\n';
    block("weights", model.weights);
    block("bias", model.bias);
    block("means", model.means);
    block("variances", model.variances);
    block("priors", model.priors);
    if (!out) {
        throw DataError("write to '" + path + "' failed");
    }
}

PointClassifier load_classifier(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::string header;
    std::getline(in, header);
    if (header != "rnr-point v1") {
        throw DataError("'" + path + "': not a point-classifier file (bad header)");
    }
    PointClassifier model;
    std::string tag, kind;
    in >> tag >> kind;
    if (!in || tag != "kind") throw DataError("'" + path + "': malformed kind line");
    if (kind == "maxent") {
        model.kind = ClassifierKind::MaxEnt;
    } else if (kind == "nb") {
        model.kind = ClassifierKind::NaiveBayes;
    } else if (kind == "svm") {
        model.kind = ClassifierKind::LinearSvm;
    } else {
        throw DataError("'" + path + "': unknown classifier kind '" + kind + "'");
    }
    in >> tag >> model.layout_fingerprint;
    if (!in || tag != "fingerprint") {
        throw DataError("'" + path + "': malformed fingerprint line");
    }
    if (model.layout_fingerprint == "-") model.layout_fingerprint.clear();

    // Blocks are written on single lines; read each as a line of doubles.
    auto block = [&](const char* name, std::vector<double>& into) {
        in >> tag;
        if (!in || tag != name) {
            throw DataError("'" + path + "': expected " + std::string(name) + " block");
        }
        std::string rest;
        std::getline(in, rest);
        into.clear();
        std::size_t pos = 0;
        while (pos < rest.size()) {
            while (pos < rest.size() && rest[pos] == ' ') ++pos;
            if (pos >= rest.size()) break;
            std::size_t next = rest.find(' ', pos);
            if (next == std::string::npos) next = rest.size();
            try {
                into.push_back(std::stod(rest.substr(pos, next - pos)));
            } catch (const std::exception&) {
                throw DataError("'" + path + "': bad value in " + std::string(name) + " block");
            }
            pos = next;
        }
        for (double v : into) {
            if (!std::isfinite(v)) {
                throw DataError("'" + path + "': non-finite value in " + std::string(name) +
                                " block");
            }
        }
    };
    block("weights", model.weights);
    block("bias", model.bias);
    block("means", model.means);
    block("variances", model.variances);
    block("priors", model.priors);
    return model;
}

}  // namespace rnr
