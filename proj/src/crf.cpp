#include "rnr/crf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rnr/errors.hpp"
#include "rnr/lbfgs.hpp"

namespace rnr {

namespace {

constexpr int kY = kNumLabels;  // 2 throughout; kept symbolic for clarity

double logsumexp2(double a, double b) {
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Best-to-go table: delta[i][y] = best joint score of any completion of the
// prefix-length-`n` problem that labels position i with y.
std::vector<double> best_to_go(const LogPotentials& scores, std::size_t n) {
    const std::vector<double>& u = scores.unary;
    const std::vector<double>& t = scores.transitions;
    std::vector<double> delta(n * kY);
    for (int y = 0; y < kY; ++y) delta[(n - 1) * kY + y] = u[(n - 1) * kY + y];
    for (std::size_t i = n - 1; i-- > 0;) {
        for (int y = 0; y < kY; ++y) {
            double best = t[y * kY + 0] + delta[(i + 1) * kY + 0];
            best = std::max(best, t[y * kY + 1] + delta[(i + 1) * kY + 1]);
            delta[i * kY + y] = u[i * kY + y] + best;
        }
    }
    return delta;
}

// MAP decoding of the first n positions. Selecting greedily from the left,
// preferring NON_RUMOUR on exact ties against the best-to-go table, yields
// the lexicographically smallest maximizer (NON_RUMOUR < RUMOUR, earlier
// positions most significant) — a backpointer argmax would not.
ViterbiResult viterbi_prefix(const LogPotentials& scores, std::size_t n) {
    const std::vector<double>& t = scores.transitions;
    std::vector<double> delta = best_to_go(scores, n);

    ViterbiResult result;
    result.labels.reserve(n);
    int prev = delta[0] >= delta[1] ? 0 : 1;
    result.score = std::max(delta[0], delta[1]);
    result.labels.push_back(static_cast<Label>(prev));
    for (std::size_t i = 1; i < n; ++i) {
        double c0 = t[prev * kY + 0] + delta[i * kY + 0];
        double c1 = t[prev * kY + 1] + delta[i * kY + 1];
        prev = c0 >= c1 ? 0 : 1;
        result.labels.push_back(static_cast<Label>(prev));
    }
    return result;
}

}  // namespace

LogPotentials log_potentials(const ChainCrfModel& model, const std::vector<FeatureVector>& x) {
    if (x.empty()) {
        throw DataError("log_potentials: empty sequence");
    }
    LogPotentials scores;
    scores.unary.resize(x.size() * kY);
    const std::size_t width = static_cast<std::size_t>(model.feature_width);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const FeatureVector& v = x[i];
        if (!v.layout || v.layout->fingerprint() != model.layout_fingerprint) {
            throw DataError("log_potentials: feature layout does not match the model");
        }
        if (v.values.size() != width) {
            throw DataError("log_potentials: feature width mismatch");
        }
        for (int y = 0; y < kY; ++y) {
            const double* w = model.unary_weights.data() + static_cast<std::size_t>(y) * width;
            double dot = model.bias[static_cast<std::size_t>(y)];
            for (std::size_t f = 0; f < width; ++f) dot += w[f] * v.values[f];
            scores.unary[i * kY + y] = dot;
        }
    }
    scores.transitions = model.transitions;
    return scores;
}

ForwardBackward forward_backward(const LogPotentials& scores) {
    const std::size_t n = scores.length();
    const std::vector<double>& u = scores.unary;
    const std::vector<double>& t = scores.transitions;

    ForwardBackward fb;
    fb.alphas.resize(n * kY);
    std::vector<double> betas(n * kY, 0.0);

    for (int y = 0; y < kY; ++y) fb.alphas[y] = u[y];
    for (std::size_t i = 1; i < n; ++i) {
        for (int y = 0; y < kY; ++y) {
            fb.alphas[i * kY + y] =
                u[i * kY + y] + logsumexp2(fb.alphas[(i - 1) * kY + 0] + t[0 * kY + y],
                                           fb.alphas[(i - 1) * kY + 1] + t[1 * kY + y]);
        }
    }
    fb.log_z = logsumexp2(fb.alphas[(n - 1) * kY + 0], fb.alphas[(n - 1) * kY + 1]);

    for (std::size_t i = n - 1; i-- > 0;) {
        for (int y = 0; y < kY; ++y) {
            betas[i * kY + y] =
                logsumexp2(t[y * kY + 0] + u[(i + 1) * kY + 0] + betas[(i + 1) * kY + 0],
                           t[y * kY + 1] + u[(i + 1) * kY + 1] + betas[(i + 1) * kY + 1]);
        }
    }
    fb.log_z_backward = logsumexp2(u[0] + betas[0], u[1] + betas[1]);

    fb.marginals.resize(n * kY);
    for (std::size_t i = 0; i < n; ++i) {
        for (int y = 0; y < kY; ++y) {
            fb.marginals[i * kY + y] = std::exp(fb.alphas[i * kY + y] + betas[i * kY + y] - fb.log_z);
        }
    }
    if (n > 1) {
        fb.pairwise.resize((n - 1) * kY * kY);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (int a = 0; a < kY; ++a) {
                for (int b = 0; b < kY; ++b) {
                    fb.pairwise[i * kY * kY + a * kY + b] =
                        std::exp(fb.alphas[i * kY + a] + t[a * kY + b] + u[(i + 1) * kY + b] +
                                 betas[(i + 1) * kY + b] - fb.log_z);
                }
            }
        }
    }
    return fb;
}

ViterbiResult viterbi(const LogPotentials& scores) {
    return viterbi_prefix(scores, scores.length());
}

std::vector<Prediction> prefix_decode(const ChainCrfModel& model,
                                      const std::vector<FeatureVector>& x,
                                      const std::vector<std::string>& post_ids) {
    if (post_ids.size() != x.size()) {
        throw DataError("prefix_decode: id/vector count mismatch");
    }
    LogPotentials scores = log_potentials(model, x);
    const std::size_t n = scores.length();

    // Forward messages depend only on the prefix, so one pass provides all
    // of the filtered marginals.
    ForwardBackward fb = forward_backward(scores);

    std::vector<Prediction> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ViterbiResult map = viterbi_prefix(scores, i + 1);
        double log_prefix_z = logsumexp2(fb.alphas[i * kY + 0], fb.alphas[i * kY + 1]);
        Prediction p;
        p.post_id = post_ids[i];
        p.label = map.labels.back();
        p.score = std::exp(fb.alphas[i * kY + 1] - log_prefix_z);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<double> pack_parameters(const ChainCrfModel& model) {
    std::vector<double> params;
    params.reserve(model.unary_weights.size() + model.bias.size() + model.transitions.size());
    params.insert(params.end(), model.unary_weights.begin(), model.unary_weights.end());
    params.insert(params.end(), model.bias.begin(), model.bias.end());
    params.insert(params.end(), model.transitions.begin(), model.transitions.end());
    return params;
}

void unpack_parameters(const std::vector<double>& params, ChainCrfModel& model) {
    const std::size_t wn = static_cast<std::size_t>(model.feature_width) * kY;
    if (params.size() != wn + kY + kY * kY) {
        throw DataError("unpack_parameters: size mismatch");
    }
    model.unary_weights.assign(params.begin(), params.begin() + wn);
    model.bias.assign(params.begin() + wn, params.begin() + wn + kY);
    model.transitions.assign(params.begin() + wn + kY, params.end());
}

double nll_and_gradient(const ChainCrfModel& model, const std::vector<SequenceInstance>& batch,
                        std::vector<double>& gradient) {
    const std::size_t width = static_cast<std::size_t>(model.feature_width);
    const std::size_t wn = width * kY;
    gradient.assign(wn + kY + kY * kY, 0.0);
    double* grad_unary = gradient.data();
    double* grad_bias = gradient.data() + wn;
    double* grad_trans = gradient.data() + wn + kY;

    double loss = 0.0;
    for (const SequenceInstance& seq : batch) {
        if (seq.y.size() != seq.x.size() || seq.x.empty()) {
            throw DataError("nll_and_gradient: sequence must be labeled and non-empty");
        }
        LogPotentials scores = log_potentials(model, seq.x);
        ForwardBackward fb = forward_backward(scores);
        const std::size_t n = seq.x.size();

        double joint = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int yi = static_cast<int>(seq.y[i]);
            joint += scores.unary[i * kY + yi];
            if (i + 1 < n) {
                joint += scores.transitions[yi * kY + static_cast<int>(seq.y[i + 1])];
            }
        }
        loss += fb.log_z - joint;

        // model expectation − empirical count, per factor
        for (std::size_t i = 0; i < n; ++i) {
            int yi = static_cast<int>(seq.y[i]);
            for (int y = 0; y < kY; ++y) {
                double coeff = fb.marginals[i * kY + y] - (y == yi ? 1.0 : 0.0);
                if (coeff == 0.0) continue;
                double* g = grad_unary + static_cast<std::size_t>(y) * width;
                const double* xv = seq.x[i].values.data();
                for (std::size_t f = 0; f < width; ++f) g[f] += coeff * xv[f];
                grad_bias[y] += coeff;
            }
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            int a = static_cast<int>(seq.y[i]);
            int b = static_cast<int>(seq.y[i + 1]);
            for (int p = 0; p < kY; ++p) {
                for (int q = 0; q < kY; ++q) {
                    grad_trans[p * kY + q] += fb.pairwise[i * kY * kY + p * kY + q] -
                                              ((p == a && q == b) ? 1.0 : 0.0);
                }
            }
        }
    }

    // L2 term over every parameter, intercepts and transitions included, so
    // the objective stays strictly convex and matches the MaxEnt objective
    // on length-1 sequences.
    std::vector<double> params = pack_parameters(model);
    for (std::size_t j = 0; j < params.size(); ++j) {
        loss += 0.5 * model.l2_lambda * params[j] * params[j];
        gradient[j] += model.l2_lambda * params[j];
    }
    return loss;
}

ChainCrfModel train_crf(const std::vector<SequenceInstance>& sequences,
                        const ChainCrfConfig& config, const std::string& layout_fingerprint) {
    if (sequences.empty()) {
        throw DataError("train_crf: no training sequences");
    }
    for (const auto& seq : sequences) {
        if (seq.x.empty() || seq.y.size() != seq.x.size()) {
            throw DataError("train_crf: every sequence must be non-empty and fully labeled");
        }
    }

    ChainCrfModel model;
    model.feature_width = static_cast<int>(sequences.front().x.front().values.size());
    model.l2_lambda = config.l2_lambda;
    model.layout_fingerprint = layout_fingerprint;
    model.unary_weights.assign(static_cast<std::size_t>(model.feature_width) * kY, 0.0);
    model.bias.assign(kY, 0.0);
    model.transitions.assign(kY * kY, 0.0);

    ChainCrfModel scratch = model;
    auto objective = [&](const std::vector<double>& params, std::vector<double>& grad) {
        unpack_parameters(params, scratch);
        return nll_and_gradient(scratch, sequences, grad);
    };

    LbfgsConfig opt;
    opt.max_iter = config.max_iter;
    opt.tol = config.tol;
    LbfgsResult fit = minimize(objective, pack_parameters(model), opt);
    unpack_parameters(fit.x, model);
    return model;
}

void save_crf(const ChainCrfModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ' ' << buf;
    };
    out << "rnr-crf v1\n";
    out << "fingerprint " << (model.layout_fingerprint.empty() ? "-" : model.layout_fingerprint)
        << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", model.l2_lambda);
    out << "lambda " << buf << '\n';
    out << "width " << model.feature_width << '\n';
    out << "unary";
    for (double v : model.unary_weights) put(v);
    out << "\nbias";
    for (double v : model.bias) put(v);
    out << "\ntransitions";
    for (double v : model.transitions) put(v);
    out << '\n';
    if (!out) {
        throw DataError("write to '" + path + "' failed");
    }
}

ChainCrfModel load_crf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::string header;
    std::getline(in, header);
    if (header != "rnr-crf v1") {
        throw DataError("'" + path + "': not a chain model file (bad header)");
    }
    ChainCrfModel model;
    std::string tag;
    in >> tag >> model.layout_fingerprint;
    if (!in || tag != "fingerprint") {
        throw DataError("'" + path + "': malformed fingerprint line");
    }
    if (model.layout_fingerprint == "-") model.layout_fingerprint.clear();
    in >> tag >> model.l2_lambda;
    if (!in || tag != "lambda") throw DataError("'" + path + "': malformed lambda line");
    in >> tag >> model.feature_width;
    if (!in || tag != "width" || model.feature_width < 0) {
        throw DataError("'" + path + "': malformed width line");
    }

    auto read_block = [&](const char* name, std::size_t count, std::vector<double>& into) {
        in >> tag;
        if (!in || tag != name) {
            throw DataError("'" + path + "': expected " + std::string(name) + " block");
        }
        into.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            in >> into[i];
            if (!in || !std::isfinite(into[i])) {
                throw DataError("'" + path + "': bad value in " + std::string(name) + " block");
            }
        }
    };
    read_block("unary", static_cast<std::size_t>(model.feature_width) * kY, model.unary_weights);
    read_block("bias", kY, model.bias);
    read_block("transitions", kY * kY, model.transitions);
    return model;
}

}  // namespace rnr
