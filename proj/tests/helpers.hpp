#pragma once

// Shared fixtures and independent oracles for the unit suites. The chain
// oracles enumerate all 2^n label sequences directly, so the dynamic
// programs are checked against code that cannot share their bugs.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "rnr/core.hpp"
#include "rnr/crf.hpp"
#include "rnr/features.hpp"
#include "rnr/rng.hpp"

namespace rnrtest {

// Unique temp directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::uint64_t counter = 0;
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("rnr-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline rnr::Post make_post(std::string id, std::string event, std::int64_t created_at,
                           std::string text = "hello", std::optional<rnr::Label> label = {}) {
    rnr::Post p;
    p.id = std::move(id);
    p.event_id = std::move(event);
    p.text = std::move(text);
    p.created_at = created_at;
    p.label = label;
    return p;
}

inline std::shared_ptr<const rnr::FeatureLayout> make_layout(int width,
                                                             const std::string& name = "f") {
    rnr::FeatureLayout layout;
    layout.segments.emplace_back(name, width);
    return std::make_shared<const rnr::FeatureLayout>(std::move(layout));
}

inline rnr::FeatureVector fv(std::shared_ptr<const rnr::FeatureLayout> layout,
                             std::vector<double> values) {
    rnr::FeatureVector v;
    v.values = std::move(values);
    v.layout = std::move(layout);
    return v;
}

inline double logsumexp(const std::vector<double>& v) {
    double m = v.front();
    for (double x : v) m = std::max(m, x);
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Everything the chain DP computes, by enumeration. Sequences are visited
// in lexicographic order (position 0 most significant, NON_RUMOUR < RUMOUR),
// and the MAP keeps the first maximum under strict `>`, which makes it the
// lexicographically smallest argmax.
struct ChainOracle {
    double log_z = 0.0;
    std::vector<double> marginals;       // n × 2
    std::vector<double> pairwise;        // (n-1) × 4
    std::vector<rnr::Label> map_labels;  // lexicographic-min argmax
    double map_score = 0.0;
};

inline double chain_score(const rnr::LogPotentials& scores, const std::vector<int>& y) {
    const std::size_t n = y.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += scores.unary[i * rnr::kNumLabels + static_cast<std::size_t>(y[i])];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        total += scores.transitions[static_cast<std::size_t>(y[i]) * rnr::kNumLabels +
                                    static_cast<std::size_t>(y[i + 1])];
    }
    return total;
}

inline ChainOracle enumerate_chain(const rnr::LogPotentials& scores) {
    const std::size_t n = scores.length();
    const std::size_t count = std::size_t{1} << n;

    ChainOracle oracle;
    std::vector<double> all(count, 0.0);
    std::vector<int> labels(n, 0);
    std::vector<int> best(n, 0);
    double best_score = -std::numeric_limits<double>::infinity();

    for (std::size_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = static_cast<int>((mask >> (n - 1 - i)) & 1u);
        }
        all[mask] = chain_score(scores, labels);
        if (all[mask] > best_score) {  // strict: first (lex-smallest) max wins
            best_score = all[mask];
            best = labels;
        }
    }
    oracle.log_z = logsumexp(all);
    oracle.map_score = best_score;
    for (int y : best) oracle.map_labels.push_back(static_cast<rnr::Label>(y));

    oracle.marginals.assign(n * rnr::kNumLabels, 0.0);
    oracle.pairwise.assign(n > 1 ? (n - 1) * rnr::kNumLabels * rnr::kNumLabels : 0, 0.0);
    for (std::size_t mask = 0; mask < count; ++mask) {
        double p = std::exp(all[mask] - oracle.log_z);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t yi = (mask >> (n - 1 - i)) & 1u;
            oracle.marginals[i * rnr::kNumLabels + yi] += p;
            if (i + 1 < n) {
                std::size_t yj = (mask >> (n - 2 - i)) & 1u;
                oracle.pairwise[i * rnr::kNumLabels * rnr::kNumLabels + yi * rnr::kNumLabels +
                                yj] += p;
            }
        }
    }
    return oracle;
}

// Random potentials for property tests. `grid` values make exact ties
// likely, exercising the tiebreak.
inline rnr::LogPotentials random_potentials(std::size_t n, rnr::Rng& rng, bool grid = false) {
    rnr::LogPotentials scores;
    scores.unary.resize(n * rnr::kNumLabels);
    scores.transitions.resize(rnr::kNumLabels * rnr::kNumLabels);
    auto draw = [&] {
        if (grid) return 0.5 * static_cast<double>(rng.below(5));  // {0,.5,1,1.5,2}
        return rng.uniform(-2.0, 2.0);
    };
    for (double& v : scores.unary) v = draw();
    for (double& v : scores.transitions) v = draw();
    return scores;
}

// Central finite differences of f at x.
inline std::vector<double> finite_difference(const std::function<double(std::vector<double>)>& f,
                                             const std::vector<double>& x, double h = 1e-5) {
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> hi = x;
        std::vector<double> lo = x;
        hi[i] += h;
        lo[i] -= h;
        grad[i] = (f(std::move(hi)) - f(std::move(lo))) / (2.0 * h);
    }
    return grad;
}

inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1.0});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

// Labeled synthetic dataset with a learnable signal in both feature groups:
// rumour and non-rumour posts use disjoint vocabularies and author profiles,
// and labels arrive in sticky runs so sequence structure matters. When
// `enquiry_signal` is set, every rumour gets a reply that matches the
// enquiry patterns and non-rumours get inert replies.
inline rnr::Dataset synthetic_dataset(int events, int posts_per_event, std::uint64_t seed,
                                      bool enquiry_signal = false) {
    static const std::vector<std::string> rumour_words = {
        "unconfirmed", "allegedly", "hoax",   "claim", "breaking",
        "shooter",     "hostage",   "gunman", "siege", "panic",
    };
    static const std::vector<std::string> plain_words = {
        "weather", "sunny",  "football", "score",  "concert",
        "music",   "recipe", "garden",   "coffee", "holiday",
    };

    rnr::Rng rng(seed);
    rnr::Dataset ds;
    for (int e = 0; e < events; ++e) {
        rnr::EventTimeline tl;
        tl.event_id = "ev" + std::to_string(e);
        bool rumour = false;
        for (int i = 0; i < posts_per_event; ++i) {
            if (rng.next_double() < 0.3) rumour = !rumour;  // sticky label runs
            const auto& pool = rumour ? rumour_words : plain_words;

            rnr::Post p;
            char id[32];
            std::snprintf(id, sizeof id, "%s-%03d", tl.event_id.c_str(), i);
            p.id = id;
            p.event_id = tl.event_id;
            p.created_at = 1420000000 + e * 100000 + i * 60;
            p.retweet_count = 100 + static_cast<std::int64_t>(rng.below(50));
            p.text = pool[rng.below(pool.size())] + " " + pool[rng.below(pool.size())] + " " +
                     pool[rng.below(pool.size())];
            p.label = rumour ? rnr::Label::Rumour : rnr::Label::NonRumour;

            p.author.statuses_count = rumour ? 10 : 100000;
            p.author.listed_count = rumour ? 0 : 500;
            p.author.followers_count = rumour ? 5 : 50000;
            p.author.following_count = rumour ? 500 : 50;
            p.author.created_at = p.created_at - (rumour ? 40000000 : 200000000);
            p.author.verified = !rumour;

            if (enquiry_signal) {
                p.reply_texts.push_back(rumour ? "is that true?" : "nice one");
            }
            tl.posts.push_back(std::move(p));
        }
        ds.events.push_back(std::move(tl));
    }
    return ds;
}

}  // namespace rnrtest
