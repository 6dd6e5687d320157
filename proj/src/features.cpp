#include "rnr/features.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rnr/errors.hpp"
#include "rnr/timeutil.hpp"

namespace rnr {

namespace {

// Segment names are part of the exported format; treat as frozen.
constexpr const char* kWordVectors = "word_vectors";
constexpr const char* kPosCounts = "pos_counts";
constexpr const char* kCapitalRatio = "capital_ratio";
constexpr const char* kWordCount = "word_count";
constexpr const char* kQuestion = "question";
constexpr const char* kExclamation = "exclamation";
constexpr const char* kPeriod = "period";
constexpr const char* kTweetCountLog = "tweet_count_log";
constexpr const char* kListedCountLog = "listed_count_log";
constexpr const char* kFollowRatioLog = "follow_ratio_log";
constexpr const char* kAccountAgeYears = "account_age_years";
constexpr const char* kVerified = "verified";

std::shared_ptr<const FeatureLayout> make_layout(FeatureGroup group, int dim) {
    FeatureLayout layout;
    if (group == FeatureGroup::Content || group == FeatureGroup::ContentAndSocial) {
        layout.segments.emplace_back(kWordVectors, dim);
        layout.segments.emplace_back(kPosCounts, kNumPosTags);
        layout.segments.emplace_back(kCapitalRatio, 1);
        layout.segments.emplace_back(kWordCount, 1);
        layout.segments.emplace_back(kQuestion, 1);
        layout.segments.emplace_back(kExclamation, 1);
        layout.segments.emplace_back(kPeriod, 1);
    }
    if (group == FeatureGroup::Social || group == FeatureGroup::ContentAndSocial) {
        layout.segments.emplace_back(kTweetCountLog, 1);
        layout.segments.emplace_back(kListedCountLog, 1);
        layout.segments.emplace_back(kFollowRatioLog, 1);
        layout.segments.emplace_back(kAccountAgeYears, 1);
        layout.segments.emplace_back(kVerified, 1);
    }
    return std::make_shared<const FeatureLayout>(std::move(layout));
}

}  // namespace

std::string_view to_string(FeatureGroup group) {
    switch (group) {
        case FeatureGroup::Content: return "content";
        case FeatureGroup::Social: return "social";
        case FeatureGroup::ContentAndSocial: return "both";
    }
    return "both";
}

std::optional<FeatureGroup> feature_group_from_string(std::string_view text) {
    if (text == "content") return FeatureGroup::Content;
    if (text == "social") return FeatureGroup::Social;
    if (text == "both") return FeatureGroup::ContentAndSocial;
    return std::nullopt;
}

std::string FeatureLayout::fingerprint() const {
    std::string out;
    for (const auto& [name, width] : segments) {
        if (!out.empty()) out += ',';
        out += name;
        out += ':';
        out += std::to_string(width);
    }
    return out;
}

double capital_ratio(const std::string& text) {
    int alpha = 0;
    int upper = 0;
    for (unsigned char c : text) {
        if (std::isalpha(c)) {
            ++alpha;
            if (std::isupper(c)) ++upper;
        }
    }
    if (alpha == 0) return 0.0;
    return static_cast<double>(upper) / static_cast<double>(alpha);
}

int word_count(const std::string& text) {
    int count = 0;
    bool in_run = false;
    for (unsigned char c : text) {
        bool space = std::isspace(c);
        if (!space && !in_run) ++count;
        in_run = !space;
    }
    return count;
}

PunctuationFlags punctuation_flags(const std::string& text) {
    PunctuationFlags flags;
    for (char c : text) {
        if (c == '?') flags.question = 1;
        if (c == '!') flags.exclamation = 1;
        if (c == '.') flags.period = 1;
    }
    return flags;
}

std::vector<double> social_features(const AuthorMeta& author, std::int64_t post_time) {
    auto ceil_log10 = [](std::int64_t count) {
        return std::ceil(std::log10(static_cast<double>(std::max<std::int64_t>(1, count))));
    };
    // +1 on both sides keeps the ratio finite and positive for zero counts.
    double ratio = static_cast<double>(author.followers_count + 1) /
                   static_cast<double>(author.following_count + 1);
    double age_years = std::max(0.0, timeutil::years_between(author.created_at, post_time));
    return {
        ceil_log10(author.statuses_count),
        ceil_log10(author.listed_count),
        std::round(std::log10(ratio)),  // half away from zero
        std::round(age_years),
        author.verified ? 1.0 : 0.0,
    };
}

std::vector<std::string> embedding_tokens(const std::string& text) {
    std::vector<std::string> tokens = tokenize(text);
    for (auto& token : tokens) {
        for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return tokens;
}

FeatureExtractor::FeatureExtractor(FeatureGroup group, const EmbeddingModel* embeddings,
                                   const Tagger* tagger)
    : group_(group), embeddings_(embeddings), tagger_(tagger) {
    bool content = group != FeatureGroup::Social;
    if (content && embeddings_ == nullptr) {
        throw DataError("FeatureExtractor: content features need an embedding model");
    }
    if (content && tagger_ == nullptr) {
        throw DataError("FeatureExtractor: content features need a tagger");
    }
    layout_ = make_layout(group, content ? embeddings_->config.dim : 0);
}

FeatureVector FeatureExtractor::assemble(const Post& post) const {
    FeatureVector out;
    out.layout = layout_;
    out.values.reserve(static_cast<std::size_t>(layout_->width()));

    if (group_ != FeatureGroup::Social) {
        std::vector<std::string> tokens = tokenize(post.text);
        std::vector<double> wv = tweet_vector(*embeddings_, embedding_tokens(post.text));
        out.values.insert(out.values.end(), wv.begin(), wv.end());
        for (int count : pos_count_vector(tagger_->tag(tokens))) {
            out.values.push_back(static_cast<double>(count));
        }
        out.values.push_back(capital_ratio(post.text));
        out.values.push_back(static_cast<double>(word_count(post.text)));
        PunctuationFlags flags = punctuation_flags(post.text);
        out.values.push_back(static_cast<double>(flags.question));
        out.values.push_back(static_cast<double>(flags.exclamation));
        out.values.push_back(static_cast<double>(flags.period));
    }
    if (group_ != FeatureGroup::Content) {
        std::vector<double> social = social_features(post.author, post.created_at);
        out.values.insert(out.values.end(), social.begin(), social.end());
    }

    for (double v : out.values) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite feature value for post '" + post.id + "'");
        }
    }
    return out;
}

Standardizer fit_standardizer(const std::vector<FeatureVector>& train) {
    if (train.empty()) {
        throw DataError("fit_standardizer: empty training set");
    }
    const FeatureLayout& layout = *train.front().layout;
    const std::size_t width = static_cast<std::size_t>(layout.width());
    for (const auto& v : train) {
        if (!v.layout || !(*v.layout == layout)) {
            throw DataError("fit_standardizer: mixed feature layouts");
        }
    }

    Standardizer s;
    s.layout_fingerprint = layout.fingerprint();
    s.mean.assign(width, 0.0);
    s.std_dev.assign(width, 0.0);
    const double n = static_cast<double>(train.size());
    for (const auto& v : train) {
        for (std::size_t j = 0; j < width; ++j) s.mean[j] += v.values[j];
    }
    for (std::size_t j = 0; j < width; ++j) s.mean[j] /= n;
    for (const auto& v : train) {
        for (std::size_t j = 0; j < width; ++j) {
            double d = v.values[j] - s.mean[j];
            s.std_dev[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < width; ++j) s.std_dev[j] = std::sqrt(s.std_dev[j] / n);
    return s;
}

FeatureVector apply_standardizer(const Standardizer& standardizer, const FeatureVector& vector) {
    if (!vector.layout || vector.layout->fingerprint() != standardizer.layout_fingerprint) {
        throw DataError("apply_standardizer: feature layout does not match the fitted layout");
    }
    FeatureVector out;
    out.layout = vector.layout;
    out.values.resize(vector.values.size());
    for (std::size_t j = 0; j < vector.values.size(); ++j) {
        // Zero-variance dimensions pass through untouched.
        out.values[j] = standardizer.std_dev[j] > 0.0
                            ? (vector.values[j] - standardizer.mean[j]) / standardizer.std_dev[j]
                            : vector.values[j];
    }
    return out;
}

void export_feature_matrix(const Dataset& dataset, const FeatureExtractor& extractor,
                           const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    out << "post_id\tlabel";
    for (const auto& [name, width] : extractor.layout()->segments) {
        out << '\t' << name << ':' << width;
    }
    out << '\n';

    char buf[64];
    for (const auto& event : dataset.events) {
        for (const auto& post : event.posts) {
            out << post.id << '\t'
                << (post.label.has_value() ? to_string(*post.label) : std::string_view("null"));
            FeatureVector v = extractor.assemble(post);
            for (double value : v.values) {
                std::snprintf(buf, sizeof buf, "%.17g", value);
                out << '\t' << buf;
            }
            out << '\n';
        }
    }
    if (!out) {
        throw DataError("write to '" + path + "' failed");
    }
}

}  // namespace rnr
