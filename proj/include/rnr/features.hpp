#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rnr/core.hpp"
#include "rnr/embeddings.hpp"
#include "rnr/tagger.hpp"

namespace rnr {

enum class FeatureGroup : std::uint8_t { Content, Social, ContentAndSocial };

std::string_view to_string(FeatureGroup group);
std::optional<FeatureGroup> feature_group_from_string(std::string_view text);

// Named contiguous segments describing a feature vector; identical for every
// post within one experiment.
struct FeatureLayout {
    std::vector<std::pair<std::string, int>> segments;  // (name, width)

    int width() const {
        int total = 0;
        for (const auto& [name, w] : segments) total += w;
        return total;
    }
    // Canonical "name:width,…" string; models store it to refuse
    // vectors from a different featurization.
    std::string fingerprint() const;

    friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

struct FeatureVector {
    std::vector<double> values;
    std::shared_ptr<const FeatureLayout> layout;  // shared across one experiment
};

// --- individual feature primitives -----------------------------------------

// Uppercase share of the ASCII-alphabetic characters; 0 when there are none.
double capital_ratio(const std::string& text);

// Number of maximal non-whitespace runs — a plain space-separated token
// count, deliberately coarser than the tagger tokenization.
int word_count(const std::string& text);

struct PunctuationFlags {
    int question = 0;
    int exclamation = 0;
    int period = 0;

    friend bool operator==(const PunctuationFlags&, const PunctuationFlags&) = default;
};
PunctuationFlags punctuation_flags(const std::string& text);

// [ceil(log10(max(1, statuses))), ceil(log10(max(1, listed))),
//  round(log10((followers+1)/(following+1))), round(max(0, account age in
//  365.25-day years)), verified]. Rounding is half-away-from-zero.
std::vector<double> social_features(const AuthorMeta& author, std::int64_t post_time);

// Tokens fed to embedding training and lookup: tagger tokenization folded to
// ASCII lowercase. One definition so the corpus and the per-tweet lookup can
// never drift apart.
std::vector<std::string> embedding_tokens(const std::string& text);

// --- assembly ---------------------------------------------------------------

// Featurizes posts for one experiment fold. Content features need the
// fold's embedding model and a tagger; social-only extraction needs neither.
// Stateless after construction; concurrent assemble calls are safe.
class FeatureExtractor {
public:
    FeatureExtractor(FeatureGroup group, const EmbeddingModel* embeddings, const Tagger* tagger);

    FeatureVector assemble(const Post& post) const;

    FeatureGroup group() const { return group_; }
    const std::shared_ptr<const FeatureLayout>& layout() const { return layout_; }

private:
    FeatureGroup group_;
    const EmbeddingModel* embeddings_;
    const Tagger* tagger_;
    std::shared_ptr<const FeatureLayout> layout_;
};

// --- standardization ---------------------------------------------------------

// Per-dimension z-score fitted on training folds only. Population standard
// deviation (N divisor); zero-std dimensions pass through untouched.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std_dev;
    std::string layout_fingerprint;

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

Standardizer fit_standardizer(const std::vector<FeatureVector>& train);
FeatureVector apply_standardizer(const Standardizer& standardizer, const FeatureVector& vector);

// Tab-separated dump for offline inspection and cross-implementation
// diffing: layout header, then post_id, label, values (round-trip-exact).
void export_feature_matrix(const Dataset& dataset, const FeatureExtractor& extractor,
                           const std::string& path);

}  // namespace rnr
