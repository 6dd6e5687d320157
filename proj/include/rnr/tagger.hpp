#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rnr {

// Fixed 41-tag set: the 36 Penn Treebank word tags followed by five
// Twitter-specific tags. Order is frozen; feature geometry depends on it.
inline constexpr int kNumPosTags = 41;
const std::array<std::string_view, kNumPosTags>& pos_tag_set();

// Index of `tag` in pos_tag_set(); throws DataError for an unknown tag.
int pos_tag_index(std::string_view tag);

struct TokenTag {
    std::string token;
    std::string tag;  // member of pos_tag_set()

    friend bool operator==(const TokenTag&, const TokenTag&) = default;
};

// Tagger tokenization: whitespace chunks are further split so punctuation
// becomes its own token, while @-mentions, #-hashtags, URLs and emoticons
// survive as single tokens. Words keep internal apostrophes/hyphens and
// numbers keep internal . , separators. Distinct from the whitespace-only
// word-count tokenization used by the features module.
std::vector<std::string> tokenize(std::string_view text);

// True when the whole token matches the shipped emoticon pattern list.
bool is_emoticon(std::string_view token);

// Rule-based tagger. Twitter rules (@…→USR, #…→HT, URL→URL, "RT"→RT,
// emoticon→EMO) always apply; remaining tokens go through either the
// built-in closed-class lexicon + suffix rules or, when constructed from a
// tag file, an external token→tag map (exact match, then lowercase match,
// miss → NN). Stateless after construction; safe to share across threads.
class Tagger {
public:
    Tagger() = default;

    // Loads lines of `token<TAB>tag` (UTF-8). Throws DataError on an
    // unreadable file, malformed line, or tag outside pos_tag_set().
    static Tagger from_tag_file(const std::string& path);

    std::vector<TokenTag> tag(const std::vector<std::string>& tokens) const;

private:
    std::string tag_one(const std::string& token) const;

    std::unordered_map<std::string, std::string> external_;
    bool use_external_ = false;
};

// Element i = occurrences of tag i; the vector sums to tags.size().
std::vector<int> pos_count_vector(const std::vector<TokenTag>& tags);

}  // namespace rnr
