#include "rnr/tagger.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <unordered_map>

#include "rnr/errors.hpp"

namespace rnr {

namespace {

bool is_word_byte(unsigned char c) {
    // Any UTF-8 continuation/lead byte counts as a word character so
    // multi-byte letters stay inside one token.
    return std::isalnum(c) || c >= 0x80;
}

bool is_digit_byte(unsigned char c) { return std::isdigit(c); }

bool starts_url(std::string_view s) {
    auto prefix = [&](std::string_view p) {
        if (s.size() < p.size()) return false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(s[i])) != p[i]) return false;
        }
        return true;
    };
    return prefix("http://") || prefix("https://") || prefix("www.");
}

bool is_mention_or_hashtag_start(std::string_view s) {
    return s.size() >= 2 && (s[0] == '@' || s[0] == '#') &&
           (std::isalnum(static_cast<unsigned char>(s[1])) || s[1] == '_');
}

const std::regex& emoticon_regex() {
    // Whole-token emoticons: eyes+optional nose+mouth, reversed smileys,
    // hearts and a few kaomoji. Fixed list; extending it changes feature
    // geometry, so treat as frozen.
    static const std::regex re(
        R"(^(?:[:;=8xX][-o'^]?[\)\(\]\[dDpP/\\|oO*3]|[\)\(\]\[dD/\\|]['-]?[:;=8]|<3|</3|\^_\^|\^-\^)$)");
    return re;
}

// Closed-class lexicon for the built-in tagger, keyed on lowercase tokens.
const std::unordered_map<std::string_view, std::string_view>& lexicon() {
    static const std::unordered_map<std::string_view, std::string_view> map = {
        // determiners
        {"the", "DT"}, {"a", "DT"}, {"an", "DT"}, {"this", "DT"}, {"that", "DT"},
        {"these", "DT"}, {"those", "DT"}, {"each", "DT"}, {"every", "DT"},
        {"some", "DT"}, {"any", "DT"}, {"no", "DT"}, {"all", "DT"},
        {"both", "DT"}, {"either", "DT"}, {"neither", "DT"}, {"another", "DT"},
        // prepositions / subordinating conjunctions
        {"in", "IN"}, {"on", "IN"}, {"at", "IN"}, {"by", "IN"}, {"for", "IN"},
        {"with", "IN"}, {"from", "IN"}, {"of", "IN"}, {"about", "IN"},
        {"against", "IN"}, {"between", "IN"}, {"into", "IN"}, {"through", "IN"},
        {"during", "IN"}, {"before", "IN"}, {"after", "IN"}, {"above", "IN"},
        {"below", "IN"}, {"under", "IN"}, {"over", "IN"}, {"since", "IN"},
        {"until", "IN"}, {"while", "IN"}, {"because", "IN"}, {"if", "IN"},
        {"than", "IN"}, {"as", "IN"}, {"like", "IN"}, {"near", "IN"},
        {"without", "IN"}, {"within", "IN"}, {"across", "IN"}, {"behind", "IN"},
        {"amid", "IN"}, {"per", "IN"},
        {"to", "TO"},
        // pronouns
        {"i", "PRP"}, {"you", "PRP"}, {"he", "PRP"}, {"she", "PRP"},
        {"it", "PRP"}, {"we", "PRP"}, {"they", "PRP"}, {"me", "PRP"},
        {"him", "PRP"}, {"her", "PRP"}, {"us", "PRP"}, {"them", "PRP"},
        {"myself", "PRP"}, {"yourself", "PRP"}, {"himself", "PRP"},
        {"herself", "PRP"}, {"itself", "PRP"}, {"ourselves", "PRP"},
        {"themselves", "PRP"}, {"someone", "PRP"}, {"anyone", "PRP"},
        {"everyone", "PRP"}, {"nobody", "PRP"}, {"something", "PRP"},
        {"anything", "PRP"}, {"everything", "PRP"}, {"nothing", "PRP"},
        // possessives
        {"my", "PRP$"}, {"your", "PRP$"}, {"his", "PRP$"}, {"its", "PRP$"},
        {"our", "PRP$"}, {"their", "PRP$"}, {"mine", "PRP$"}, {"yours", "PRP$"},
        {"hers", "PRP$"}, {"ours", "PRP$"}, {"theirs", "PRP$"},
        // wh-words
        {"who", "WP"}, {"whom", "WP"}, {"what", "WP"}, {"whose", "WP$"},
        {"which", "WDT"}, {"when", "WRB"}, {"where", "WRB"}, {"why", "WRB"},
        {"how", "WRB"},
        // modals
        {"can", "MD"}, {"could", "MD"}, {"may", "MD"}, {"might", "MD"},
        {"must", "MD"}, {"shall", "MD"}, {"should", "MD"}, {"will", "MD"},
        {"would", "MD"}, {"wo", "MD"}, {"ca", "MD"},
        // coordinating conjunctions
        {"and", "CC"}, {"or", "CC"}, {"but", "CC"}, {"nor", "CC"},
        {"so", "CC"}, {"yet", "CC"},
        // be / have / do
        {"be", "VB"}, {"is", "VBZ"}, {"am", "VBP"}, {"are", "VBP"},
        {"was", "VBD"}, {"were", "VBD"}, {"been", "VBN"}, {"being", "VBG"},
        {"have", "VBP"}, {"has", "VBZ"}, {"had", "VBD"}, {"do", "VBP"},
        {"does", "VBZ"}, {"did", "VBD"},
        // frequent adverbs / particles / misc
        {"not", "RB"}, {"n't", "RB"}, {"never", "RB"}, {"very", "RB"},
        {"too", "RB"}, {"also", "RB"}, {"just", "RB"}, {"now", "RB"},
        {"here", "RB"}, {"again", "RB"}, {"still", "RB"}, {"then", "RB"},
        {"there", "EX"},
        {"up", "RP"}, {"out", "RP"}, {"off", "RP"}, {"down", "RP"},
        // interjections
        {"oh", "UH"}, {"wow", "UH"}, {"hey", "UH"}, {"hi", "UH"},
        {"hello", "UH"}, {"omg", "UH"}, {"lol", "UH"}, {"yes", "UH"},
        {"yeah", "UH"}, {"please", "UH"}, {"ok", "UH"}, {"okay", "UH"},
    };
    return map;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool all_punctuation(std::string_view s) {
    for (unsigned char c : s) {
        if (is_word_byte(c)) return false;
    }
    return !s.empty();
}

bool looks_numeric(std::string_view s) {
    bool digit = false;
    for (unsigned char c : s) {
        if (is_digit_byte(c)) {
            digit = true;
        } else if (c != '.' && c != ',' && c != ':' && c != '%' && c != '$' &&
                   c != '+' && c != '-' && c != '/') {
            return false;
        }
    }
    return digit;
}

// Built-in fallback for tokens no Twitter rule claimed.
std::string builtin_tag(const std::string& token) {
    if (all_punctuation(token)) return "SYM";
    if (looks_numeric(token)) return "CD";

    std::string lower = to_lower(token);
    if (auto it = lexicon().find(lower); it != lexicon().end()) {
        return std::string(it->second);
    }

    // Suffix rules; length guards keep the bare suffixes out.
    auto ends = [&](std::string_view suffix) {
        return lower.size() > suffix.size() &&
               lower.compare(lower.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends("ing") && lower.size() > 4) return "VBG";
    if (ends("ed") && lower.size() > 3) return "VBD";
    if (ends("ly") && lower.size() > 3) return "RB";
    if (ends("s") && lower.size() > 3 && !ends("ss") && !ends("us") && !ends("is")) {
        return "NNS";
    }
    return "NN";
}

}  // namespace

const std::array<std::string_view, kNumPosTags>& pos_tag_set() {
    static const std::array<std::string_view, kNumPosTags> tags = {
        "CC",  "CD",  "DT",   "EX",  "FW",  "IN",  "JJ",   "JJR", "JJS", "LS",
        "MD",  "NN",  "NNP",  "NNPS", "NNS", "PDT", "POS",  "PRP", "PRP$", "RB",
        "RBR", "RBS", "RP",   "SYM", "TO",  "UH",  "VB",   "VBD", "VBG", "VBN",
        "VBP", "VBZ", "WDT",  "WP",  "WP$", "WRB",
        "USR", "HT",  "URL",  "RT",  "EMO",
    };
    return tags;
}

int pos_tag_index(std::string_view tag) {
    static const std::unordered_map<std::string_view, int> index = [] {
        std::unordered_map<std::string_view, int> m;
        for (int i = 0; i < kNumPosTags; ++i) m.emplace(pos_tag_set()[i], i);
        return m;
    }();
    auto it = index.find(tag);
    if (it == index.end()) {
        throw DataError("unknown POS tag '" + std::string(tag) + "'");
    }
    return it->second;
}

bool is_emoticon(std::string_view token) {
    return std::regex_match(token.begin(), token.end(), emoticon_regex());
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;

    std::size_t pos = 0;
    while (pos < text.size()) {
        // Next whitespace-delimited chunk.
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        std::size_t end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        std::string_view chunk = text.substr(pos, end - pos);
        pos = end;

        while (!chunk.empty()) {
            if (starts_url(chunk)) {
                // URLs swallow the rest of the chunk.
                tokens.emplace_back(chunk);
                break;
            }
            if (is_emoticon(chunk)) {
                tokens.emplace_back(chunk);
                break;
            }
            if (is_mention_or_hashtag_start(chunk)) {
                std::size_t n = 1;
                while (n < chunk.size() &&
                       (std::isalnum(static_cast<unsigned char>(chunk[n])) || chunk[n] == '_')) {
                    ++n;
                }
                tokens.emplace_back(chunk.substr(0, n));
                chunk.remove_prefix(n);
                continue;
            }
            unsigned char head = static_cast<unsigned char>(chunk[0]);
            if (is_word_byte(head)) {
                // Maximal word run; apostrophe/hyphen join letters, . and ,
                // join digits ("don't", "co-op", "3.5", "1,000").
                std::size_t n = 1;
                while (n < chunk.size()) {
                    unsigned char c = static_cast<unsigned char>(chunk[n]);
                    if (is_word_byte(c)) {
                        ++n;
                        continue;
                    }
                    bool joiner = (c == '\'' || c == '-') ||
                                  ((c == '.' || c == ',') &&
                                   is_digit_byte(static_cast<unsigned char>(chunk[n - 1])));
                    if (joiner && n + 1 < chunk.size() &&
                        is_word_byte(static_cast<unsigned char>(chunk[n + 1]))) {
                        n += 2;
                        continue;
                    }
                    break;
                }
                tokens.emplace_back(chunk.substr(0, n));
                chunk.remove_prefix(n);
            } else {
                // Punctuation: one character per token.
                tokens.emplace_back(chunk.substr(0, 1));
                chunk.remove_prefix(1);
            }
        }
    }
    return tokens;
}

Tagger Tagger::from_tag_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open tag file '" + path + "'");
    }
    Tagger tagger;
    tagger.use_external_ = true;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw DataError("tag file '" + path + "' line " + std::to_string(lineno) +
                            ": expected token<TAB>tag");
        }
        std::string token = line.substr(0, tab);
        std::string tag = line.substr(tab + 1);
        pos_tag_index(tag);  // validates; throws on unknown tag
        tagger.external_[std::move(token)] = std::move(tag);
    }
    return tagger;
}

std::string Tagger::tag_one(const std::string& token) const {
    // Twitter rules win regardless of the lexical tagger in use.
    if (token == "RT") return "RT";
    if (is_mention_or_hashtag_start(token)) return token[0] == '@' ? "USR" : "HT";
    if (starts_url(token)) return "URL";
    if (is_emoticon(token)) return "EMO";

    if (use_external_) {
        if (auto it = external_.find(token); it != external_.end()) return it->second;
        if (auto it = external_.find(to_lower(token)); it != external_.end()) return it->second;
        return "NN";
    }
    return builtin_tag(token);
}

std::vector<TokenTag> Tagger::tag(const std::vector<std::string>& tokens) const {
    std::vector<TokenTag> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
        out.push_back(TokenTag{token, tag_one(token)});
    }
    return out;
}

std::vector<int> pos_count_vector(const std::vector<TokenTag>& tags) {
    std::vector<int> counts(kNumPosTags, 0);
    for (const auto& tt : tags) {
        ++counts[static_cast<std::size_t>(pos_tag_index(tt.tag))];
    }
    return counts;
}

}  // namespace rnr
