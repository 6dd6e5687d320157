#include "rnr/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <utility>

#include "json.hpp"
#include "rnr/errors.hpp"
#include "rnr/log.hpp"
#include "rnr/timeutil.hpp"

namespace rnr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

// Sorted directory listing; std::filesystem iteration order is unspecified
// and ingestion must be deterministic.
std::vector<fs::path> sorted_children(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().filename().string().front() == '.') continue;  // hidden files
        out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Tweet-JSON integer field with forgiving missing-field behavior:
// absent/null → 0 plus a logged warning naming the file and key.
std::int64_t int_or_warn(const json& obj, const char* key, const fs::path& file) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        log_warning("'" + file.string() + "': missing " + key + ", defaulting to 0");
        return 0;
    }
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number()) return std::llround(it->get<double>());
    log_warning("'" + file.string() + "': non-numeric " + key + ", defaulting to 0");
    return 0;
}

AuthorMeta read_author(const json& tweet, const fs::path& file) {
    AuthorMeta author;
    auto it = tweet.find("user");
    if (it == tweet.end() || !it->is_object()) {
        log_warning("'" + file.string() + "': missing user object, defaulting author fields");
        return author;
    }
    const json& user = *it;
    author.statuses_count = int_or_warn(user, "statuses_count", file);
    author.listed_count = int_or_warn(user, "listed_count", file);
    author.followers_count = int_or_warn(user, "followers_count", file);
    author.following_count = int_or_warn(user, "friends_count", file);
    if (auto v = user.find("verified"); v != user.end() && v->is_boolean()) {
        author.verified = v->get<bool>();
    } else {
        log_warning("'" + file.string() + "': missing user.verified, defaulting to false");
    }
    if (auto c = user.find("created_at"); c != user.end() && c->is_string()) {
        author.created_at = timeutil::parse_twitter_time(c->get<std::string>());
    } else {
        log_warning("'" + file.string() + "': missing user.created_at, defaulting to epoch");
    }
    return author;
}

std::string required_text(const json& tweet, const fs::path& file) {
    auto it = tweet.find("text");
    if (it == tweet.end() || !it->is_string()) {
        throw DataError("'" + file.string() + "': missing text field");
    }
    return it->get<std::string>();
}

std::int64_t required_created_at(const json& tweet, const fs::path& file) {
    auto it = tweet.find("created_at");
    if (it == tweet.end() || !it->is_string()) {
        throw DataError("'" + file.string() + "': missing created_at field");
    }
    return timeutil::parse_twitter_time(it->get<std::string>());
}

Post read_thread(const fs::path& thread_dir, const std::string& event_id, Label label) {
    fs::path source_dir = thread_dir / "source-tweet";
    if (!fs::is_directory(source_dir)) {
        throw DataError("thread '" + thread_dir.string() + "' has no source-tweet folder");
    }
    std::vector<fs::path> sources;
    for (const auto& p : sorted_children(source_dir)) {
        if (p.extension() == ".json") sources.push_back(p);
    }
    if (sources.size() != 1) {
        throw DataError("thread '" + thread_dir.string() + "' has " +
                        std::to_string(sources.size()) + " source tweets, expected exactly 1");
    }

    const fs::path& source_file = sources.front();
    json tweet = parse_json_file(source_file);

    Post post;
    post.id = source_file.stem().string();
    post.event_id = event_id;
    post.text = required_text(tweet, source_file);
    post.created_at = required_created_at(tweet, source_file);
    post.retweet_count = int_or_warn(tweet, "retweet_count", source_file);
    post.author = read_author(tweet, source_file);
    post.label = label;

    // Reactions, ordered by (created_at, id) like everything else.
    fs::path reactions_dir = thread_dir / "reactions";
    if (fs::is_directory(reactions_dir)) {
        struct Reaction {
            std::int64_t created_at;
            std::string id;
            std::string text;
        };
        std::vector<Reaction> reactions;
        for (const auto& p : sorted_children(reactions_dir)) {
            if (p.extension() != ".json") continue;
            json reply = parse_json_file(p);
            reactions.push_back(Reaction{required_created_at(reply, p), p.stem().string(),
                                         required_text(reply, p)});
        }
        std::sort(reactions.begin(), reactions.end(), [](const Reaction& a, const Reaction& b) {
            if (a.created_at != b.created_at) return a.created_at < b.created_at;
            return a.id < b.id;
        });
        for (auto& r : reactions) post.reply_texts.push_back(std::move(r.text));
    }
    return post;
}

Dataset assemble(std::map<std::string, std::vector<Post>> by_event) {
    Dataset dataset;
    dataset.events.reserve(by_event.size());
    for (auto& [event_id, posts] : by_event) {
        dataset.events.push_back(sort_timeline(std::move(posts)));
    }
    // std::map iteration already yields event_id order.
    return dataset;
}

}  // namespace

Dataset load_pheme(const std::string& root) {
    fs::path root_path(root);
    if (!fs::is_directory(root_path)) {
        throw DataError("PHEME root '" + root + "' is not a directory");
    }

    std::map<std::string, std::vector<Post>> by_event;
    for (const auto& event_dir : sorted_children(root_path)) {
        if (!fs::is_directory(event_dir)) continue;
        std::string event_id = event_dir.filename().string();

        bool saw_label_dir = false;
        for (const auto& [folder, label] :
             {std::pair{"rumours", Label::Rumour}, std::pair{"non-rumours", Label::NonRumour}}) {
            fs::path label_dir = event_dir / folder;
            if (!fs::is_directory(label_dir)) continue;
            saw_label_dir = true;
            for (const auto& thread_dir : sorted_children(label_dir)) {
                if (!fs::is_directory(thread_dir)) continue;
                by_event[event_id].push_back(read_thread(thread_dir, event_id, label));
            }
        }
        if (!saw_label_dir) {
            log_warning("'" + event_dir.string() +
                        "' has no rumours/ or non-rumours/ folder; skipping");
        }
    }

    if (by_event.empty()) {
        throw DataError("PHEME root '" + root + "' contains no events");
    }
    return assemble(std::move(by_event));
}

Dataset load_normalized(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }

    std::map<std::string, std::vector<Post>> by_event;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;

        auto fail = [&](const std::string& what) -> DataError {
            return DataError("'" + path + "' line " + std::to_string(lineno) + ": " + what);
        };

        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw fail(std::string("malformed record: ") + e.what());
        }
        if (!record.is_object()) throw fail("record is not an object");

        auto field = [&](const json& obj, const char* key) -> const json& {
            auto it = obj.find(key);
            if (it == obj.end()) throw fail(std::string("missing \"") + key + "\" key");
            return *it;
        };
        auto str = [&](const json& obj, const char* key) -> std::string {
            const json& v = field(obj, key);
            if (!v.is_string()) throw fail(std::string("\"") + key + "\" is not a string");
            return v.get<std::string>();
        };
        auto integer = [&](const json& obj, const char* key) -> std::int64_t {
            const json& v = field(obj, key);
            if (!v.is_number_integer()) throw fail(std::string("\"") + key + "\" is not an integer");
            return v.get<std::int64_t>();
        };

        Post post;
        post.id = str(record, "id");
        post.event_id = str(record, "event_id");
        post.text = str(record, "text");
        try {
            post.created_at = timeutil::parse_iso8601(str(record, "created_at"));
        } catch (const DataError& e) {
            throw fail(e.what());
        }
        post.retweet_count = integer(record, "retweet_count");

        const json& author = field(record, "author");
        if (!author.is_object()) throw fail("\"author\" is not an object");
        post.author.statuses_count = integer(author, "statuses_count");
        post.author.listed_count = integer(author, "listed_count");
        post.author.followers_count = integer(author, "followers_count");
        post.author.following_count = integer(author, "following_count");
        try {
            post.author.created_at = timeutil::parse_iso8601(str(author, "created_at"));
        } catch (const DataError& e) {
            throw fail(e.what());
        }
        const json& verified = field(author, "verified");
        if (!verified.is_boolean()) throw fail("\"verified\" is not a boolean");
        post.author.verified = verified.get<bool>();

        const json& replies = field(record, "reply_texts");
        if (!replies.is_array()) throw fail("\"reply_texts\" is not an array");
        for (const auto& r : replies) {
            if (!r.is_string()) throw fail("\"reply_texts\" entry is not a string");
            post.reply_texts.push_back(r.get<std::string>());
        }

        const json& label = field(record, "label");
        if (label.is_null()) {
            post.label = std::nullopt;
        } else if (label.is_string()) {
            post.label = label_from_string(label.get<std::string>());
            if (!post.label) throw fail("\"label\" must be \"rumour\", \"non-rumour\" or null");
        } else {
            throw fail("\"label\" must be \"rumour\", \"non-rumour\" or null");
        }

        by_event[post.event_id].push_back(std::move(post));
    }

    if (by_event.empty()) {
        throw DataError("'" + path + "' contains no records");
    }
    return assemble(std::move(by_event));
}

void export_normalized(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    for (const auto& event : dataset.events) {
        for (const auto& post : event.posts) {
            nlohmann::ordered_json record;
            record["id"] = post.id;
            record["event_id"] = post.event_id;
            record["text"] = post.text;
            record["created_at"] = timeutil::format_iso8601(post.created_at);
            record["retweet_count"] = post.retweet_count;
            nlohmann::ordered_json author;
            author["statuses_count"] = post.author.statuses_count;
            author["listed_count"] = post.author.listed_count;
            author["followers_count"] = post.author.followers_count;
            author["following_count"] = post.author.following_count;
            author["created_at"] = timeutil::format_iso8601(post.author.created_at);
            author["verified"] = post.author.verified;
            record["author"] = std::move(author);
            record["reply_texts"] = post.reply_texts;
            if (post.label.has_value()) {
                record["label"] = std::string(to_string(*post.label));
            } else {
                record["label"] = nullptr;
            }
            out << record.dump() << '\n';
        }
    }
    if (!out) {
        throw DataError("write to '" + path + "' failed");
    }
}

Dataset filter_by_retweets(const Dataset& dataset, std::int64_t threshold) {
    Dataset filtered;
    for (const auto& event : dataset.events) {
        EventTimeline kept;
        kept.event_id = event.event_id;
        for (const auto& post : event.posts) {
            if (post.retweet_count >= threshold) kept.posts.push_back(post);
        }
        if (!kept.posts.empty()) filtered.events.push_back(std::move(kept));
    }
    return filtered;
}

std::array<DecileSlice, 10> decile_partition(const EventTimeline& timeline) {
    const std::size_t n = timeline.posts.size();
    if (n < 10) {
        throw DataError("decile_partition: event '" + timeline.event_id + "' has " +
                        std::to_string(n) + " posts; at least 10 required");
    }
    const std::size_t q = n / 10;
    const std::size_t r = n % 10;
    std::array<DecileSlice, 10> slices;
    std::size_t begin = 0;
    for (std::size_t d = 0; d < 10; ++d) {
        std::size_t size = q + (d < r ? 1 : 0);  // first r slices absorb the remainder
        slices[d] = DecileSlice{begin, begin + size};
        begin += size;
    }
    return slices;
}

std::array<double, 10> rumour_ratio_by_decile(const EventTimeline& timeline) {
    auto slices = decile_partition(timeline);
    std::array<double, 10> ratios{};
    for (std::size_t d = 0; d < 10; ++d) {
        std::size_t rumours = 0;
        for (std::size_t i = slices[d].begin; i < slices[d].end; ++i) {
            const Post& post = timeline.posts[i];
            if (!post.label.has_value()) {
                throw DataError("rumour_ratio_by_decile: post '" + post.id + "' has no label");
            }
            if (*post.label == Label::Rumour) ++rumours;
        }
        ratios[d] = static_cast<double>(rumours) / static_cast<double>(slices[d].size());
    }
    return ratios;
}

}  // namespace rnr
