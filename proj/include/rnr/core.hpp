#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rnr {

// Binary label set. The order is fixed (NonRumour = 0 < Rumour = 1) and used
// for deterministic tie-breaking throughout.
enum class Label : std::uint8_t { NonRumour = 0, Rumour = 1 };

inline constexpr int kNumLabels = 2;

std::string_view to_string(Label label);

// Accepts "rumour" / "non-rumour" (the normalized record vocabulary).
std::optional<Label> label_from_string(std::string_view text);

// Author metadata carried by every post; source of the social features.
struct AuthorMeta {
    std::int64_t statuses_count = 0;
    std::int64_t listed_count = 0;
    std::int64_t followers_count = 0;
    std::int64_t following_count = 0;
    std::int64_t created_at = 0;  // UTC epoch seconds
    bool verified = false;

    friend bool operator==(const AuthorMeta&, const AuthorMeta&) = default;
};

// One source message. Immutable after construction by convention; nothing in
// the library mutates a Post once it is part of a timeline.
struct Post {
    std::string id;
    std::string event_id;
    std::string text;
    std::int64_t created_at = 0;  // UTC epoch seconds
    std::int64_t retweet_count = 0;
    AuthorMeta author;
    std::vector<std::string> reply_texts;
    std::optional<Label> label;

    friend bool operator==(const Post&, const Post&) = default;
};

// Time-ordered posts of one event; the unit of sequence for the chain model.
// Posts are sorted ascending by (created_at, id) and ids are unique.
struct EventTimeline {
    std::string event_id;
    std::vector<Post> posts;

    friend bool operator==(const EventTimeline&, const EventTimeline&) = default;
};

struct Dataset {
    std::vector<EventTimeline> events;  // sorted by event_id

    std::size_t post_count() const {
        std::size_t n = 0;
        for (const auto& e : events) n += e.posts.size();
        return n;
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Classifier output for one post. `score` is the confidence that the post is
// a rumour. For point classifiers the label is Rumour iff score > 0.5 (ties
// resolve to NonRumour); the chain model labels via decoding and reports the
// filtered marginal as its score, so label and score are coupled more loosely
// there.
struct Prediction {
    std::string post_id;
    Label label = Label::NonRumour;
    double score = 0.0;
};

// Orders posts by (created_at, id) and validates the timeline invariants.
// Throws DataError on an empty list, mixed event ids (naming the offenders),
// empty ids, or duplicate ids.
EventTimeline sort_timeline(std::vector<Post> posts);

// Throws DataError unless every post in the dataset carries a label.
// Training and evaluation call this; prediction-only paths do not.
void require_labeled(const Dataset& dataset);

}  // namespace rnr
