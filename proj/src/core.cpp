#include "rnr/core.hpp"

#include <algorithm>
#include <unordered_set>

#include "rnr/errors.hpp"

namespace rnr {

std::string_view to_string(Label label) {
    return label == Label::Rumour ? "rumour" : "non-rumour";
}

std::optional<Label> label_from_string(std::string_view text) {
    if (text == "rumour") return Label::Rumour;
    if (text == "non-rumour") return Label::NonRumour;
    return std::nullopt;
}

EventTimeline sort_timeline(std::vector<Post> posts) {
    if (posts.empty()) {
        throw DataError("sort_timeline: cannot build a timeline from zero posts");
    }

    const std::string& event_id = posts.front().event_id;
    for (const auto& p : posts) {
        if (p.id.empty()) {
            throw DataError("sort_timeline: post with empty id in event '" + event_id + "'");
        }
        if (p.event_id != event_id) {
            throw DataError("sort_timeline: mixed event ids '" + event_id + "' and '" +
                            p.event_id + "' (post '" + p.id + "')");
        }
    }

    std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.id < b.id;
    });

    std::unordered_set<std::string_view> seen;
    seen.reserve(posts.size());
    for (const auto& p : posts) {
        if (!seen.insert(p.id).second) {
            throw DataError("sort_timeline: duplicate post id '" + p.id + "' in event '" +
                            event_id + "'");
        }
    }

    return EventTimeline{event_id, std::move(posts)};
}

void require_labeled(const Dataset& dataset) {
    for (const auto& event : dataset.events) {
        for (const auto& post : event.posts) {
            if (!post.label.has_value()) {
                throw DataError("post '" + post.id + "' in event '" + event.event_id +
                                "' has no label; labeled data required");
            }
        }
    }
}

}  // namespace rnr
