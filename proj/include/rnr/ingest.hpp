#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rnr/core.hpp"

namespace rnr {

// Reads the public PHEME rumours/non-rumours release:
//   root/<event>/{rumours,non-rumours}/<thread>/source-tweet/<id>.json
//                                              /reactions/<id>.json ...
// Each thread's source tweet becomes one Post labeled by its parent folder;
// reaction texts populate reply_texts in (created_at, id) order. Throws
// DataError on an empty root, a thread without exactly one source tweet, or
// malformed JSON (naming the offending path). Missing author fields default
// to 0/false with a logged warning.
Dataset load_pheme(const std::string& root);

// Normalized record file: one JSON object per line, UTF-8, LF endings, keys
// id, event_id, text, created_at (ISO-8601 UTC), retweet_count,
// author{statuses_count, listed_count, followers_count, following_count,
// created_at, verified}, reply_texts, label ("rumour"|"non-rumour"|null).
// Reading is strict about required keys (error cites the line number) and
// ignores unknown extras.
Dataset load_normalized(const std::string& path);

// Inverse of load_normalized: load_normalized(export_normalized(ds)) == ds.
void export_normalized(const Dataset& dataset, const std::string& path);

// Keeps posts with retweet_count >= threshold; timelines left empty are
// dropped. Off by default in the pipeline — the released dataset is already
// sampled — but exposed for raw collections.
Dataset filter_by_retweets(const Dataset& dataset, std::int64_t threshold);

// Half-open index range into a timeline's posts.
struct DecileSlice {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    friend bool operator==(const DecileSlice&, const DecileSlice&) = default;
};

// Ten contiguous slices covering the timeline exactly once, sizes differing
// by at most one: n = 10q + r gives the first r slices q+1 posts. Requires
// at least 10 posts (empty slices are forbidden); shorter timelines must be
// reported whole by the caller instead.
std::array<DecileSlice, 10> decile_partition(const EventTimeline& timeline);

// Element d = rumour share of decile d. Requires every post labeled.
std::array<double, 10> rumour_ratio_by_decile(const EventTimeline& timeline);

}  // namespace rnr
