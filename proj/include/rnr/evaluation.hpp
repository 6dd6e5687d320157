#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rnr/baselines.hpp"
#include "rnr/core.hpp"
#include "rnr/crf.hpp"
#include "rnr/embeddings.hpp"
#include "rnr/features.hpp"

namespace rnr {

// Everything selectable for one experiment run. `seed` is the single root
// all per-fold randomness is derived from.
enum class ExperimentClassifier : std::uint8_t { Crf, MaxEnt, NaiveBayes, LinearSvm, Enquiry };

std::string_view to_string(ExperimentClassifier classifier);
std::optional<ExperimentClassifier> experiment_classifier_from_string(std::string_view text);

struct ExperimentSpec {
    ExperimentClassifier classifier = ExperimentClassifier::Crf;
    FeatureGroup features = FeatureGroup::ContentAndSocial;
    std::uint64_t seed = 42;
    int jobs = 1;  // fold-level parallelism; never affects results

    EmbeddingConfig embedding;  // seed field overridden per fold
    ChainCrfConfig crf;
    MaxEntConfig maxent;
    SvmConfig svm;  // seed field overridden per fold
    double nb_var_smoothing = 1e-9;
    bool enquiry_corrected_pattern = false;
    std::string tag_file;  // empty → built-in tagger
};

// Leave-one-event-out plan, folds ordered by test event id.
struct Fold {
    std::vector<std::string> train_events;
    std::string test_event;
};
using FoldPlan = std::vector<Fold>;

// Throws DataError with fewer than two events.
FoldPlan make_fold_plan(const Dataset& dataset);

// RUMOUR is the positive class everywhere.
struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
    Confusion& operator+=(const Confusion& other) {
        tp += other.tp;
        fp += other.fp;
        fn += other.fn;
        tn += other.tn;
        return *this;
    }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    friend bool operator==(const Prf&, const Prf&) = default;
};

// Micro-averaging: metrics of the summed counts. Zero denominators give 0
// (a predict-nothing classifier scores (0,0,0) rather than being undefined).
Prf micro_prf(const std::vector<Confusion>& folds);
Prf prf_from_confusion(const Confusion& counts);

// One row of the per-decile breakdown; decile == -1 with flag "whole_event"
// is the fallback for timelines shorter than ten posts. Deciles without any
// gold rumour are flagged "no_positives" (their F1 is 0 by convention).
struct DecileRow {
    std::string event_id;
    int decile = 0;
    Confusion counts;
    double f1 = 0.0;
    std::string flag;

    friend bool operator==(const DecileRow&, const DecileRow&) = default;
};

// Within-decile confusion/F1 for one event; predictions must align with the
// timeline one-to-one (matching ids, timeline order).
std::vector<DecileRow> decile_f1(const EventTimeline& gold,
                                 const std::vector<Prediction>& predictions);

struct FoldOutcome {
    std::string test_event;
    Confusion confusion;
    std::vector<Prediction> predictions;  // timeline order of the test event
    std::vector<Label> gold;              // aligned with predictions
};

struct EvalReport {
    ExperimentSpec spec;
    std::vector<FoldOutcome> folds;  // fold-plan order
    Prf micro;
    std::vector<DecileRow> deciles;
};

// Leave-one-event-out experiment: per fold, embeddings (when content
// features are on) and the standardizer and classifier are fitted on the
// training events only, then the held-out event is predicted — sequentially
// via prefix decoding for the chain model, pointwise otherwise. A leakage
// guard asserts that no post id consumed by a training step appears in the
// test fold. Requires every post labeled.
EvalReport run_experiment(const Dataset& dataset, const ExperimentSpec& spec);

// Writes report.txt (versioned key-value summary), folds.tsv, deciles.tsv
// and predictions.tsv into `directory`. Field order fixed; two identical
// runs emit byte-identical files.
void emit_report(const EvalReport& report, const std::string& directory);

// Reads back the confusion counts and micro metrics from a report.txt —
// the round-trip used by tests to recompute metrics from stored counts.
struct ReportSummary {
    std::string classifier;
    std::string features;
    std::vector<std::pair<std::string, Confusion>> folds;
    Prf micro;
};
ReportSummary load_report_summary(const std::string& path);

}  // namespace rnr
