#include "rnr/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "rnr/errors.hpp"
#include "rnr/ingest.hpp"
#include "rnr/log.hpp"
#include "rnr/rng.hpp"
#include "rnr/tagger.hpp"

namespace rnr {

namespace {

// derive_seed stream ids used at the experiment level.
constexpr std::uint64_t kStreamEmbedding = 10;
constexpr std::uint64_t kStreamSvm = 11;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Confusion confusion_from(const EventTimeline& gold, const std::vector<Prediction>& predictions,
                         std::size_t begin, std::size_t end) {
    Confusion c;
    for (std::size_t i = begin; i < end; ++i) {
        bool gold_rumour = gold.posts[i].label == Label::Rumour;
        bool pred_rumour = predictions[i].label == Label::Rumour;
        if (gold_rumour && pred_rumour) ++c.tp;
        if (!gold_rumour && pred_rumour) ++c.fp;
        if (gold_rumour && !pred_rumour) ++c.fn;
        if (!gold_rumour && !pred_rumour) ++c.tn;
    }
    return c;
}

void check_alignment(const EventTimeline& gold, const std::vector<Prediction>& predictions) {
    if (predictions.size() != gold.posts.size()) {
        throw DataError("predictions for event '" + gold.event_id +
                        "' do not cover the timeline");
    }
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].post_id != gold.posts[i].id) {
            throw DataError("prediction order mismatch at post '" + gold.posts[i].id + "'");
        }
        if (!gold.posts[i].label.has_value()) {
            throw DataError("post '" + gold.posts[i].id + "' has no gold label");
        }
    }
}

// Training-side bookkeeping for the leakage guard: every post id a training
// step consumes is registered and checked against the held-out event.
struct LeakageGuard {
    std::unordered_set<std::string> train_ids;

    void consume(const Post& post) { train_ids.insert(post.id); }
    void assert_disjoint(const EventTimeline& test) const {
        for (const auto& post : test.posts) {
            if (train_ids.count(post.id) != 0) {
                throw DataError("leakage: test post '" + post.id +
                                "' was consumed during training");
            }
        }
    }
};

FoldOutcome run_fold(const Dataset& dataset, const ExperimentSpec& spec, const Fold& fold,
                     std::size_t fold_index, const Tagger& tagger) {
    const EventTimeline* test = nullptr;
    std::vector<const EventTimeline*> train;
    for (const auto& event : dataset.events) {
        if (event.event_id == fold.test_event) {
            test = &event;
        } else {
            train.push_back(&event);
        }
    }
    if (test == nullptr) {
        throw DataError("fold test event '" + fold.test_event + "' not in dataset");
    }

    FoldOutcome outcome;
    outcome.test_event = fold.test_event;
    outcome.gold.reserve(test->posts.size());
    for (const auto& post : test->posts) outcome.gold.push_back(*post.label);

    LeakageGuard guard;

    if (spec.classifier == ExperimentClassifier::Enquiry) {
        // No training step at all; the rule is fixed.
        EnquiryRule rule(spec.enquiry_corrected_pattern);
        for (const auto& post : test->posts) {
            outcome.predictions.push_back(enquiry_baseline(post, rule));
        }
    } else {
        const bool content = spec.features != FeatureGroup::Social;

        EmbeddingModel embeddings;
        if (content) {
            std::vector<std::vector<std::string>> corpus;
            for (const EventTimeline* event : train) {
                for (const auto& post : event->posts) {
                    corpus.push_back(embedding_tokens(post.text));
                    guard.consume(post);
                }
            }
            EmbeddingConfig config = spec.embedding;
            config.seed = derive_seed(spec.seed, kStreamEmbedding, fold_index);
            embeddings = train_embeddings(corpus, config);
        }

        FeatureExtractor extractor(spec.features, content ? &embeddings : nullptr, &tagger);

        // Featurize training posts, keeping the per-event grouping for the
        // chain model.
        std::vector<std::vector<FeatureVector>> train_x(train.size());
        std::vector<std::vector<Label>> train_y(train.size());
        std::vector<FeatureVector> flat_x;
        std::vector<Label> flat_y;
        for (std::size_t e = 0; e < train.size(); ++e) {
            for (const auto& post : train[e]->posts) {
                train_x[e].push_back(extractor.assemble(post));
                train_y[e].push_back(*post.label);
                guard.consume(post);
            }
        }

        std::vector<FeatureVector> test_x;
        std::vector<std::string> test_ids;
        for (const auto& post : test->posts) {
            test_x.push_back(extractor.assemble(post));
            test_ids.push_back(post.id);
        }

        // Standardization for the log-linear and margin models; NB consumes
        // raw features.
        if (spec.classifier != ExperimentClassifier::NaiveBayes) {
            for (std::size_t e = 0; e < train_x.size(); ++e) {
                for (const auto& v : train_x[e]) flat_x.push_back(v);
            }
            Standardizer standardizer = fit_standardizer(flat_x);
            flat_x.clear();
            for (auto& group : train_x) {
                for (auto& v : group) v = apply_standardizer(standardizer, v);
            }
            for (auto& v : test_x) v = apply_standardizer(standardizer, v);
        }
        for (std::size_t e = 0; e < train_x.size(); ++e) {
            for (std::size_t i = 0; i < train_x[e].size(); ++i) {
                flat_x.push_back(train_x[e][i]);
                flat_y.push_back(train_y[e][i]);
            }
        }

        guard.assert_disjoint(*test);

        switch (spec.classifier) {
            case ExperimentClassifier::Crf: {
                std::vector<SequenceInstance> sequences(train.size());
                for (std::size_t e = 0; e < train.size(); ++e) {
                    sequences[e].x = std::move(train_x[e]);
                    sequences[e].y = std::move(train_y[e]);
                }
                ChainCrfModel model =
                    train_crf(sequences, spec.crf, extractor.layout()->fingerprint());
                outcome.predictions = prefix_decode(model, test_x, test_ids);
                break;
            }
            case ExperimentClassifier::MaxEnt: {
                PointClassifier model = train_maxent(flat_x, flat_y, spec.maxent);
                for (std::size_t i = 0; i < test_x.size(); ++i) {
                    outcome.predictions.push_back(predict(model, test_x[i], test_ids[i]));
                }
                break;
            }
            case ExperimentClassifier::NaiveBayes: {
                PointClassifier model = train_nb(flat_x, flat_y, spec.nb_var_smoothing);
                for (std::size_t i = 0; i < test_x.size(); ++i) {
                    outcome.predictions.push_back(predict(model, test_x[i], test_ids[i]));
                }
                break;
            }
            case ExperimentClassifier::LinearSvm: {
                SvmConfig config = spec.svm;
                config.seed = derive_seed(spec.seed, kStreamSvm, fold_index);
                PointClassifier model = train_svm(flat_x, flat_y, config);
                for (std::size_t i = 0; i < test_x.size(); ++i) {
                    outcome.predictions.push_back(predict(model, test_x[i], test_ids[i]));
                }
                break;
            }
            case ExperimentClassifier::Enquiry:
                break;  // handled above
        }
    }

    check_alignment(*test, outcome.predictions);
    outcome.confusion = confusion_from(*test, outcome.predictions, 0, test->posts.size());
    return outcome;
}

}  // namespace

std::string_view to_string(ExperimentClassifier classifier) {
    switch (classifier) {
        case ExperimentClassifier::Crf: return "crf";
        case ExperimentClassifier::MaxEnt: return "maxent";
        case ExperimentClassifier::NaiveBayes: return "nb";
        case ExperimentClassifier::LinearSvm: return "svm";
        case ExperimentClassifier::Enquiry: return "enquiry";
    }
    return "crf";
}

std::optional<ExperimentClassifier> experiment_classifier_from_string(std::string_view text) {
    if (text == "crf") return ExperimentClassifier::Crf;
    if (text == "maxent") return ExperimentClassifier::MaxEnt;
    if (text == "nb") return ExperimentClassifier::NaiveBayes;
    if (text == "svm") return ExperimentClassifier::LinearSvm;
    if (text == "enquiry") return ExperimentClassifier::Enquiry;
    return std::nullopt;
}

FoldPlan make_fold_plan(const Dataset& dataset) {
    if (dataset.events.size() < 2) {
        throw DataError("make_fold_plan: need at least 2 events, have " +
                        std::to_string(dataset.events.size()));
    }
    std::vector<std::string> ids;
    for (const auto& event : dataset.events) ids.push_back(event.event_id);
    std::sort(ids.begin(), ids.end());

    FoldPlan plan;
    for (const auto& test_id : ids) {
        Fold fold;
        fold.test_event = test_id;
        for (const auto& id : ids) {
            if (id != test_id) fold.train_events.push_back(id);
        }
        plan.push_back(std::move(fold));
    }
    return plan;
}

Prf prf_from_confusion(const Confusion& counts) {
    Prf out;
    const double tp = static_cast<double>(counts.tp);
    out.precision = counts.tp + counts.fp > 0 ? tp / static_cast<double>(counts.tp + counts.fp) : 0.0;
    out.recall = counts.tp + counts.fn > 0 ? tp / static_cast<double>(counts.tp + counts.fn) : 0.0;
    out.f1 = out.precision + out.recall > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

Prf micro_prf(const std::vector<Confusion>& folds) {
    Confusion total;
    for (const auto& c : folds) total += c;
    return prf_from_confusion(total);
}

std::vector<DecileRow> decile_f1(const EventTimeline& gold,
                                 const std::vector<Prediction>& predictions) {
    check_alignment(gold, predictions);

    std::vector<DecileRow> rows;
    if (gold.posts.size() < 10) {
        log_warning("event '" + gold.event_id + "' has only " +
                    std::to_string(gold.posts.size()) +
                    " posts; reporting it whole instead of by decile");
        DecileRow row;
        row.event_id = gold.event_id;
        row.decile = -1;
        row.counts = confusion_from(gold, predictions, 0, gold.posts.size());
        row.f1 = prf_from_confusion(row.counts).f1;
        row.flag = "whole_event";
        rows.push_back(std::move(row));
        return rows;
    }

    for (const auto& slice : decile_partition(gold)) {
        DecileRow row;
        row.event_id = gold.event_id;
        row.decile = static_cast<int>(rows.size());
        row.counts = confusion_from(gold, predictions, slice.begin, slice.end);
        row.f1 = prf_from_confusion(row.counts).f1;
        row.flag = row.counts.tp + row.counts.fn == 0 ? "no_positives" : "-";
        rows.push_back(std::move(row));
    }
    return rows;
}

EvalReport run_experiment(const Dataset& dataset, const ExperimentSpec& spec) {
    require_labeled(dataset);
    FoldPlan plan = make_fold_plan(dataset);

    Tagger tagger = spec.tag_file.empty() ? Tagger() : Tagger::from_tag_file(spec.tag_file);

    EvalReport report;
    report.spec = spec;
    report.folds.resize(plan.size());

    const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(plan.size())));
    if (jobs == 1) {
        for (std::size_t k = 0; k < plan.size(); ++k) {
            report.folds[k] = run_fold(dataset, spec, plan[k], k, tagger);
        }
    } else {
        // Folds are independent; results land in fold-plan order so the
        // report is identical to a sequential run.
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(plan.size());
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < plan.size(); k = next.fetch_add(1)) {
                    try {
                        report.folds[k] = run_fold(dataset, spec, plan[k], k, tagger);
                    } catch (...) {
                        errors[k] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::vector<Confusion> confusions;
    for (const auto& fold : report.folds) confusions.push_back(fold.confusion);
    report.micro = micro_prf(confusions);

    for (const auto& fold : report.folds) {
        for (const auto& event : dataset.events) {
            if (event.event_id == fold.test_event) {
                auto rows = decile_f1(event, fold.predictions);
                report.deciles.insert(report.deciles.end(), rows.begin(), rows.end());
            }
        }
    }
    return report;
}

void emit_report(const EvalReport& report, const std::string& directory) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) {
        throw DataError("cannot create report directory '" + directory + "': " + ec.message());
    }

    {
        std::ofstream out(fs::path(directory) / "report.txt", std::ios::binary);
        if (!out) throw DataError("cannot write report.txt in '" + directory + "'");
        const ExperimentSpec& s = report.spec;
        out << "rnr-report v1\n";
        out << "classifier " << to_string(s.classifier) << '\n';
        out << "features " << to_string(s.features) << '\n';
        out << "seed " << s.seed << '\n';
        out << "tag_file " << (s.tag_file.empty() ? "-" : s.tag_file) << '\n';
        out << "embedding_dim " << s.embedding.dim << '\n';
        out << "embedding_window " << s.embedding.window << '\n';
        out << "embedding_negatives " << s.embedding.negatives << '\n';
        out << "embedding_epochs " << s.embedding.epochs << '\n';
        out << "embedding_learning_rate " << format_double(s.embedding.learning_rate) << '\n';
        out << "embedding_min_count " << s.embedding.min_count << '\n';
        out << "embedding_threads " << s.embedding.threads << '\n';
        out << "crf_lambda " << format_double(s.crf.l2_lambda) << '\n';
        out << "crf_max_iter " << s.crf.max_iter << '\n';
        out << "crf_tol " << format_double(s.crf.tol) << '\n';
        out << "maxent_lambda " << format_double(s.maxent.l2_lambda) << '\n';
        out << "maxent_max_iter " << s.maxent.max_iter << '\n';
        out << "maxent_tol " << format_double(s.maxent.tol) << '\n';
        out << "svm_c " << format_double(s.svm.c) << '\n';
        out << "svm_epochs " << s.svm.epochs << '\n';
        out << "nb_var_smoothing " << format_double(s.nb_var_smoothing) << '\n';
        out << "enquiry_corrected_pattern " << (s.enquiry_corrected_pattern ? 1 : 0) << '\n';
        for (const auto& fold : report.folds) {
            out << "fold " << fold.test_event << " tp " << fold.confusion.tp << " fp "
                << fold.confusion.fp << " fn " << fold.confusion.fn << " tn " << fold.confusion.tn
                << '\n';
        }
        out << "micro precision " << format_double(report.micro.precision) << " recall "
            << format_double(report.micro.recall) << " f1 " << format_double(report.micro.f1)
            << '\n';
        if (!out) throw DataError("write to report.txt failed");
    }

    {
        std::ofstream out(fs::path(directory) / "folds.tsv", std::ios::binary);
        if (!out) throw DataError("cannot write folds.tsv in '" + directory + "'");
        out << "event\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\n";
        for (const auto& fold : report.folds) {
            Prf prf = prf_from_confusion(fold.confusion);
            out << fold.test_event << '\t' << fold.confusion.tp << '\t' << fold.confusion.fp
                << '\t' << fold.confusion.fn << '\t' << fold.confusion.tn << '\t'
                << format_double(prf.precision) << '\t' << format_double(prf.recall) << '\t'
                << format_double(prf.f1) << '\n';
        }
        if (!out) throw DataError("write to folds.tsv failed");
    }

    {
        std::ofstream out(fs::path(directory) / "deciles.tsv", std::ios::binary);
        if (!out) throw DataError("cannot write deciles.tsv in '" + directory + "'");
        out << "event\tdecile\ttp\tfp\tfn\ttn\tf1\tflag\n";
        for (const auto& row : report.deciles) {
            out << row.event_id << '\t' << row.decile << '\t' << row.counts.tp << '\t'
                << row.counts.fp << '\t' << row.counts.fn << '\t' << row.counts.tn << '\t'
                << format_double(row.f1) << '\t' << row.flag << '\n';
        }
        if (!out) throw DataError("write to deciles.tsv failed");
    }

    {
        std::ofstream out(fs::path(directory) / "predictions.tsv", std::ios::binary);
        if (!out) throw DataError("cannot write predictions.tsv in '" + directory + "'");
        out << "event\tpost_id\tgold\tpredicted\tscore\n";
        for (const auto& fold : report.folds) {
            for (std::size_t i = 0; i < fold.predictions.size(); ++i) {
                out << fold.test_event << '\t' << fold.predictions[i].post_id << '\t'
                    << to_string(fold.gold[i]) << '\t' << to_string(fold.predictions[i].label)
                    << '\t' << format_double(fold.predictions[i].score) << '\n';
            }
        }
        if (!out) throw DataError("write to predictions.tsv failed");
    }
}

ReportSummary load_report_summary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::string header;
    std::getline(in, header);
    if (header != "rnr-report v1") {
        throw DataError("'" + path + "': not a report file (bad header)");
    }
    ReportSummary summary;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "classifier") {
            ss >> summary.classifier;
        } else if (key == "features") {
            ss >> summary.features;
        } else if (key == "fold") {
            std::string event, t1, t2, t3, t4;
            Confusion c;
            ss >> event >> t1 >> c.tp >> t2 >> c.fp >> t3 >> c.fn >> t4 >> c.tn;
            if (!ss || t1 != "tp" || t2 != "fp" || t3 != "fn" || t4 != "tn") {
                throw DataError("'" + path + "': malformed fold line");
            }
            summary.folds.emplace_back(event, c);
        } else if (key == "micro") {
            std::string t1, t2, t3;
            ss >> t1 >> summary.micro.precision >> t2 >> summary.micro.recall >> t3 >>
                summary.micro.f1;
            if (!ss || t1 != "precision" || t2 != "recall" || t3 != "f1") {
                throw DataError("'" + path + "': malformed micro line");
            }
        }
    }
    return summary;
}

}  // namespace rnr
