#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rnr/baselines.hpp"
#include "rnr/embeddings.hpp"
#include "rnr/errors.hpp"
#include "rnr/evaluation.hpp"
#include "rnr/features.hpp"
#include "rnr/ingest.hpp"
#include "rnr/log.hpp"
#include "rnr/rng.hpp"
#include "rnr/tagger.hpp"

namespace {

namespace fs = std::filesystem;

// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
    std::string data;
    std::string format = "normalized";  // pheme | normalized
};

rnr::Dataset load_dataset(const CommonOptions& options) {
    if (options.format == "pheme") return rnr::load_pheme(options.data);
    if (options.format == "normalized") return rnr::load_normalized(options.data);
    throw rnr::DataError("unknown dataset format '" + options.format +
                         "' (expected pheme or normalized)");
}

void add_common_options(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("--data", options.data, "Dataset path (directory or file)")->required();
    cmd->add_option("--format", options.format, "Dataset format: pheme | normalized")
        ->check(CLI::IsMember({"pheme", "normalized"}));
}

// Per-event rumour/non-rumour summary in the style of the dataset table.
void print_summary(const rnr::Dataset& dataset) {
    std::int64_t total_rumours = 0;
    std::int64_t total_posts = 0;
    auto line = [](const std::string& name, std::int64_t rumours, std::int64_t total) {
        std::int64_t non_rumours = total - rumours;
        std::printf("%-24s %6lld (%4.1f%%)   %6lld (%4.1f%%)   %6lld\n", name.c_str(),
                    static_cast<long long>(rumours),
                    100.0 * static_cast<double>(rumours) / static_cast<double>(total),
                    static_cast<long long>(non_rumours),
                    100.0 * static_cast<double>(non_rumours) / static_cast<double>(total),
                    static_cast<long long>(total));
    };
    std::printf("%-24s %-16s %-16s %s\n", "event", "rumours", "non-rumours", "total");
    for (const auto& event : dataset.events) {
        std::int64_t rumours = 0;
        for (const auto& post : event.posts) {
            if (post.label == rnr::Label::Rumour) ++rumours;
        }
        line(event.event_id, rumours, static_cast<std::int64_t>(event.posts.size()));
        total_rumours += rumours;
        total_posts += static_cast<std::int64_t>(event.posts.size());
    }
    line("total", total_rumours, total_posts);
}

int cmd_ingest(const CommonOptions& common, const std::string& out, std::int64_t min_retweets) {
    rnr::Dataset dataset = load_dataset(common);
    if (min_retweets > 0) {
        dataset = rnr::filter_by_retweets(dataset, min_retweets);
        if (dataset.events.empty()) {
            throw rnr::DataError("retweet filter removed every post");
        }
    }
    rnr::export_normalized(dataset, out);
    print_summary(dataset);
    return 0;
}

int cmd_run(const CommonOptions& common, const rnr::ExperimentSpec& spec,
            const std::string& out_dir) {
    rnr::Dataset dataset = load_dataset(common);
    rnr::EvalReport report = rnr::run_experiment(dataset, spec);
    rnr::emit_report(report, out_dir);
    std::printf("classifier=%s features=%s P=%.3f R=%.3f F1=%.3f\n",
                std::string(to_string(spec.classifier)).c_str(),
                std::string(to_string(spec.features)).c_str(), report.micro.precision,
                report.micro.recall, report.micro.f1);
    return 0;
}

int cmd_analyze(const CommonOptions& common, const std::string& report_dir,
                const std::string& out_dir, const std::string& export_features_path,
                const rnr::EmbeddingConfig& embedding, std::uint64_t seed) {
    rnr::Dataset dataset = load_dataset(common);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw rnr::DataError("cannot create output directory '" + out_dir + "': " + ec.message());
    }

    // Fig.-2-style rumour share per decile; short events fall back to one
    // whole-event row (decile -1), same convention as the evaluation module.
    {
        std::ofstream out(fs::path(out_dir) / "ratios.tsv", std::ios::binary);
        if (!out) throw rnr::DataError("cannot write ratios.tsv in '" + out_dir + "'");
        out << "event\tdecile\tsize\trumours\tratio\n";
        char buf[64];
        for (const auto& event : dataset.events) {
            auto emit_row = [&](int decile, std::size_t begin, std::size_t end) {
                std::int64_t rumours = 0;
                for (std::size_t i = begin; i < end; ++i) {
                    if (!event.posts[i].label.has_value()) {
                        throw rnr::DataError("post '" + event.posts[i].id + "' has no label");
                    }
                    if (*event.posts[i].label == rnr::Label::Rumour) ++rumours;
                }
                std::snprintf(buf, sizeof buf, "%.17g",
                              static_cast<double>(rumours) / static_cast<double>(end - begin));
                out << event.event_id << '\t' << decile << '\t' << (end - begin) << '\t'
                    << rumours << '\t' << buf << '\n';
            };
            if (event.posts.size() < 10) {
                rnr::log_warning("event '" + event.event_id +
                                 "' is shorter than 10 posts; emitting one whole-event row");
                emit_row(-1, 0, event.posts.size());
                continue;
            }
            auto slices = rnr::decile_partition(event);
            for (std::size_t d = 0; d < slices.size(); ++d) {
                emit_row(static_cast<int>(d), slices[d].begin, slices[d].end);
            }
        }
        if (!out) throw rnr::DataError("write to ratios.tsv failed");
    }

    // Fig.-3-style per-decile F1 comes from a stored run report.
    if (!report_dir.empty()) {
        fs::path source = fs::path(report_dir) / "deciles.tsv";
        std::ifstream in(source, std::ios::binary);
        if (!in) {
            throw rnr::DataError("cannot open '" + source.string() + "' (run `run` first?)");
        }
        std::string header;
        std::getline(in, header);
        if (header != "event\tdecile\ttp\tfp\tfn\ttn\tf1\tflag") {
            throw rnr::DataError("'" + source.string() + "' is not a decile table");
        }
        std::ofstream out(fs::path(out_dir) / "decile_f1.tsv", std::ios::binary);
        if (!out) throw rnr::DataError("cannot write decile_f1.tsv in '" + out_dir + "'");
        out << header << '\n';
        std::string line;
        while (std::getline(in, line)) out << line << '\n';
        if (!out) throw rnr::DataError("write to decile_f1.tsv failed");
    }

    // Optional feature-matrix dump for offline inspection. The embedding
    // model here is trained on the whole dataset — fine for eyeballing
    // feature values, not a cross-validation artifact.
    if (!export_features_path.empty()) {
        std::vector<std::vector<std::string>> corpus;
        for (const auto& event : dataset.events) {
            for (const auto& post : event.posts) {
                corpus.push_back(rnr::embedding_tokens(post.text));
            }
        }
        rnr::EmbeddingConfig config = embedding;
        config.seed = rnr::derive_seed(seed, /*stream=*/20);
        rnr::EmbeddingModel model = rnr::train_embeddings(corpus, config);
        rnr::Tagger tagger;
        rnr::FeatureExtractor extractor(rnr::FeatureGroup::ContentAndSocial, &model, &tagger);
        rnr::export_feature_matrix(dataset, extractor, export_features_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rumour detection on breaking-news timelines: ingestion, sequential and "
                 "pointwise classifiers, leave-one-event-out evaluation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key=value config file; command-line flags win");
    app.config_formatter(std::make_shared<CLI::ConfigINI>());

    // --- ingest ---
    CommonOptions ingest_common;
    std::string ingest_out = "data.norm";
    std::int64_t min_retweets = 0;
    CLI::App* ingest = app.add_subcommand("ingest", "Read a dataset, write normalized records");
    ingest->add_option("--pheme", ingest_common.data, "PHEME release root directory");
    ingest->add_option("--normalized", ingest_common.data,
                       "Normalized records file (re-normalization)");
    ingest->add_option("--out", ingest_out, "Output normalized records file");
    ingest->add_option("--min-retweets", min_retweets, "Keep posts with retweet_count >= N")
        ->check(CLI::NonNegativeNumber);

    // --- run ---
    CommonOptions run_common;
    rnr::ExperimentSpec spec;
    std::string classifier = "crf";
    std::string features = "both";
    std::string run_out = "report";
    CLI::App* run = app.add_subcommand("run", "Run one leave-one-event-out experiment");
    add_common_options(run, run_common);
    run->add_option("--classifier", classifier, "crf | maxent | nb | svm | enquiry")
        ->check(CLI::IsMember({"crf", "maxent", "nb", "svm", "enquiry"}));
    run->add_option("--features", features, "content | social | both")
        ->check(CLI::IsMember({"content", "social", "both"}));
    run->add_option("--seed", spec.seed, "Root seed for all derived randomness");
    run->add_option("--jobs", spec.jobs, "Concurrent folds")->check(CLI::PositiveNumber);
    run->add_option("--out", run_out, "Report output directory");
    run->add_option("--embedding-dim", spec.embedding.dim)->check(CLI::PositiveNumber);
    run->add_option("--embedding-window", spec.embedding.window)->check(CLI::PositiveNumber);
    run->add_option("--embedding-negatives", spec.embedding.negatives)
        ->check(CLI::NonNegativeNumber);
    run->add_option("--embedding-epochs", spec.embedding.epochs)->check(CLI::PositiveNumber);
    run->add_option("--embedding-lr", spec.embedding.learning_rate);
    run->add_option("--embedding-min-count", spec.embedding.min_count)
        ->check(CLI::PositiveNumber);
    run->add_option("--embedding-threads", spec.embedding.threads,
                    "Embedding trainer threads (>1 is faster but not bit-reproducible)")
        ->check(CLI::PositiveNumber);
    run->add_option("--crf-lambda", spec.crf.l2_lambda)->check(CLI::NonNegativeNumber);
    run->add_option("--crf-max-iter", spec.crf.max_iter)->check(CLI::PositiveNumber);
    run->add_option("--crf-tol", spec.crf.tol);
    run->add_option("--maxent-lambda", spec.maxent.l2_lambda)->check(CLI::NonNegativeNumber);
    run->add_option("--maxent-max-iter", spec.maxent.max_iter)->check(CLI::PositiveNumber);
    run->add_option("--maxent-tol", spec.maxent.tol);
    run->add_option("--svm-c", spec.svm.c);
    run->add_option("--svm-epochs", spec.svm.epochs)->check(CLI::PositiveNumber);
    run->add_option("--nb-smoothing", spec.nb_var_smoothing);
    run->add_flag("--enquiry-corrected", spec.enquiry_corrected_pattern,
                  "Use the corrected second enquiry pattern ([?!]* tail)");
    run->add_option("--tag-file", spec.tag_file, "External token<TAB>tag file");

    // --- analyze ---
    CommonOptions analyze_common;
    std::string analyze_report;
    std::string analyze_out = "analysis";
    std::string export_features_path;
    rnr::EmbeddingConfig analyze_embedding;
    std::uint64_t analyze_seed = 42;
    CLI::App* analyze = app.add_subcommand("analyze", "Decile tables from a dataset and report");
    add_common_options(analyze, analyze_common);
    analyze->add_option("--report", analyze_report, "Report directory from a previous run");
    analyze->add_option("--out", analyze_out, "Analysis output directory");
    analyze->add_option("--export-features", export_features_path,
                        "Also dump the full feature matrix to this file");
    analyze->add_option("--embedding-dim", analyze_embedding.dim)->check(CLI::PositiveNumber);
    analyze->add_option("--seed", analyze_seed, "Seed for the feature-export embedding");

    try {
        app.parse(argc, argv);

        if (ingest->parsed()) {
            if (ingest_common.data.empty()) {
                std::cerr << "ingest: provide --pheme or --normalized\n";
                return kExitUsage;
            }
            ingest_common.format =
                ingest->count("--pheme") > 0 ? "pheme" : "normalized";
            return cmd_ingest(ingest_common, ingest_out, min_retweets);
        }
        if (run->parsed()) {
            spec.classifier = *rnr::experiment_classifier_from_string(classifier);
            spec.features = *rnr::feature_group_from_string(features);
            return cmd_run(run_common, spec, run_out);
        }
        if (analyze->parsed()) {
            return cmd_analyze(analyze_common, analyze_report, analyze_out, export_features_path,
                               analyze_embedding, analyze_seed);
        }
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const rnr::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const rnr::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
