// SPDX-License-Identifier: Apache-2.0
// chamberscope: personality-trait analysis of polarized comment communities.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "chamberscope/corpus.hpp"
#include "chamberscope/pipeline.hpp"
#include "chamberscope/testkit.hpp"

using namespace chamberscope;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIngest = 2;
constexpr int kExitAnalysis = 3;

int exit_code_for(Stage stage) {
    switch (stage) {
        case Stage::config: return kExitUsage;
        case Stage::ingest: return kExitIngest;
        default: return kExitAnalysis;
    }
}

struct CorpusOptions {
    std::string corpus_dir;
    std::string pages, comments, likes;
    std::string lexicons, signs, from, to, baseline = "per-user", manifest;
};

void add_corpus_options(CLI::App& cmd, CorpusOptions& o, PipelineConfig& c, bool with_scoring) {
    cmd.add_option("--corpus", o.corpus_dir,
                   "Directory holding pages.csv, comments.jsonl and likes.jsonl")
        ->envname("CHAMBERSCOPE_CORPUS");
    cmd.add_option("--pages", o.pages, "Pages CSV (page_id,narrative); overrides --corpus");
    cmd.add_option("--comments", o.comments, "Comments JSON-lines file; overrides --corpus");
    cmd.add_option("--likes", o.likes, "Likes JSON-lines file; overrides --corpus");
    cmd.add_option("--threshold", c.polarization_threshold,
                   "A user is polarized when more than this share of their likes is on one narrative")
        ->envname("CHAMBERSCOPE_THRESHOLD")
        ->capture_default_str();
    cmd.add_option("--min-comments", c.min_comments, "Users need at least this many comments to be scored")
        ->envname("CHAMBERSCOPE_MIN_COMMENTS")
        ->capture_default_str();
    cmd.add_option("--from", o.from, "Drop comments before this ISO-8601 time")->envname("CHAMBERSCOPE_FROM");
    cmd.add_option("--to", o.to, "Drop comments after this ISO-8601 time")->envname("CHAMBERSCOPE_TO");
    cmd.add_option("--out", c.output_dir, "Output directory")->envname("CHAMBERSCOPE_OUT")->capture_default_str();
    if (!with_scoring) return;
    cmd.add_option("--lexicons", o.lexicons, "Lexicon directory (default: built-in English lists)")
        ->envname("CHAMBERSCOPE_LEXICONS");
    cmd.add_option("--signs", o.signs, "Feature/trait sign matrix CSV (default: built-in signs_default.csv)")
        ->envname("CHAMBERSCOPE_SIGNS");
    cmd.add_option("--baseline", o.baseline,
                   "Feature baseline: per-user (mean of per-user means) or per-comment (global mean)")
        ->check(CLI::IsMember({"per-user", "per-comment"}))
        ->envname("CHAMBERSCOPE_BASELINE")
        ->capture_default_str();
    cmd.add_option("--threads", c.threads, "Worker threads, 0 = all cores; results do not depend on it")
        ->envname("CHAMBERSCOPE_THREADS")
        ->capture_default_str();
    cmd.add_option("--manifest", o.manifest,
                   "Re-run with the configuration recorded in a manifest.json (other flags ignored except --out)");
}

void add_stats_options(CLI::App& cmd, PipelineConfig& c) {
    cmd.add_option("--replicates", c.mantel_replicates, "Monte Carlo replicates for the Mantel test")
        ->envname("CHAMBERSCOPE_REPLICATES")
        ->capture_default_str();
    cmd.add_option("--seed", c.seed, "Seed for every random draw")->envname("CHAMBERSCOPE_SEED")->capture_default_str();
}

PipelineConfig finish_config(const CLI::App& cmd, const CorpusOptions& o, PipelineConfig c) {
    if (!o.manifest.empty()) {
        auto from_manifest = config_from_manifest(o.manifest);
        from_manifest.threads = c.threads;
        if (cmd.count("--out") > 0) from_manifest.output_dir = c.output_dir;
        return from_manifest;
    }
    const std::filesystem::path dir = o.corpus_dir;
    c.pages = !o.pages.empty() ? std::filesystem::path(o.pages) : dir / "pages.csv";
    c.comments = !o.comments.empty() ? std::filesystem::path(o.comments) : dir / "comments.jsonl";
    c.likes = !o.likes.empty() ? std::filesystem::path(o.likes) : dir / "likes.jsonl";
    if (o.corpus_dir.empty() && (o.pages.empty() || o.comments.empty() || o.likes.empty()))
        throw ConfigError("give --corpus or all of --pages, --comments and --likes");
    if (!o.lexicons.empty()) c.lexicon_dir = o.lexicons;
    if (!o.signs.empty()) c.sign_matrix = o.signs;
    if (!o.from.empty()) c.from = o.from;
    if (!o.to.empty()) c.to = o.to;
    c.baseline = parse_baseline_mode(o.baseline).value_or(BaselineMode::per_user);
    return c;
}

void print_ranking(const AnalysisReport& report) {
    std::cout << fmt::format("{:>4}  {:<6} {:>7}   {:<6} {:>7}\n", "rank", "sci", "%", "consp", "%");
    const std::size_t rows = std::max(report.science.ranking.size(), report.conspiracy.ranking.size());
    for (std::size_t i = 0; i < std::min<std::size_t>(rows, 10); ++i) {
        auto cell = [&](const GroupAnalysis& g) {
            if (i >= g.ranking.size()) return fmt::format("{:<6} {:>7}", "", "");
            return fmt::format("{:<6} {:>7.2f}", g.ranking[i].model.str(), g.ranking[i].percentage);
        };
        std::cout << fmt::format("{:>4}  {}   {}\n", i + 1, cell(report.science), cell(report.conspiracy));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personality-trait analysis of polarized comment communities"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Suppress stage logging on stderr");

    StageLogger logger = [&quiet](Stage stage, const std::string& message) {
        if (!quiet) std::clog << fmt::format("[{}] {}\n", to_string(stage), message);
    };

    // ingest
    PipelineConfig ingest_cfg;
    CorpusOptions ingest_opts;
    auto* ingest = app.add_subcommand("ingest", "Validate corpus files and print the ingestion report");
    add_corpus_options(*ingest, ingest_opts, ingest_cfg, false);

    // score
    PipelineConfig score_cfg;
    CorpusOptions score_opts;
    auto* score = app.add_subcommand("score", "Ingest, extract features and score users (scored_users.csv)");
    add_corpus_options(*score, score_opts, score_cfg, true);

    // analyze
    PipelineConfig analyze_cfg;
    CorpusOptions analyze_opts;
    auto* analyze = app.add_subcommand("analyze", "Full pipeline: scoring plus the statistical comparison");
    add_corpus_options(*analyze, analyze_opts, analyze_cfg, true);
    add_stats_options(*analyze, analyze_cfg);

    // report
    PipelineConfig report_cfg;
    std::string scored_path;
    auto* report = app.add_subcommand("report", "Re-run the statistical comparison from a scored_users.csv");
    report->add_option("--scored", scored_path, "scored_users.csv from a previous score/analyze run")->required();
    report->add_option("--out", report_cfg.output_dir, "Output directory")->capture_default_str();
    report->add_option("--threads", report_cfg.threads, "Worker threads, 0 = all cores")->capture_default_str();
    add_stats_options(*report, report_cfg);

    // synth
    testkit::SynthSpec spec;
    std::string planted = "nynny", synth_out = "synthetic-corpus", synth_signs;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with a planted personality model");
    synth->add_option("--users", spec.users_per_narrative, "Users per narrative")->capture_default_str();
    synth->add_option("--min-comments", spec.min_comments, "Fewest comments per user")->capture_default_str();
    synth->add_option("--max-comments", spec.max_comments, "Most comments per user")->capture_default_str();
    synth->add_option("--planted", planted, "Planted personality model (five of y/n/o)")->capture_default_str();
    synth->add_option("--prevalence", spec.prevalence, "Share of each chamber carrying the planted model")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    synth->add_option("--pages", spec.pages_per_narrative, "Pages per narrative")->capture_default_str();
    synth->add_option("--signs", synth_signs, "Sign matrix the planted model must be reachable under");
    synth->add_option("--seed", spec.seed, "Generator seed")->envname("CHAMBERSCOPE_SEED")->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*ingest) {
            auto cfg = finish_config(*ingest, ingest_opts, ingest_cfg);
            cfg.validate();
            LoadOptions options;
            options.polarization_threshold = cfg.polarization_threshold;
            if (cfg.from) options.from = parse_iso8601(*cfg.from);
            if (cfg.to) options.to = parse_iso8601(*cfg.to);
            auto loaded = load_corpus(cfg.pages, cfg.comments, cfg.likes, options);
            const auto eligible = eligible_users(loaded.snapshot, cfg.min_comments);
            logger(Stage::ingest, fmt::format("{} users; eligible: {} science, {} conspiracy",
                                              loaded.snapshot.users().size(), eligible.science.size(),
                                              eligible.conspiracy.size()));
            const auto body = to_json(loaded.report).dump(2) + "\n";
            std::cout << body;
            if (ingest->count("--out") > 0) {
                std::filesystem::create_directories(cfg.output_dir);
                std::ofstream(cfg.output_dir / "ingestion_report.json", std::ios::binary) << body;
            }
        } else if (*score) {
            run_pipeline(finish_config(*score, score_opts, score_cfg), RunMode::score, logger);
        } else if (*analyze) {
            auto result = run_pipeline(finish_config(*analyze, analyze_opts, analyze_cfg), RunMode::analyze, logger);
            if (!quiet) print_ranking(result.analysis);
        } else if (*report) {
            report_cfg.validate();
            auto [science, conspiracy] = read_scored_users(scored_path);
            auto analysis = analyze_groups(science, conspiracy, report_cfg.mantel_replicates, report_cfg.seed,
                                           report_cfg.threads, logger);
            write_analysis_bundle(analysis, science, conspiracy, report_cfg.output_dir);
            if (!quiet) print_ranking(analysis);
        } else if (*synth) {
            auto model = PersonalityModel::parse(planted);
            if (!model) throw ConfigError(fmt::format("invalid personality model '{}'", planted));
            spec.planted = *model;
            const auto matrix = synth_signs.empty() ? SignMatrix::defaults() : SignMatrix::load(synth_signs);
            testkit::SyntheticCorpus corpus;
            try {
                corpus = testkit::generate_synthetic_corpus(spec, matrix);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            testkit::write_corpus(corpus, synth_out);
            logger(Stage::output, fmt::format("wrote {} users ({} planted '{}') to {}", 2 * spec.users_per_narrative,
                                              corpus.planted_users.size(), planted, synth_out));
        }
    } catch (const Error& e) {
        std::cerr << fmt::format("chamberscope: {} stage failed: {}\n", to_string(e.stage()), e.what());
        return exit_code_for(e.stage());
    } catch (const std::exception& e) {
        std::cerr << fmt::format("chamberscope: error: {}\n", e.what());
        return kExitAnalysis;
    }
    return kExitOk;
}
