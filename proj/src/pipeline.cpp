// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "chamberscope/csv.hpp"
#include "chamberscope/histogram.hpp"
#include "chamberscope/lexical.hpp"

namespace chamberscope {

namespace {

constexpr const char* kToolVersion = "0.1.0";

void emit(const StageLogger& log, Stage stage, const std::string& message) {
    if (log) log(stage, message);
}

unsigned resolve_threads(unsigned threads) {
    if (threads != 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

nlohmann::json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

nlohmann::json number_or_null(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string format_number(double v) { return std::isnan(v) ? "NA" : fmt::format("{}", v); }
std::string format_number(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : "NA"; }

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AnalysisError(Stage::output, fmt::format("cannot write '{}'", path.string()));
    out << body;
    if (!out) throw AnalysisError(Stage::output, fmt::format("failed writing '{}'", path.string()));
}

nlohmann::json to_json(const TestResult& r) {
    nlohmann::json j = {{"statistic", number_or_null(r.statistic)},
                        {"p_value", r.p_value},
                        {"method", to_string(r.method)},
                        {"applicable", r.applicable}};
    if (r.method == TestMethod::permutation) {
        j["replicates"] = r.replicates;
        j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
    }
    return j;
}

struct UserFeatures {
    std::string id;
    Narrative narrative;
    std::size_t comments = 0;
    FeatureCounts totals;
    FeatureVector means;
};

UserFeatures user_features(const CorpusSnapshot& snapshot, const std::string& id, Narrative narrative,
                           const Lexicons& lexicons) {
    const auto& agg = *snapshot.find_user(id);
    std::vector<FeatureCounts> vectors;
    vectors.reserve(agg.comment_indices.size());
    UserFeatures out{id, narrative, agg.comment_count, {}, {}};
    for (auto idx : agg.comment_indices) {
        vectors.push_back(extract_features(snapshot.comments()[idx].text, lexicons));
        for (std::size_t i = 0; i < kFeatureCount; ++i) out.totals.values[i] += vectors.back().values[i];
    }
    out.means = user_feature_means(vectors);
    return out;
}

}  // namespace

const char* to_string(BaselineMode mode) noexcept {
    return mode == BaselineMode::per_user ? "per-user" : "per-comment";
}

std::optional<BaselineMode> parse_baseline_mode(std::string_view text) {
    if (text == "per-user") return BaselineMode::per_user;
    if (text == "per-comment") return BaselineMode::per_comment;
    return std::nullopt;
}

void PipelineConfig::validate() const {
    if (min_comments < 1) throw ConfigError("min_comments must be at least 1");
    if (!(polarization_threshold > 0.5 && polarization_threshold <= 1.0))
        throw ConfigError(fmt::format("polarization_threshold {} not in (0.5, 1]", polarization_threshold));
    if (mantel_replicates < 1) throw ConfigError("mantel_replicates must be at least 1");
    if (from && !parse_iso8601(*from)) throw ConfigError(fmt::format("cannot parse --from date '{}'", *from));
    if (to && !parse_iso8601(*to)) throw ConfigError(fmt::format("cannot parse --to date '{}'", *to));
    if (from && to && *parse_iso8601(*from) > *parse_iso8601(*to))
        throw ConfigError("--from is later than --to");
}

nlohmann::json to_json(const PipelineConfig& c) {
    auto opt_path = [](const std::optional<std::filesystem::path>& p) {
        return p ? nlohmann::json(p->string()) : nlohmann::json(nullptr);
    };
    auto opt_str = [](const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); };
    return {{"pages", c.pages.string()},
            {"comments", c.comments.string()},
            {"likes", c.likes.string()},
            {"lexicon_dir", opt_path(c.lexicon_dir)},
            {"sign_matrix", opt_path(c.sign_matrix)},
            {"min_comments", c.min_comments},
            {"polarization_threshold", c.polarization_threshold},
            {"baseline", to_string(c.baseline)},
            {"mantel_replicates", c.mantel_replicates},
            {"seed", c.seed},
            {"output_dir", c.output_dir.string()},
            {"from", opt_str(c.from)},
            {"to", opt_str(c.to)}};
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        auto path = [&](const char* key, std::filesystem::path& out) {
            if (j.contains(key) && !j[key].is_null()) out = j[key].get<std::string>();
        };
        auto opt_path = [&](const char* key, std::optional<std::filesystem::path>& out) {
            if (j.contains(key) && !j[key].is_null()) out = j[key].get<std::string>();
        };
        auto opt_str = [&](const char* key, std::optional<std::string>& out) {
            if (j.contains(key) && !j[key].is_null()) out = j[key].get<std::string>();
        };
        path("pages", c.pages);
        path("comments", c.comments);
        path("likes", c.likes);
        path("output_dir", c.output_dir);
        opt_path("lexicon_dir", c.lexicon_dir);
        opt_path("sign_matrix", c.sign_matrix);
        opt_str("from", c.from);
        opt_str("to", c.to);
        if (j.contains("min_comments")) c.min_comments = j["min_comments"].get<std::size_t>();
        if (j.contains("polarization_threshold")) c.polarization_threshold = j["polarization_threshold"].get<double>();
        if (j.contains("mantel_replicates")) c.mantel_replicates = j["mantel_replicates"].get<std::size_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("baseline")) {
            auto mode = parse_baseline_mode(j["baseline"].get<std::string>());
            if (!mode) throw ConfigError("unknown baseline mode in config");
            c.baseline = *mode;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("invalid config: {}", e.what()));
    }
    return c;
}

ScoreOutcome score_corpus(const PipelineConfig& config, const StageLogger& log) {
    config.validate();
    const Lexicons lexicons = config.lexicon_dir ? Lexicons::load(*config.lexicon_dir) : Lexicons::defaults();
    const SignMatrix matrix = config.sign_matrix ? SignMatrix::load(*config.sign_matrix) : SignMatrix::defaults();

    LoadOptions options;
    options.polarization_threshold = config.polarization_threshold;
    if (config.from) options.from = parse_iso8601(*config.from);
    if (config.to) options.to = parse_iso8601(*config.to);

    emit(log, Stage::ingest, fmt::format("loading {}, {}, {}", config.pages.string(), config.comments.string(),
                                         config.likes.string()));
    auto loaded = load_corpus(config.pages, config.comments, config.likes, options);
    const auto& snapshot = loaded.snapshot;
    emit(log, Stage::ingest,
         fmt::format("{} pages, {} comments, {} likes accepted; {} users", loaded.report.pages.accepted,
                     loaded.report.comments.accepted, loaded.report.likes.accepted, snapshot.users().size()));

    const auto eligible = eligible_users(snapshot, config.min_comments);
    emit(log, Stage::ingest,
         fmt::format("eligible users: {} science, {} conspiracy (min_comments={}, threshold={})",
                     eligible.science.size(), eligible.conspiracy.size(), config.min_comments,
                     config.polarization_threshold));

    std::vector<std::pair<std::string, Narrative>> queue;
    for (const auto& id : eligible.science) queue.emplace_back(id, Narrative::science);
    for (const auto& id : eligible.conspiracy) queue.emplace_back(id, Narrative::conspiracy);

    emit(log, Stage::features, fmt::format("extracting features for {} users", queue.size()));
    std::vector<UserFeatures> features(queue.size());
    const unsigned threads = std::max(1u, std::min<unsigned>(resolve_threads(config.threads),
                                                             static_cast<unsigned>(std::max<std::size_t>(1, queue.size()))));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            features[i] = user_features(snapshot, queue[i].first, queue[i].second, lexicons);
    };
    if (threads == 1) {
        work(0, queue.size());
    } else {
        std::vector<std::future<void>> parts;
        const std::size_t chunk = (queue.size() + threads - 1) / threads;
        for (std::size_t b = 0; b < queue.size(); b += chunk)
            parts.push_back(std::async(std::launch::async, work, b, std::min(queue.size(), b + chunk)));
        for (auto& p : parts) p.get();
    }

    if (features.empty())
        throw AnalysisError(Stage::baseline, "no eligible users in either chamber; cannot compute a baseline");
    ScoreOutcome out;
    out.ingestion = loaded.report;
    if (config.baseline == BaselineMode::per_user) {
        std::vector<FeatureVector> means;
        means.reserve(features.size());
        for (const auto& f : features) means.push_back(f.means);
        out.baseline = corpus_baseline(means);
    } else {
        std::vector<FeatureCounts> totals;
        std::vector<std::size_t> counts;
        for (const auto& f : features) {
            totals.push_back(f.totals);
            counts.push_back(f.comments);
        }
        out.baseline = corpus_baseline_per_comment(totals, counts);
    }
    emit(log, Stage::baseline,
         fmt::format("{} baseline over {} users", to_string(config.baseline), out.baseline.population));

    out.science.narrative = to_string(Narrative::science);
    out.conspiracy.narrative = to_string(Narrative::conspiracy);
    for (const auto& f : features) {
        ScoredUser user;
        user.user_id = f.id;
        user.comment_count = f.comments;
        user.scores = trait_scores(f.means, out.baseline, matrix);
        user.model = to_labels(user.scores);
        (f.narrative == Narrative::science ? out.science : out.conspiracy).users.push_back(std::move(user));
    }
    emit(log, Stage::scoring,
         fmt::format("scored {} science and {} conspiracy users", out.science.users.size(),
                     out.conspiracy.users.size()));
    return out;
}

AnalysisReport analyze_groups(const GroupScores& science, const GroupScores& conspiracy,
                              std::size_t mantel_replicates, std::uint64_t seed, unsigned threads,
                              const StageLogger& log) {
    for (const auto* g : {&science, &conspiracy})
        if (g->users.empty())
            throw AnalysisError(Stage::stats,
                                fmt::format("empty eligible set in the {} chamber; nothing to compare", g->narrative));
    emit(log, Stage::stats,
         fmt::format("analysing {} science vs {} conspiracy users", science.users.size(), conspiracy.users.size()));

    auto analyse = [](const GroupScores& g) {
        GroupAnalysis a;
        a.users = g.users.size();
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            const auto values = g.trait_values(kAllTraits[t]);
            if (values.size() >= 2) a.descriptives[t] = descriptive(values);
        }
        if (g.users.size() >= 2) {
            a.correlations = trait_correlation_matrix(g);
            a.activity = activity_trait_correlation(g);
        }
        a.ranking = pm_ranking(g);
        return a;
    };

    AnalysisReport report;
    report.science = analyse(science);
    report.conspiracy = analyse(conspiracy);
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        const auto a = science.trait_values(kAllTraits[t]);
        const auto b = conspiracy.trait_values(kAllTraits[t]);
        report.mann_whitney[t] = mann_whitney_u(a, b);
    }
    if (report.science.correlations && report.conspiracy.correlations && report.science.correlations->complete() &&
        report.conspiracy.correlations->complete()) {
        report.mantel = mantel(report.science.correlations->values, report.conspiracy.correlations->values,
                               mantel_replicates, seed, resolve_threads(threads));
        emit(log, Stage::stats,
             fmt::format("mantel r={:.4f} p={:.4g} ({} replicates, seed {})", report.mantel->statistic,
                         report.mantel->p_value, mantel_replicates, seed));
    } else {
        emit(log, Stage::stats, "mantel test not applicable: a correlation matrix has undefined entries");
    }
    return report;
}

nlohmann::json to_json(const AnalysisReport& report) {
    nlohmann::json traits = nlohmann::json::array();
    for (auto t : kAllTraits) traits.push_back(std::string(to_string(t)));

    nlohmann::json descriptives, corr, ranking, activity, groups;
    for (const auto& [name, g] : {std::pair{"science", &report.science}, std::pair{"conspiracy", &report.conspiracy}}) {
        groups[name] = {{"users", g->users}};
        nlohmann::json d = nlohmann::json::object();
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            const auto& desc = g->descriptives[t];
            d[std::string(to_string(kAllTraits[t]))] =
                desc ? nlohmann::json{{"mean", desc->mean}, {"sd", desc->sd}} : nlohmann::json(nullptr);
        }
        descriptives[name] = d;

        if (g->correlations) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& row : g->correlations->values) {
                nlohmann::json r = nlohmann::json::array();
                for (double v : row) r.push_back(number_or_null(v));
                rows.push_back(r);
            }
            corr[name] = rows;
        } else {
            corr[name] = nullptr;
        }

        nlohmann::json rk = nlohmann::json::array();
        for (std::size_t i = 0; i < g->ranking.size(); ++i)
            rk.push_back({{"rank", i + 1},
                          {"pm", g->ranking[i].model.str()},
                          {"count", g->ranking[i].count},
                          {"percentage", g->ranking[i].percentage}});
        ranking[name] = rk;

        if (g->activity) {
            nlohmann::json a = nlohmann::json::object();
            for (std::size_t t = 0; t < kTraitCount; ++t)
                a[std::string(to_string(kAllTraits[t]))] = number_or_null((*g->activity)[t]);
            activity[name] = a;
        } else {
            activity[name] = nullptr;
        }
    }

    nlohmann::json mw = nlohmann::json::object();
    for (std::size_t t = 0; t < kTraitCount; ++t)
        mw[std::string(to_string(kAllTraits[t]))] = to_json(report.mann_whitney[t]);

    nlohmann::json mantel_json = report.mantel
                                     ? to_json(*report.mantel)
                                     : nlohmann::json{{"applicable", false},
                                                      {"reason", "correlation matrix has undefined entries"}};
    corr["traits"] = traits;

    return {{"groups", groups},
            {"descriptives", descriptives},
            {"mann_whitney", mw},
            {"corr_matrices", corr},
            {"mantel", mantel_json},
            {"pm_ranking", ranking},
            {"activity_corr", activity}};
}

std::string scored_users_csv(const GroupScores& science, const GroupScores& conspiracy) {
    std::string out = "user_id,narrative,comment_count,E,S,A,C,O,pm\n";
    for (const auto* g : {&science, &conspiracy})
        for (const auto& u : g->users)
            out += fmt::format("{},{},{},{},{},{},{},{},{}\n", csv::escape(u.user_id), g->narrative, u.comment_count,
                               u.scores.values[0], u.scores.values[1], u.scores.values[2], u.scores.values[3],
                               u.scores.values[4], u.model.str());
    return out;
}

std::pair<GroupScores, GroupScores> read_scored_users(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(fmt::format("cannot open scored users '{}'", path.string()));
    GroupScores science{to_string(Narrative::science), {}};
    GroupScores conspiracy{to_string(Narrative::conspiracy), {}};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = csv::chomp(line);
        if (view.empty()) continue;
        auto fields = csv::parse_line(view);
        auto fail = [&](const std::string& msg) {
            throw IngestError(fmt::format("{}:{}: {}", path.string(), line_no, msg));
        };
        if (!header) {
            header = true;
            if (view != "user_id,narrative,comment_count,E,S,A,C,O,pm")
                fail("expected header user_id,narrative,comment_count,E,S,A,C,O,pm");
            continue;
        }
        if (!fields || fields->size() != 9) fail("expected 9 fields");
        const auto& f = *fields;
        ScoredUser user;
        user.user_id = f[0];
        try {
            user.comment_count = std::stoul(f[2]);
            for (std::size_t t = 0; t < kTraitCount; ++t) user.scores.values[t] = std::stoi(f[3 + t]);
        } catch (const std::exception&) {
            fail("non-numeric count or score");
        }
        auto model = PersonalityModel::parse(f[8]);
        if (!model) fail(fmt::format("invalid personality model '{}'", f[8]));
        if (*model != to_labels(user.scores)) fail(fmt::format("model '{}' does not match the scores", f[8]));
        user.model = *model;
        auto narrative = parse_narrative(f[1]);
        if (!narrative) fail(fmt::format("unknown narrative '{}'", f[1]));
        (*narrative == Narrative::science ? science : conspiracy).users.push_back(std::move(user));
    }
    if (!header) throw IngestError(fmt::format("scored users file '{}' is empty", path.string()));
    return {std::move(science), std::move(conspiracy)};
}

void write_analysis_bundle(const AnalysisReport& report, const GroupScores& science, const GroupScores& conspiracy,
                           const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "histograms", ec);
    if (ec) throw AnalysisError(Stage::output, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

    write_file(dir / "analysis.json", to_json(report).dump(2) + "\n");

    const std::array<std::pair<const GroupAnalysis*, const GroupScores*>, 2> groups = {
        std::pair{&report.science, &science}, std::pair{&report.conspiracy, &conspiracy}};

    std::string desc = "narrative,trait,n,mean,sd\n";
    std::string corr = "narrative,trait,E,S,A,C,O\n";
    std::string rank = "narrative,rank,pm,count,percentage\n";
    std::string act = "narrative,E,S,A,C,O\n";
    for (const auto& [a, g] : groups) {
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            const auto& d = a->descriptives[t];
            desc += fmt::format("{},{},{},{},{}\n", g->narrative, to_string(kAllTraits[t]), a->users,
                                d ? format_number(d->mean) : "NA", d ? format_number(d->sd) : "NA");
            if (a->correlations) {
                corr += fmt::format("{},{}", g->narrative, to_string(kAllTraits[t]));
                for (double v : a->correlations->values[t]) corr += "," + format_number(v);
                corr += "\n";
            }
        }
        for (std::size_t i = 0; i < a->ranking.size(); ++i)
            rank += fmt::format("{},{},{},{},{:.2f}\n", g->narrative, i + 1, a->ranking[i].model.str(),
                                a->ranking[i].count, a->ranking[i].percentage);
        act += g->narrative;
        for (std::size_t t = 0; t < kTraitCount; ++t)
            act += "," + (a->activity ? format_number((*a->activity)[t]) : std::string("NA"));
        act += "\n";

        for (auto trait : kAllTraits) {
            std::vector<int> values;
            for (const auto& u : g->users) values.push_back(u.scores[trait]);
            const auto bins = histogram_bins(values);
            const auto stem = fmt::format("{}_{}", g->narrative, to_string(trait));
            write_file(dir / "histograms" / (stem + ".csv"), histogram_csv(bins));
            write_file(dir / "histograms" / (stem + ".svg"),
                       histogram_svg(bins, trait_name(trait), fmt::format("{} ({})", trait_name(trait), g->narrative)));
        }
    }
    std::string mw = "trait,statistic,p_value,method,n_science,n_conspiracy\n";
    for (std::size_t t = 0; t < kTraitCount; ++t)
        mw += fmt::format("{},{},{},{},{},{}\n", to_string(kAllTraits[t]), format_number(report.mann_whitney[t].statistic),
                          format_number(report.mann_whitney[t].p_value), to_string(report.mann_whitney[t].method),
                          science.users.size(), conspiracy.users.size());
    std::string mantel_csv = "statistic,p_value,method,replicates,seed\n";
    if (report.mantel)
        mantel_csv += fmt::format("{},{},{},{},{}\n", format_number(report.mantel->statistic),
                                  format_number(report.mantel->p_value), to_string(report.mantel->method),
                                  report.mantel->replicates, report.mantel->seed.value_or(0));
    else
        mantel_csv += "NA,NA,permutation,NA,NA\n";

    write_file(dir / "descriptives.csv", desc);
    write_file(dir / "mann_whitney.csv", mw);
    write_file(dir / "corr_matrices.csv", corr);
    write_file(dir / "mantel.csv", mantel_csv);
    write_file(dir / "pm_ranking.csv", rank);
    write_file(dir / "activity_corr.csv", act);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(fmt::format("cannot open '{}' for hashing", path.string()));
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buffer;
    while (in) {
        in.read(buffer.data(), buffer.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    std::string hex;
    for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

RunResult run_pipeline(const PipelineConfig& config, RunMode mode, const StageLogger& log) {
    config.validate();
    RunResult result;
    result.scores = score_corpus(config, log);

    // Created only once inputs have scored, so failed runs leave nothing behind.
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec || !std::filesystem::is_directory(config.output_dir))
        throw ConfigError(fmt::format("output directory '{}' is not writable", config.output_dir.string()));
    write_file(config.output_dir / "ingestion_report.json", to_json(result.scores.ingestion).dump(2) + "\n");
    write_file(config.output_dir / "scored_users.csv", scored_users_csv(result.scores.science, result.scores.conspiracy));

    if (mode == RunMode::analyze) {
        result.analysis = analyze_groups(result.scores.science, result.scores.conspiracy, config.mantel_replicates,
                                         config.seed, config.threads, log);
        write_analysis_bundle(result.analysis, result.scores.science, result.scores.conspiracy, config.output_dir);
    }

    PipelineConfig recorded = config;
    auto absolute = [](const std::filesystem::path& p) { return std::filesystem::absolute(p).lexically_normal(); };
    recorded.pages = absolute(config.pages);
    recorded.comments = absolute(config.comments);
    recorded.likes = absolute(config.likes);
    if (config.lexicon_dir) recorded.lexicon_dir = absolute(*config.lexicon_dir);
    if (config.sign_matrix) recorded.sign_matrix = absolute(*config.sign_matrix);
    recorded.output_dir = absolute(config.output_dir);

    nlohmann::json inputs = {{"pages", sha256_file(config.pages)},
                             {"comments", sha256_file(config.comments)},
                             {"likes", sha256_file(config.likes)}};
    if (config.sign_matrix) inputs["sign_matrix"] = sha256_file(*config.sign_matrix);
    if (config.lexicon_dir)
        for (auto name : kLexiconFiles)
            inputs["lexicon/" + std::string(name)] = sha256_file(*config.lexicon_dir / name);

    nlohmann::json outputs = {{"scored_users.csv", sha256_file(config.output_dir / "scored_users.csv")}};
    if (mode == RunMode::analyze) outputs["analysis.json"] = sha256_file(config.output_dir / "analysis.json");

    result.manifest = {{"tool", "chamberscope"},
                       {"version", kToolVersion},
                       {"mode", mode == RunMode::analyze ? "analyze" : "score"},
                       {"config", to_json(recorded)},
                       {"seed", config.seed},
                       {"input_sha256", inputs},
                       {"output_sha256", outputs}};
    write_file(config.output_dir / "manifest.json", result.manifest.dump(2) + "\n");
    emit(log, Stage::output, fmt::format("wrote bundle to {}", config.output_dir.string()));
    return result;
}

PipelineConfig config_from_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open manifest '{}'", manifest_path.string()));
    auto manifest = nlohmann::json::parse(in, nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("config"))
        throw ConfigError(fmt::format("'{}' is not a run manifest", manifest_path.string()));
    auto config = config_from_json(manifest["config"]);
    if (manifest.contains("input_sha256")) {
        const auto& hashes = manifest["input_sha256"];
        auto check = [&](const std::string& key, const std::filesystem::path& p) {
            if (!hashes.contains(key)) return;
            const auto actual = sha256_file(p);
            if (actual != hashes[key].get<std::string>())
                throw ConfigError(fmt::format("input '{}' changed since the manifest was written", p.string()));
        };
        check("pages", config.pages);
        check("comments", config.comments);
        check("likes", config.likes);
        if (config.sign_matrix) check("sign_matrix", *config.sign_matrix);
        if (config.lexicon_dir)
            for (auto name : kLexiconFiles) check("lexicon/" + std::string(name), *config.lexicon_dir / name);
    }
    return config;
}

}  // namespace chamberscope
