// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chamberscope/corpus.hpp"
#include "chamberscope/error.hpp"
#include "chamberscope/personality.hpp"
#include "chamberscope/stats.hpp"

namespace chamberscope {

enum class BaselineMode { per_user, per_comment };

const char* to_string(BaselineMode mode) noexcept;
std::optional<BaselineMode> parse_baseline_mode(std::string_view text);

struct PipelineConfig {
    std::filesystem::path pages;
    std::filesystem::path comments;
    std::filesystem::path likes;
    /// Built-in lexicons / sign matrix when unset.
    std::optional<std::filesystem::path> lexicon_dir;
    std::optional<std::filesystem::path> sign_matrix;
    std::size_t min_comments = kDefaultMinComments;
    double polarization_threshold = kDefaultPolarizationThreshold;
    BaselineMode baseline = BaselineMode::per_user;
    std::size_t mantel_replicates = kDefaultMantelReplicates;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "chamberscope-out";
    /// ISO-8601 bounds on comment timestamps, inclusive.
    std::optional<std::string> from;
    std::optional<std::string> to;
    /// Worker threads for feature extraction and Mantel replicates; 0 picks
    /// the hardware concurrency. Never changes results.
    unsigned threads = 1;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);
/// Fields missing from `json` keep their defaults. Throws ConfigError.
PipelineConfig config_from_json(const nlohmann::json& json);

/// Receives one line per stage transition, in execution order.
using StageLogger = std::function<void(Stage, const std::string&)>;

struct ScoreOutcome {
    IngestionReport ingestion;
    CorpusBaseline baseline;
    GroupScores science;
    GroupScores conspiracy;
};

/// ingest -> eligibility -> features -> baseline -> scoring.
ScoreOutcome score_corpus(const PipelineConfig& config, const StageLogger& log = {});

struct GroupAnalysis {
    std::size_t users = 0;
    std::array<std::optional<Descriptive>, kTraitCount> descriptives;
    std::optional<CorrMatrix> correlations;
    std::vector<PmShare> ranking;
    std::optional<std::array<std::optional<double>, kTraitCount>> activity;
};

struct AnalysisReport {
    GroupAnalysis science;
    GroupAnalysis conspiracy;
    std::array<TestResult, kTraitCount> mann_whitney;
    /// Absent when either correlation matrix has undefined entries.
    std::optional<TestResult> mantel;
};

/// The comparison battery. Throws AnalysisError when either group is empty.
AnalysisReport analyze_groups(const GroupScores& science, const GroupScores& conspiracy,
                              std::size_t mantel_replicates, std::uint64_t seed, unsigned threads = 1,
                              const StageLogger& log = {});

nlohmann::json to_json(const AnalysisReport& report);

/// Scored-user CSV: user_id,narrative,comment_count,E,S,A,C,O,pm.
std::string scored_users_csv(const GroupScores& science, const GroupScores& conspiracy);
/// Parses scored_users_csv output. Throws IngestError on malformed rows.
std::pair<GroupScores, GroupScores> read_scored_users(const std::filesystem::path& path);

/// Writes analysis.json, per-section CSVs and per-trait histograms (CSV and
/// SVG) into `directory`.
void write_analysis_bundle(const AnalysisReport& report, const GroupScores& science,
                           const GroupScores& conspiracy, const std::filesystem::path& directory);

struct RunResult {
    ScoreOutcome scores;
    AnalysisReport analysis;
    nlohmann::json manifest;
};

enum class RunMode { score, analyze };

/// Runs the pipeline and writes the bundle: ingestion_report.json,
/// scored_users.csv, manifest.json and, for RunMode::analyze, the analysis
/// outputs.
RunResult run_pipeline(const PipelineConfig& config, RunMode mode = RunMode::analyze,
                       const StageLogger& log = {});

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Config stored in a run manifest; throws ConfigError if an input file
/// no longer matches its recorded hash.
PipelineConfig config_from_manifest(const std::filesystem::path& manifest_path);

}  // namespace chamberscope
