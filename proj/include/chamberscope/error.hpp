// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace chamberscope {

/// Pipeline stage an error originated from. Drives CLI exit codes.
enum class Stage { config, ingest, features, baseline, scoring, stats, output };

const char* to_string(Stage stage) noexcept;

class Error : public std::runtime_error {
public:
    Error(Stage stage, const std::string& what) : std::runtime_error(what), stage_(stage) {}
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Stage::config, what) {}
};

class IngestError : public Error {
public:
    explicit IngestError(const std::string& what) : Error(Stage::ingest, what) {}
};

class AnalysisError : public Error {
public:
    AnalysisError(Stage stage, const std::string& what) : Error(stage, what) {}
};

}  // namespace chamberscope
