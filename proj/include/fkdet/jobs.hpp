#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fkdet/config.hpp"

namespace fkdet {

enum class Subcommand { Entropy, Fixcount, Invert, Mahler, Specdemo, Decay };

std::string_view to_string(Subcommand s) noexcept;
std::optional<Subcommand> parse_subcommand(std::string_view name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNonexpansive = 2;
inline constexpr int kExitUnknown = 3;

struct JobOptions {
    unsigned threads = 1;
    /// Recorded in the metadata only; no reported value depends on it.
    std::uint64_t seed = 0;
};

struct CsvRow {
    std::string level_order;
    std::string method;
    std::string value;
    double error_bar = 0.0;
    double wall_ms = 0.0;
};

struct JobResult {
    int exit_status = kExitOk;
    std::string summary;
    /// Deterministic JSON report: no timings, fixed key order and summation orders.
    std::string report;
    /// Wall times and run parameters.
    std::string meta;
    std::vector<CsvRow> table;
    bool tabular = false;
};

JobResult run_job(Subcommand command, const JobConfig& config, const JobOptions& options = {});

std::string to_csv(const std::vector<CsvRow>& rows);

/// json: report at `path`, metadata at `path`.meta.json.
/// csv: table at `path`, report at `path`.json, metadata at `path`.meta.json.
/// Returns the files written.
std::vector<std::string> write_outputs(const JobResult& result, OutputFormat format, const std::string& path);

}  // namespace fkdet
