#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "tenfact/factorizer.hpp"
#include "tenfact/protocol.hpp"

namespace tenfact {

/// A parsed problem file: the spec plus the optional simulation inputs.
struct ProblemFile {
    ProblemSpec spec;
    std::optional<BasisSuite> basis;
};

/// Reads and validates a problem file. All indices in files are 1-based.
/// Unknown members are rejected. Throws ValidationError with the offending
/// field named.
ProblemFile load_problem(const std::filesystem::path& path);
ProblemFile parse_problem(const std::string& text);

/// Factorization files carry "format_version" "1", the server count, the
/// dense row-major decoding matrix, the sparse encoding entries, the tile
/// table, and the tolerance used to build them.
void save_factorization(const Factorization& fact, const TilePlan& plan,
                        const std::filesystem::path& path);
std::string factorization_to_string(const Factorization& fact, const TilePlan& plan);

/// Loads a factorization against its problem (which fixes K and the mode
/// sizes). Throws ValidationError on malformed or inconsistent files.
Factorization load_factorization(const std::filesystem::path& path, const ProblemSpec& spec);
Factorization parse_factorization(const std::string& text, const ProblemSpec& spec);

/// Machine-readable run report. Sections are filled by whoever has them:
/// bounds always, audit/residual after verification, errors after simulation.
struct RunReport {
    Index num_users = 0;
    Index num_servers = 0;
    std::optional<Index> bound_constructive;
    std::optional<Index> bound_general;
    std::optional<Index> bound_simplified;  // absent when divisibility fails
    std::array<Index, 4> class_counts{};
    std::optional<BaselineCount> baseline;
    Index baseline_granularity = 1;
    std::optional<double> residual;
    std::optional<CostReport> costs;
    std::optional<double> max_rel_error;
    double rate = 0.0;
    NormalizedConstraints declared_normalized;
};

std::string report_to_string(const RunReport& report);
void save_report(const RunReport& report, const std::filesystem::path& path);

}  // namespace tenfact
