#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pttk/kernels.hpp"
#include "pttk/pttk.hpp"
#include "pttk/tensor.hpp"

namespace pttk {

enum class RunMode { ttk, pttk, global1, global2, aca_baseline };

RunMode run_mode_from_string(std::string_view s);
std::string_view to_string(RunMode m);

/// Bad experiment configuration (maps to CLI exit code 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    KernelSpec kernel;
    ProblemGeometry geom;
    Index ns = 2000;           ///< desk-scale default, paper scale via config
    Index nt = 2000;
    Index n = 27;
    std::vector<double> eps_list{1e-6};
    Index theta_samples = 100; ///< desk-scale default (paper uses 300)
    Index subsample = 500;     ///< 0 means full matrices
    std::uint64_t seed = 0x5eed'0000'0001ull;
    RunMode mode = RunMode::pttk;
    std::string output_path = "pttk_experiment";
    Index max_sweeps = 64;
    char norm = 'F'; ///< 'F' or '2'

    void validate() const; ///< throws ConfigError
};

/// Parses the key-value config grammar: one `key = value` per line,
/// '#' starts a comment, keys documented in the README. The environment
/// variable PTTK_SEED provides the seed when the file does not.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct ResultRow {
    std::string kernel;
    double tol = 0.0;
    double offline_time_s = 0.0;
    std::uint64_t storage_bytes = 0;
    double online_time_s = 0.0; ///< mean over theta samples; NaN when no online stage
    double error_mean = 0.0;
    double error_max = 0.0;
    std::string ranks;
    std::uint64_t kernel_evals = 0;
    std::uint64_t seed = 0;
    std::string status; ///< "ok" or "unconverged"
};

/// Uniform i.i.d. points in the box, one row per point, seeded.
Matrix generate_points(const std::vector<Interval>& box, Index count, std::uint64_t seed);

/// |K - Khat| / |K| in the requested norm ('F' or '2'); throws on a zero
/// denominator.
double relative_error(const Matrix& k, const Matrix& khat, char norm);

/// Relative error against the true kernel matrix restricted to row/column
/// subsets (only K(rows, cols) is materialized).
double subsampled_relative_error(const KernelOracle& oracle, const ParametricFactorization& f,
                                 std::span<const double> theta, const Matrix& xs, const Matrix& ys,
                                 std::span<const Index> rows, std::span<const Index> cols,
                                 char norm);

/// Runs the configured experiment: offline once per tolerance, online per
/// theta sample, wall-clock phases, CSV report plus a JSON sidecar embedding
/// the config. Per-row failures are recorded in the row status.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

std::string csv_header();
std::string csv_line(const ResultRow& row);
void write_reports(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows);

} // namespace pttk
