#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rcgossip/analytic.hpp"
#include "rcgossip/core.hpp"

namespace rcgossip {

/// Invalid experiment configuration; what() lists every problem found.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::vector<std::string>& problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// File system failure, with the offending path in what().
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentMode { flat_sweep_n, clustered_sweep_k, single_point };

std::string_view to_string(ExperimentMode mode);

/// A flat policy (no cluster policy) or a (source, cluster) pair.
struct PolicyChoice {
    GossipPolicy source = GossipPolicy::DC_noRC;
    std::optional<GossipPolicy> cluster;

    bool clustered() const { return cluster.has_value(); }
    std::string label() const;  // "DC_RC" or "DC_RC+FC_allRC"

    friend bool operator==(const PolicyChoice&, const PolicyChoice&) = default;
};

struct RateCase {
    std::string label;
    Rates rates;
};

struct SimSettings {
    std::int64_t cycles = 100000;
    std::uint64_t seed = 42;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentMode mode = ExperimentMode::single_point;
    std::vector<PolicyChoice> policies;
    std::vector<RateCase> cases;
    std::optional<int> n;
    std::optional<int> n_from;
    std::optional<int> n_to;
    std::optional<int> k;  // single clustered point
    std::optional<SimSettings> sim;
    std::string output;    // CSV path; empty means no file
    std::string plot_dir;  // series directory; empty means none
};

/// Parses the JSON config format documented in the README. Unknown keys
/// are errors at every nesting level. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every problem with `config`; empty means valid.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// One CSV record. Optional fields serialize as empty cells.
struct ResultRow {
    std::string experiment;
    std::string policy_source;
    std::optional<std::string> policy_cluster;
    int n = 0;
    std::optional<int> k;
    std::optional<int> m;
    double lambda_e = 0.0;
    double lambda_s = 0.0;
    std::optional<double> lambda_c;
    double lambda_g = 0.0;
    std::optional<double> p_analytic;
    double p_oracle = 0.0;
    std::optional<double> p_sim;
    std::optional<double> sim_ci_lo;
    std::optional<double> sim_ci_hi;
    std::optional<std::int64_t> cycles;
    std::optional<std::uint64_t> seed;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,policy_source,policy_cluster,n,k,m,lambda_e,lambda_s,lambda_c,lambda_g,"
    "p_analytic,p_oracle,p_sim,sim_ci_lo,sim_ci_hi,cycles,seed";

/// Largest allowed |p_analytic − p_oracle| in any emitted row.
inline constexpr double kOracleTolerance = 1e-12;

std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::string_view text);

/// Evaluates the grid in deterministic order (case, policy, then n or k).
/// Rows with simulation use seed mix_seed(config seed, row index).
std::vector<ResultRow> evaluate_grid(const ExperimentConfig& config);

/// evaluate_grid, then writes config.output and config.plot_dir when set.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

void write_text_file(const std::filesystem::path& path, std::string_view text);

struct PlotEmission {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

/// Identifies one plotted series.
struct SeriesKey {
    std::string experiment;
    std::string policy;
    std::string rate_case;

    std::string file_name() const;  // <experiment>__<policy>__<case>.dat
    friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

/// Series key of a row; the case is derived from its rates, e.g. "e0.1_s1_g1".
SeriesKey series_key(const ResultRow& row);

/// Writes one `x y` file per series (x = k for clustered rows, else n;
/// y = p_oracle). Series listed in `expected` that have no rows produce a
/// warning instead of a file. Throws IoError with the path on failure.
PlotEmission emit_plot_data(const std::vector<ResultRow>& rows,
                            const std::filesystem::path& directory,
                            const std::vector<SeriesKey>& expected = {});

struct OptimalKEntry {
    std::string rate_case;
    Rates rates;
    PolicyChoice policy;
    OptimalClusterSize optimum;
};

/// A qualitative claim checked against computed optima.
struct ClaimCheck {
    std::string rate_case;
    std::string claim;
    bool passed = false;
    std::string detail;
};

struct OptimalKReport {
    int n = 0;
    std::vector<OptimalKEntry> entries;
    std::vector<ClaimCheck> checks;
    std::vector<std::string> winners;  // per case: "<case>: <policy> wins"

    bool all_passed() const;
    std::string to_text() const;
};

/// Optimal cluster size per (case, policy pair) for a clustered config,
/// plus the placement claims:
///  - (DC_RC, DC_RC) beats every other DC×DC pair at the optimum;
///  - (DC_RC, FC_allRC) beats every other FC pair at the optimum;
///  - single-RC placements tie when λs == λc (to 1e−12);
///  - the placement at the faster stage wins when λs ≠ λc.
/// Claims are evaluated only when the pairs they mention are configured.
OptimalKReport report_optimal_k(const ExperimentConfig& config);

}  // namespace rcgossip
