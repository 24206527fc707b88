// rcgossip command line: exact freshness values, simulation, sweeps,
// optimal cluster sizes and the acceptance self-test.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 self-test failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcgossip/acceptance.hpp"
#include "rcgossip/analytic.hpp"
#include "rcgossip/experiments.hpp"
#include "rcgossip/simulator.hpp"

using namespace rcgossip;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitSelftest = 3;

struct RateFlags {
    std::optional<double> lambda_e, lambda_s, lambda_c, lambda_g, alpha;

    void add_to(CLI::App* app)
    {
        app->add_option("--lambda-e", lambda_e, "source self-update rate");
        app->add_option("--lambda-s", lambda_s, "total source to receiver rate");
        app->add_option("--lambda-c", lambda_c, "total clusterhead to node rate");
        app->add_option("--lambda-g", lambda_g, "total gossip rate per fresh node");
        app->add_option("--alpha", alpha, "lambda_e / lambda_s (instead of --lambda-e)")
            ->excludes("--lambda-e");
    }

    void apply(Rates& r) const
    {
        if (lambda_s) r.lambda_s = *lambda_s;
        if (lambda_c) r.lambda_c = *lambda_c;
        if (lambda_g) r.lambda_g = *lambda_g;
        if (lambda_e) r.lambda_e = *lambda_e;
        if (alpha) r.lambda_e = *alpha * r.lambda_s;
    }

    bool any() const { return lambda_e || lambda_s || lambda_c || lambda_g || alpha; }
};

/// Flags shared by the single-point verbs.
struct PointFlags {
    std::string policy;
    std::string cluster_policy;
    int n = 1;
    std::optional<int> k;
    RateFlags rates;
    std::string output;

    void add_to(CLI::App* app)
    {
        app->add_option("--policy", policy,
                        "flat policy, or the source-stage policy when --k is given")
            ->required();
        app->add_option("--cluster-policy", cluster_policy, "cluster-stage policy (needs --k)");
        app->add_option("--n", n, "number of end-nodes")->required();
        app->add_option("--k", k, "cluster size; makes the network clustered");
        app->add_option("--output", output, "write the CSV here instead of stdout");
        rates.add_to(app);
    }

    ExperimentConfig to_config() const
    {
        ExperimentConfig cfg;
        cfg.name = "point";
        cfg.mode = ExperimentMode::single_point;
        cfg.n = n;
        cfg.k = k;
        PolicyChoice choice{policy_from_string(policy), std::nullopt};
        if (k) {
            choice.cluster = policy_from_string(cluster_policy.empty() ? policy : cluster_policy);
        } else if (!cluster_policy.empty()) {
            throw ConfigError({"--cluster-policy needs --k"});
        }
        cfg.policies = {choice};
        RateCase rc{"point", {}};
        rates.apply(rc.rates);
        cfg.cases = {rc};
        return cfg;
    }
};

/// Overrides applied on top of a config file.
struct SweepFlags {
    std::string config_path;
    std::optional<std::string> name, output, plot_dir;
    std::optional<int> n;
    std::optional<std::int64_t> cycles;
    std::optional<std::uint64_t> seed;
    RateFlags rates;

    void add_to(CLI::App* app, bool config_required)
    {
        auto* opt = app->add_option("--config", config_path, "JSON experiment config");
        if (config_required) opt->required();
        app->add_option("--name", name, "experiment name");
        app->add_option("--output", output, "CSV output path");
        app->add_option("--plot-dir", plot_dir, "directory for plot series files");
        app->add_option("--n", n, "fixed n (clustered sweeps)");
        app->add_option("--cycles", cycles, "Monte Carlo cycles per grid point");
        app->add_option("--seed", seed, "base RNG seed");
        rates.add_to(app);
    }

    void apply(ExperimentConfig& cfg) const
    {
        if (name) cfg.name = *name;
        if (output) cfg.output = *output;
        if (plot_dir) cfg.plot_dir = *plot_dir;
        if (n) cfg.n = *n;
        if (cycles || seed) {
            SimSettings s = cfg.sim.value_or(SimSettings{});
            if (cycles) s.cycles = *cycles;
            if (seed) s.seed = *seed;
            cfg.sim = s;
        }
        if (rates.any()) {
            for (auto& rc : cfg.cases) rates.apply(rc.rates);
        }
    }
};

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path)
{
    const std::string text = to_csv(rows);
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

void print_trace(const PointFlags& point)
{
    const ExperimentConfig cfg = point.to_config();
    if (cfg.k) return;
    const Rates& r = cfg.cases.front().rates;
    const auto trace = renewal_freshness(cfg.policies.front().source, r.lambda_s, r.lambda_g,
                                         *cfg.n, r.lambda_e);
    std::cerr << "step\tq\ttau\tabsorption\n";
    for (std::size_t i = 0; i < trace.q.size(); ++i) {
        std::fprintf(stderr, "%zu\t%.12g\t%s\t%.12g\n", i + 1, trace.q[i],
                     i < trace.tau.size() ? std::to_string(trace.tau[i]).c_str() : "-",
                     trace.absorption[i]);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Binary freshness of flat and clustered gossip networks under rate-changing gossip"};
    app.require_subcommand(1);

    PointFlags analytic_flags;
    bool trace = false;
    auto* analytic = app.add_subcommand("analytic", "exact freshness at a single point");
    analytic_flags.add_to(analytic);
    analytic->add_flag("--trace", trace, "print the recursion trace (flat networks) to stderr");

    PointFlags sim_point;
    SweepFlags sim_sweep;
    std::int64_t sim_cycles = 100000;
    std::uint64_t sim_seed = 42;
    std::optional<double> horizon;
    auto* simulate = app.add_subcommand("simulate", "exact values plus Monte Carlo columns");
    simulate->add_option("--config", sim_sweep.config_path, "run a whole config with simulation");
    simulate->add_option("--policy", sim_point.policy, "flat or source-stage policy");
    simulate->add_option("--cluster-policy", sim_point.cluster_policy, "cluster-stage policy");
    simulate->add_option("--n", sim_point.n, "number of end-nodes");
    simulate->add_option("--k", sim_point.k, "cluster size");
    simulate->add_option("--output", sim_point.output, "CSV output path");
    simulate->add_option("--cycles", sim_cycles, "renewal cycles")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    simulate->add_option("--horizon", horizon,
                         "also run the time-average estimator over this horizon");
    sim_point.rates.add_to(simulate);

    SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "run a config-driven parameter sweep");
    sweep_flags.add_to(sweep, true);

    SweepFlags optk_flags;
    auto* optk = app.add_subcommand("optimal-k", "optimal cluster size per policy pair");
    optk_flags.add_to(optk, true);

    std::string selftest_csv;
    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    selftest->add_option("--csv", selftest_csv, "write per-criterion results as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*analytic) {
            emit_csv(evaluate_grid(analytic_flags.to_config()), analytic_flags.output);
            if (trace) print_trace(analytic_flags);
        } else if (*simulate) {
            if (!sim_sweep.config_path.empty()) {
                ExperimentConfig cfg = load_config(sim_sweep.config_path);
                SimSettings s = cfg.sim.value_or(SimSettings{});
                if (simulate->count("--cycles")) s.cycles = sim_cycles;
                if (simulate->count("--seed")) s.seed = sim_seed;
                cfg.sim = s;
                if (!sim_point.output.empty()) cfg.output = sim_point.output;
                for (auto& rc : cfg.cases) sim_point.rates.apply(rc.rates);
                const auto rows = run_experiment(cfg);
                if (cfg.output.empty()) emit_csv(rows, "");
            } else {
                if (sim_point.policy.empty()) throw ConfigError({"--policy or --config is required"});
                ExperimentConfig cfg = sim_point.to_config();
                cfg.sim = SimSettings{sim_cycles, sim_seed};
                emit_csv(evaluate_grid(cfg), sim_point.output);
                if (horizon) {
                    const Rates& r = cfg.cases.front().rates;
                    const auto& choice = cfg.policies.front();
                    const NetworkSpec spec =
                        choice.clustered()
                            ? NetworkSpec::clustered(*cfg.n / *cfg.k, *cfg.k, choice.source,
                                                     *choice.cluster, r)
                            : NetworkSpec::flat(*cfg.n, choice.source, r);
                    const auto est = estimate_freshness_time(spec, *horizon, sim_seed);
                    std::fprintf(stderr, "time-average: p = %.6f  stderr = %.3g  ci95 = [%.6f, %.6f]\n",
                                 est.p_hat, est.std_error, est.ci_lo, est.ci_hi);
                    if (est.warning) std::cerr << "warning: " << *est.warning << '\n';
                }
            }
        } else if (*sweep) {
            ExperimentConfig cfg = load_config(sweep_flags.config_path);
            sweep_flags.apply(cfg);
            const auto rows = run_experiment(cfg);
            if (cfg.output.empty()) emit_csv(rows, "");
            std::cerr << rows.size() << " rows\n";
        } else if (*optk) {
            ExperimentConfig cfg = load_config(optk_flags.config_path);
            optk_flags.apply(cfg);
            const auto report = report_optimal_k(cfg);
            std::cout << report.to_text();
        } else if (*selftest) {
            const auto results = run_acceptance();
            std::cout << format_results(results);
            if (!selftest_csv.empty()) write_text_file(selftest_csv, results_csv(results));
            for (const auto& r : results) {
                if (!r.passed) return kExitSelftest;
            }
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
