#include "rcgossip/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "rcgossip/analytic.hpp"
#include "rcgossip/experiments.hpp"
#include "rcgossip/simulator.hpp"

namespace rcgossip {

namespace {

constexpr double kGrid[] = {0.1, 0.5, 1.0, 2.0, 10.0};
constexpr int kMaxN = 64;
constexpr double kExact = 1e-12;
constexpr double kSigmas = 4.0;
constexpr std::int64_t kCycles = 100000;

std::string fmt(const char* format, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

struct Outcome {
    bool passed;
    std::string detail;
};

CriterionResult timed(int id, std::string name, double budget_seconds,
                      const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o = body();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CriterionResult r{id, std::move(name), o.passed, std::move(o.detail), secs};
    if (budget_seconds > 0 && secs >= budget_seconds) {
        r.passed = false;
        r.detail += fmt("; over the %.0f s budget", budget_seconds);
    }
    return r;
}

Outcome closed_forms_match_recursion()
{
    using enum GossipPolicy;
    double worst = 0.0;
    long checked = 0;
    auto track = [&](double a, double b) {
        worst = std::max(worst, std::abs(a - b));
        ++checked;
    };

    for (int n = 1; n <= kMaxN; ++n) {
        for (double le : kGrid) {
            for (double ls : kGrid) {
                track(freshness_dc_norc(ls, le, n), flat_freshness(DC_noRC, ls, 0.0, le, n));
                track(freshness_dc_rc(ls, le, n), flat_freshness(DC_RC, ls, 0.0, le, n));
                for (double lg : kGrid) {
                    track(freshness_fc_allrc(ls, lg, le, n), flat_freshness(FC_allRC, ls, lg, le, n));
                    track(freshness_fc_norc(ls, lg, le, n), flat_freshness(FC_noRC, ls, lg, le, n));
                }
            }
        }
    }

    const std::pair<GossipPolicy, GossipPolicy> rows[] = {
        {DC_noRC, DC_noRC}, {DC_noRC, DC_RC}, {DC_RC, DC_noRC}, {DC_RC, DC_RC},
        {DC_noRC, FC_noRC}, {DC_RC, FC_noRC}, {DC_RC, FC_allRC}};
    for (int n = 1; n <= kMaxN; ++n) {
        for (int k : divisors(n)) {
            const int m = n / k;
            for (double le : kGrid) for (double ls : kGrid) for (double lc : kGrid) for (double lg : kGrid) {
                const Rates r{le, ls, lc, lg};
                for (auto [s, c] : rows) {
                    track(*tabulated_clustered_freshness(s, c, m, k, r),
                          clustered_freshness(m, k, s, c, r).p);
                }
            }
        }
    }
    return {worst <= kExact, fmt("max |closed - recursion| = %.3g over %ld points", worst, checked)};
}

Outcome spot_values()
{
    using enum GossipPolicy;
    const Rates ones{1, 1, 1, 1};
    struct Spot {
        const char* what;
        double got;
        double want;
    };
    const Spot spots[] = {
        {"DC_RC n=3", freshness_dc_rc(1, 1, 3), 7.0 / 24},
        {"FC_allRC n=2", freshness_fc_allrc(1, 1, 1, 2), 5.0 / 12},
        {"FC_allRC n=3", freshness_fc_allrc(1, 1, 1, 3), 13.0 / 36},
        {"FC_sRC n=3", flat_freshness(FC_sRC, 1, 1, 1, 3), 19.0 / 54},
        {"(DC_RC,DC_RC) m=k=2", *tabulated_clustered_freshness(DC_RC, DC_RC, 2, 2, ones), 9.0 / 64},
        {"(DC_RC,FC_allRC) m=k=2", *tabulated_clustered_freshness(DC_RC, FC_allRC, 2, 2, ones),
         5.0 / 32},
    };
    double worst = 0.0;
    std::string failed;
    for (const auto& s : spots) {
        const double err = std::abs(s.got - s.want);
        worst = std::max(worst, err);
        if (err > kExact) failed += std::string(" ") + s.what;
    }
    return {failed.empty(), fmt("6 values, max error %.3g", worst) +
                                (failed.empty() ? "" : "; off:" + failed)};
}

Outcome inequalities()
{
    using enum GossipPolicy;
    long violations = 0;
    long checked = 0;
    double worst_collapse = 0.0;
    for (int n = 1; n <= kMaxN; ++n) {
        for (double le : kGrid) {
            for (double ls : kGrid) {
                const double rc = freshness_dc_rc(ls, le, n);
                const double norc = freshness_dc_norc(ls, le, n);
                ++checked;
                if (n >= 2 ? !(rc > norc) : std::abs(rc - norc) > kExact) ++violations;

                for (double lg : kGrid) {
                    const double all = flat_freshness(FC_allRC, ls, lg, le, n);
                    const double src = flat_freshness(FC_sRC, ls, lg, le, n);
                    const double none = flat_freshness(FC_noRC, ls, lg, le, n);
                    ++checked;
                    if (!(all >= src && src >= none)) ++violations;
                }

                // gossip switched off
                const double dc_rc = flat_freshness(DC_RC, ls, 0.0, le, n);
                const double dc_norc = flat_freshness(DC_noRC, ls, 0.0, le, n);
                checked += 4;
                if (flat_freshness(FC_allRC, ls, 0.0, le, n) != dc_rc) ++violations;
                if (flat_freshness(FC_sRC, ls, 0.0, le, n) != dc_rc) ++violations;
                if (flat_freshness(FC_noRC, ls, 0.0, le, n) != dc_norc) ++violations;
                const double geometric = std::abs(freshness_fc_allrc(ls, 0.0, le, n) - rc);
                worst_collapse = std::max(worst_collapse, geometric);
                if (geometric > kExact) ++violations;
            }
        }
    }
    return {violations == 0,
            fmt("%ld violations in %ld checks; closed-form collapse error %.3g", violations,
                checked, worst_collapse)};
}

Outcome monte_carlo_agreement()
{
    const Rates points[] = {{1.0, 1.0, 1.0, 1.0}, {0.2, 0.5, 1.0, 2.0}, {2.0, 3.0, 1.0, 1.0}};
    const int sizes[] = {1, 2, 3, 5, 8};
    double worst = 0.0;
    int failures = 0;
    int runs = 0;
    std::uint64_t seed = 1000;
    for (GossipPolicy policy : kAllPolicies) {
        for (int n : sizes) {
            for (const Rates& r : points) {
                const double exact = flat_freshness(policy, r.lambda_s, r.lambda_g, r.lambda_e, n);
                const auto est =
                    estimate_freshness_cycles(NetworkSpec::flat(n, policy, r), kCycles, seed++);
                const double z = std::abs(z_score(est, exact));
                worst = std::max(worst, z);
                ++runs;
                if (z > kSigmas) ++failures;
            }
        }
    }
    return {failures == 0, fmt("%d/%d within 4 sigma, max |z| = %.3f", runs - failures, runs, worst)};
}

Outcome decomposition()
{
    const Rates r{0.5, 2.0, 1.5, 1.0};
    const std::pair<int, int> shapes[] = {{2, 2}, {3, 4}, {4, 3}};
    double worst = 0.0;
    int failures = 0;
    int runs = 0;
    std::uint64_t seed = 5000;
    for (GossipPolicy source : kSourcePolicies) {
        for (GossipPolicy cluster : kAllPolicies) {
            for (auto [m, k] : shapes) {
                const auto report =
                    decomposition_check(NetworkSpec::clustered(m, k, source, cluster, r), kCycles, seed++);
                worst = std::max(worst, std::abs(report.z));
                ++runs;
                if (std::abs(report.z) > kSigmas) ++failures;
            }
        }
    }
    return {failures == 0, fmt("%d/%d within 4 sigma, max |z| = %.3f", runs - failures, runs, worst)};
}

ExperimentConfig placement_study()
{
    using enum GossipPolicy;
    ExperimentConfig cfg;
    cfg.name = "placement";
    cfg.mode = ExperimentMode::clustered_sweep_k;
    cfg.n = 120;
    cfg.policies = {{DC_noRC, DC_noRC}, {DC_noRC, DC_RC}, {DC_RC, DC_noRC}, {DC_RC, DC_RC},
                    {DC_noRC, FC_noRC}, {DC_RC, FC_noRC}, {DC_RC, FC_allRC}};
    cfg.cases = {{"equal", {1, 1, 1, 1}},
                 {"source-faster", {1, 2, 1, 1}},
                 {"cluster-faster", {1, 1, 2, 1}}};
    return cfg;
}

Outcome qualitative_reproduction()
{
    const auto report = report_optimal_k(placement_study());
    int failed = 0;
    std::string names;
    for (const auto& c : report.checks) {
        if (!c.passed) {
            ++failed;
            names += "; failed: " + c.rate_case + " " + c.claim;
        }
    }
    return {failed == 0 && report.checks.size() == 10,
            fmt("%zu claims checked, %d failed", report.checks.size(), failed) + names};
}

Outcome determinism()
{
    using enum GossipPolicy;
    ExperimentConfig cfg;
    cfg.name = "determinism";
    cfg.mode = ExperimentMode::flat_sweep_n;
    cfg.policies = {{DC_noRC, {}}, {DC_RC, {}}, {FC_noRC, {}}, {FC_sRC, {}}, {FC_allRC, {}}};
    cfg.cases = {{"alpha=1", {1, 1, 1, 1}}};
    cfg.n_from = 1;
    cfg.n_to = 4;
    cfg.sim = SimSettings{2000, 7};
    const std::string first = to_csv(evaluate_grid(cfg));
    const std::string second = to_csv(evaluate_grid(cfg));

    ExperimentConfig clustered = placement_study();
    clustered.n = 12;
    clustered.sim = SimSettings{500, 11};
    const std::string third = to_csv(evaluate_grid(clustered));
    const std::string fourth = to_csv(evaluate_grid(clustered));
    const bool same = first == second && third == fourth;
    return {same, fmt("flat sweep %zu bytes, clustered sweep %zu bytes, identical: %s",
                      first.size(), third.size(), same ? "yes" : "no")};
}

}  // namespace

std::vector<CriterionResult> run_acceptance()
{
    std::vector<CriterionResult> out;
    out.push_back(timed(1, "closed forms match the renewal recursion", 10.0,
                        closed_forms_match_recursion));
    out.push_back(timed(2, "hand-derived spot values", 0.0, spot_values));
    out.push_back(timed(3, "dominance, ordering and zero-gossip collapse", 0.0, inequalities));
    out.push_back(timed(4, "Monte Carlo agrees with the exact values", 60.0, monte_carlo_agreement));
    out.push_back(timed(5, "clustered simulation matches p_CH * p_node|CH", 0.0, decomposition));
    out.push_back(timed(6, "optimal cluster size claims at n = 120", 5.0, qualitative_reproduction));
    out.push_back(timed(7, "sweeps are byte-for-byte deterministic", 0.0, determinism));
    return out;
}

std::string format_results(const std::vector<CriterionResult>& results)
{
    std::string text;
    for (const auto& r : results) {
        text += fmt("[%s] %d %s (", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str()) + r.detail +
                fmt(") %.2fs\n", r.seconds);
    }
    return text;
}

std::string results_csv(const std::vector<CriterionResult>& results)
{
    std::string text = "criterion,name,passed,detail\n";
    for (const auto& r : results) {
        auto cell = [](std::string s) {
            for (char& ch : s) {
                if (ch == ',') ch = ';';
            }
            return s;
        };
        text += std::to_string(r.id) + "," + cell(r.name) + "," + (r.passed ? "true" : "false") +
                "," + cell(r.detail) + "\n";
    }
    return text;
}

}  // namespace rcgossip
