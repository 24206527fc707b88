#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rcgossip/analytic.hpp"
#include "rcgossip/simulator.hpp"

using namespace rcgossip;
using enum GossipPolicy;

namespace {

constexpr double kSigmas = 4.0;

void check_within(const FreshnessEstimate& est, double target)
{
    CAPTURE(est.p_hat);
    CAPTURE(est.std_error);
    CAPTURE(target);
    CHECK(std::abs(z_score(est, target)) <= kSigmas);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("stream generator is deterministic and keyed by stream")
{
    StreamRng a(1, 5), b(1, 5), c(1, 6), d(2, 5);
    const auto first = a();
    CHECK(first == b());
    CHECK(first != c());
    CHECK(first != d());

    StreamRng u(3, 0);
    double sum = 0.0, exp_sum = 0.0;
    constexpr int kDraws = 200000;
    for (int i = 0; i < kDraws; ++i) {
        const double x = u.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
        exp_sum += u.exponential(4.0);
    }
    // means of U(0,1) and Exp(4), 5 sigma
    CHECK(std::abs(sum / kDraws - 0.5) < 5 * std::sqrt(1.0 / 12 / kDraws));
    CHECK(std::abs(exp_sum / kDraws - 0.25) < 5 * 0.25 / std::sqrt(kDraws));
}

TEST_CASE("cycle outcome invariants")
{
    const NetworkSpec specs[] = {
        NetworkSpec::flat(6, FC_allRC, Rates{0.3, 1, 1, 1}),
        NetworkSpec::clustered(3, 2, DC_RC, FC_noRC, Rates{0.3, 2, 1, 1}),
    };
    for (const auto& spec : specs) {
        for (std::uint64_t c = 0; c < 500; ++c) {
            StreamRng rng(99, c);
            const auto out = simulate_cycle(spec, rng);
            REQUIRE(out.updated.size() == static_cast<std::size_t>(spec.end_nodes()));
            CHECK(out.cycle_length > 0.0);
            for (int i = 0; i < spec.end_nodes(); ++i) {
                CHECK((out.fresh_duration[i] > 0.0) == static_cast<bool>(out.updated[i]));
                CHECK(out.fresh_duration[i] <= out.cycle_length);
            }
        }
    }
}

TEST_CASE("versions only flow downstream")
{
    GossipSimulation sim(NetworkSpec::clustered(3, 3, DC_RC, FC_allRC, Rates{0.4, 1, 2, 1}));
    StreamRng rng(17, 0);
    std::uint64_t source = sim.state().source_version;
    for (int i = 0; i < 20000; ++i) {
        const auto before = sim.state();
        const SimEvent e = *sim.step(rng);
        const SimState& s = sim.state();
        if (e.kind == SimEvent::Kind::self_update) {
            CHECK(s.source_version == source + 1);
            source = s.source_version;
        } else {
            CHECK(s.source_version == source);
        }
        for (std::size_t c = 0; c < s.ch_versions.size(); ++c) {
            CHECK(s.ch_versions[c] <= s.source_version);
        }
        for (std::size_t n = 0; n < s.node_versions.size(); ++n) {
            const std::size_t ch = n / 3;
            CHECK(s.node_versions[n] <= s.ch_versions[ch]);
        }
        if (e.kind == SimEvent::Kind::node_delivery) {
            const std::size_t ch = e.target / 3;
            // a node only ever takes its CH's current version
            CHECK(s.node_versions[e.target] == before.ch_versions[ch]);
            // a stale CH never makes a node fresh
            if (before.ch_versions[ch] != before.source_version) CHECK_FALSE(e.became_fresh);
        }
        for (std::size_t n = 0; n < s.fresh_time_accum.size(); ++n) {
            CHECK(s.fresh_time_accum[n] >= before.fresh_time_accum[n]);
        }
    }
}

TEST_CASE("cycle estimator against exact values")
{
    SUBCASE("two-exponential race")
    {
        const auto est = estimate_freshness_cycles(NetworkSpec::flat(1, DC_noRC, Rates{1, 1, 1, 1}),
                                                   1000000, 1);
        check_within(est, 0.5);
        CHECK(est.std_error == doctest::Approx(5e-4).epsilon(0.01));
    }
    SUBCASE("DC_RC, n = 3")
    {
        check_within(estimate_freshness_cycles(NetworkSpec::flat(3, DC_RC, Rates{1, 1, 1, 1}),
                                               1000000, 2),
                     7.0 / 24);
    }
    SUBCASE("FC_allRC, n = 2, seed 42")
    {
        check_within(estimate_freshness_cycles(NetworkSpec::flat(2, FC_allRC, Rates{1, 1, 1, 1}),
                                               1000000, 42),
                     5.0 / 12);
    }
    SUBCASE("FC_sRC, n = 3")
    {
        check_within(estimate_freshness_cycles(NetworkSpec::flat(3, FC_sRC, Rates{1, 1, 1, 1}),
                                               1000000, 3),
                     19.0 / 54);
    }
    SUBCASE("clustered (DC_RC, FC_allRC), m = k = 2")
    {
        check_within(estimate_freshness_cycles(
                         NetworkSpec::clustered(2, 2, DC_RC, FC_allRC, Rates{1, 1, 1, 1}), 1000000, 4),
                     5.0 / 32);
    }
}

TEST_CASE("estimates are reproducible and independent of thread count")
{
    const auto spec = NetworkSpec::flat(2, FC_allRC, Rates{1, 1, 1, 1});
    const auto a = estimate_freshness_cycles(spec, 20000, 42, 1);
    const auto b = estimate_freshness_cycles(spec, 20000, 42, 1);
    const auto c = estimate_freshness_cycles(spec, 20000, 42, 3);
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.ci_lo <= a.p_hat);
    CHECK(a.p_hat <= a.ci_hi);
    CHECK(a.std_error == std::sqrt(a.p_hat * (1 - a.p_hat) / 20000));
    CHECK_FALSE(a == estimate_freshness_cycles(spec, 20000, 43, 1));
}

TEST_CASE("estimator argument errors")
{
    const auto spec = NetworkSpec::flat(2, DC_RC, Rates{});
    CHECK_THROWS_AS(estimate_freshness_cycles(spec, 0, 1), std::domain_error);
    CHECK_THROWS_AS(estimate_freshness_time(spec, 0.0, 1), std::domain_error);
    CHECK_THROWS_AS(estimate_freshness_time(spec, -5.0, 1), std::domain_error);
    CHECK_THROWS_AS(estimate_freshness_cycles(NetworkSpec::flat(2, DC_RC, Rates{0, 1, 1, 1}), 10, 1),
                    std::invalid_argument);
}

TEST_CASE("time-average estimator")
{
    SUBCASE("single node")
    {
        const auto est =
            estimate_freshness_time(NetworkSpec::flat(1, DC_noRC, Rates{1, 1, 1, 1}), 1e6, 5);
        check_within(est, 0.5);
        CHECK_FALSE(est.warning.has_value());
    }
    SUBCASE("DC_RC, n = 10, slow source")
    {
        const auto est =
            estimate_freshness_time(NetworkSpec::flat(10, DC_RC, Rates{0.1, 1, 1, 1}), 1e5, 6);
        check_within(est, freshness_dc_rc(1, 0.1, 10));
        CHECK(est.per_node.size() == 10);
    }
    SUBCASE("agrees with the cycle estimator")
    {
        const NetworkSpec specs[] = {
            NetworkSpec::flat(4, FC_noRC, Rates{0.5, 1, 1, 2}),
            NetworkSpec::clustered(2, 3, DC_noRC, FC_sRC, Rates{0.5, 2, 1.5, 1}),
        };
        for (const auto& spec : specs) {
            const auto cyc = estimate_freshness_cycles(spec, 200000, 8);
            const auto tav = estimate_freshness_time(spec, 2e5, 9);
            const double combined = std::hypot(cyc.std_error, tav.std_error);
            CHECK(std::abs(cyc.p_hat - tav.p_hat) <= kSigmas * combined);
        }
    }
    SUBCASE("short horizons are flagged")
    {
        const auto est = estimate_freshness_time(NetworkSpec::flat(2, DC_RC, Rates{0.1, 1, 1, 1}), 50, 1);
        CHECK(est.warning.has_value());
    }
}

TEST_CASE("two-level simulation matches the stage product")
{
    struct Case {
        GossipPolicy source, cluster;
        Rates rates;
        double expected;
    };
    const Case cases[] = {
        {DC_noRC, DC_noRC, {0.5, 1, 1, 1}, 0.25},
        {DC_RC, DC_RC, {1, 1, 1, 1}, 9.0 / 64},
        {DC_RC, FC_allRC, {1, 1, 1, 1}, 5.0 / 32},
    };
    std::uint64_t seed = 300;
    for (const auto& c : cases) {
        const auto report =
            decomposition_check(NetworkSpec::clustered(2, 2, c.source, c.cluster, c.rates), 1000000, seed++);
        CHECK(report.analytic.p == doctest::Approx(c.expected).epsilon(1e-12));
        CHECK(std::abs(report.z) <= kSigmas);
    }
}

TEST_CASE("symmetric nodes look alike")
{
    const NetworkSpec specs[] = {
        NetworkSpec::flat(6, FC_sRC, Rates{0.5, 1, 1, 1}),
        NetworkSpec::clustered(3, 3, DC_RC, FC_allRC, Rates{0.3, 2, 1, 1}),
    };
    for (const auto& spec : specs) {
        const auto est = estimate_freshness_cycles(spec, 100000, 21);
        const double p = est.p_hat;
        const double sigma_diff = std::sqrt(2 * p * (1 - p) / est.samples);
        for (std::size_t i = 0; i < est.per_node.size(); ++i) {
            for (std::size_t j = i + 1; j < est.per_node.size(); ++j) {
                CHECK(std::abs(est.per_node[i] - est.per_node[j]) <= 5 * sigma_diff);
            }
        }
    }
}

TEST_CASE("degenerate rates")
{
    SUBCASE("silent source")
    {
        for (GossipPolicy p : kAllPolicies) {
            const auto est = estimate_freshness_cycles(NetworkSpec::flat(4, p, Rates{1, 0, 1, 3}), 5000, 1);
            CHECK(est.p_hat == 0.0);
        }
        const auto est = estimate_freshness_time(NetworkSpec::flat(3, FC_allRC, Rates{1, 0, 1, 3}), 1000, 1);
        CHECK(est.p_hat == 0.0);
    }
    SUBCASE("fast self-updates drive freshness to zero")
    {
        double previous = 1.0;
        for (double le : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
            const double p =
                estimate_freshness_cycles(NetworkSpec::flat(3, FC_allRC, Rates{le, 1, 1, 1}), 50000, 2).p_hat;
            CHECK(p < previous);
            previous = p;
        }
        CHECK(previous < 1e-3);
    }
}

TEST_CASE("cycle estimator agrees with the recursion on sizes outside the acceptance grid")
{
    const Rates r{0.4, 1.0, 1.0, 0.8};
    std::uint64_t seed = 700;
    for (GossipPolicy p : kAllPolicies) {
        for (int n : {4, 6, 7}) {
            CAPTURE(to_string(p));
            CAPTURE(n);
            check_within(estimate_freshness_cycles(NetworkSpec::flat(n, p, r), 100000, seed++),
                         flat_freshness(p, r.lambda_s, r.lambda_g, r.lambda_e, n));
        }
    }
}

TEST_CASE("flat networks can route other rate fields")
{
    NetworkSpec spec{FlatShape{3, DC_RC, RateField::lambda_c, RateField::lambda_g}, Rates{1, 0, 1, 0}};
    check_within(estimate_freshness_cycles(spec, 200000, 12), 7.0 / 24);
}

}
