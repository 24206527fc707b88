#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "rcgossip/core.hpp"

using namespace rcgossip;
using enum GossipPolicy;

TEST_SUITE("core") {

TEST_CASE("per_stale_rate worked examples")
{
    CHECK(per_stale_rate(DC_noRC, 1.0, 0.0, 4, 2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(per_stale_rate(DC_RC, 1.0, 0.0, 4, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(per_stale_rate(FC_allRC, 1.0, 1.0, 2, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(per_stale_rate(FC_noRC, 1.0, 1.0, 3, 1) ==
          doctest::Approx(1.0 / 3 + 0.5).epsilon(1e-15));
}

TEST_CASE("per_stale_rate rejects impossible fresh counts")
{
    CHECK_THROWS_AS(per_stale_rate(DC_RC, 1.0, 1.0, 4, 4), std::domain_error);
    CHECK_THROWS_AS(per_stale_rate(DC_RC, 1.0, 1.0, 4, -1), std::domain_error);
    CHECK_THROWS_AS(per_stale_rate(FC_allRC, 1.0, 1.0, 0, 0), std::domain_error);
}

TEST_CASE("single node: every policy delivers the whole source rate")
{
    for (GossipPolicy p : kAllPolicies) {
        CAPTURE(to_string(p));
        CHECK(per_stale_rate(p, 2.5, 7.0, 1, 0) == 2.5);
    }
}

TEST_CASE("rate-level properties over random inputs")
{
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> rate(0.0, 20.0);
    std::uniform_int_distribution<int> size(1, 200);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = size(gen);
        const double src = rate(gen);
        const double gsp = rate(gen);
        for (int j = 0; j < n; ++j) {
            for (GossipPolicy p : kAllPolicies) {
                const double u = per_stale_rate(p, src, gsp, n, j);
                REQUIRE(std::isfinite(u));
                REQUIRE(u >= 0.0);
            }
            // RC never lowers what a stale node receives
            CHECK(per_stale_rate(DC_RC, src, gsp, n, j) >= per_stale_rate(DC_noRC, src, gsp, n, j));
            CHECK(per_stale_rate(FC_allRC, src, gsp, n, j) >=
                  per_stale_rate(FC_sRC, src, gsp, n, j) * (1 - 1e-15));
            CHECK(per_stale_rate(FC_sRC, src, gsp, n, j) >= per_stale_rate(FC_noRC, src, gsp, n, j));

            // no gossip: FC policies fall back to their DC counterparts
            CHECK(per_stale_rate(FC_noRC, src, 0.0, n, j) == per_stale_rate(DC_noRC, src, 0.0, n, j));
            CHECK(per_stale_rate(FC_sRC, src, 0.0, n, j) == per_stale_rate(DC_RC, src, 0.0, n, j));
            CHECK(per_stale_rate(FC_allRC, src, 0.0, n, j) == per_stale_rate(DC_RC, src, 0.0, n, j));
        }
        // equal at j = 0 for the source term
        CHECK(per_stale_rate(DC_RC, src, gsp, n, 0) == per_stale_rate(DC_noRC, src, gsp, n, 0));
    }
}

TEST_CASE("DC policies ignore the gossip rate")
{
    CHECK(per_stale_rate(DC_noRC, 1.0, 0.0, 5, 3) == per_stale_rate(DC_noRC, 1.0, 99.0, 5, 3));
    CHECK(per_stale_rate(DC_RC, 1.0, 0.0, 5, 3) == per_stale_rate(DC_RC, 1.0, 99.0, 5, 3));
}

TEST_CASE("policy names round-trip")
{
    for (GossipPolicy p : kAllPolicies) CHECK(policy_from_string(to_string(p)) == p);
    CHECK_FALSE(parse_policy("FC_RC").has_value());
    CHECK_THROWS_AS(policy_from_string("dc_norc"), std::invalid_argument);
}

TEST_CASE("validate reports every violation")
{
    SUBCASE("cluster count does not divide n")
    {
        NetworkSpec spec{ClusteredShape{120, 7, 17, DC_noRC, DC_noRC}, Rates{}};
        const auto v = validate(spec);
        REQUIRE(v.size() == 1);
        CHECK(v[0].message.find("m·k ≠ n") != std::string::npos);
    }
    SUBCASE("a lone node with unit rates is fine")
    {
        CHECK(validate(NetworkSpec::flat(1, DC_noRC, Rates{1, 1, 1, 1})).empty());
    }
    SUBCASE("clusterheads never gossip")
    {
        const auto v = validate(NetworkSpec::clustered(2, 2, FC_allRC, DC_noRC, Rates{}));
        REQUIRE(v.size() == 1);
        CHECK(v[0].message.find("CHs form a DC network") != std::string::npos);
    }
    SUBCASE("rates and sizes")
    {
        NetworkSpec spec{ClusteredShape{0, 0, 0, FC_sRC, DC_noRC}, Rates{0.0, -1.0, NAN, 1.0}};
        const auto v = validate(spec);
        // lambda_s, lambda_c, lambda_e == 0, k, m, CH policy
        CHECK(v.size() == 6);
        CHECK_THROWS_AS(require_valid(spec), std::invalid_argument);
    }
    SUBCASE("flat n must be positive")
    {
        CHECK(validate(NetworkSpec::flat(0, DC_RC, Rates{})).size() == 1);
    }
}

TEST_CASE("rescaling rates scales every field")
{
    const Rates r{0.5, 1.0, 2.0, 4.0};
    CHECK(r.scaled(2.0) == Rates{1.0, 2.0, 4.0, 8.0});
}

}
