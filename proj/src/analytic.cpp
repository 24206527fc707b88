#include "rcgossip/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcgossip {

namespace {

void require_inputs(const char* who, double lambda_e, int n,
                    std::initializer_list<double> rates)
{
    if (!(lambda_e > 0.0) || !std::isfinite(lambda_e)) {
        throw std::domain_error(std::string(who) + ": lambda_e must be finite and > 0");
    }
    if (n < 1) throw std::domain_error(std::string(who) + ": n must be >= 1");
    for (double r : rates) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw std::domain_error(std::string(who) + ": rates must be finite and >= 0");
        }
    }
}

}  // namespace

double freshness_dc_norc(double lambda_s, double lambda_e, int n)
{
    require_inputs("freshness_dc_norc", lambda_e, n, {lambda_s});
    return lambda_s / (lambda_s + n * lambda_e);
}

double freshness_dc_rc(double lambda_s, double lambda_e, int n)
{
    require_inputs("freshness_dc_rc", lambda_e, n, {lambda_s});
    if (lambda_s == 0.0) return 0.0;
    // 1 − (λs/(λs+λe))^n without cancellation when λe ≪ λs
    const double one_minus_power = -std::expm1(-n * std::log1p(lambda_e / lambda_s));
    return lambda_s / (n * lambda_e) * one_minus_power;
}

double freshness_fc_allrc(double lambda_s, double lambda_g, double lambda_e, int n)
{
    require_inputs("freshness_fc_allrc", lambda_e, n, {lambda_s, lambda_g});
    double sum = 0.0;
    double product = 1.0;
    for (int j = 1; j <= n; ++j) {
        const double rate = lambda_s + (j - 1) * lambda_g;
        product *= rate / (rate + lambda_e);
        sum += product;
    }
    return sum / n;
}

double freshness_fc_norc(double lambda_s, double lambda_g, double lambda_e, int n)
{
    require_inputs("freshness_fc_norc", lambda_e, n, {lambda_s, lambda_g});
    const double per_link = n > 1 ? lambda_g / (n - 1) : 0.0;
    auto a = [&](int i) { return lambda_s / n + (i - 1) * per_link; };

    double sum = 0.0;
    double passed_over = 1.0;
    for (int r = 1; r <= n; ++r) {
        sum += passed_over * a(r) / ((n - r + 1) * a(r) + lambda_e);
        passed_over *= (n - r) * a(r) / ((n - r + 1) * a(r) + lambda_e);
    }
    return sum;
}

std::optional<double> closed_form_freshness(GossipPolicy policy, double source, double gossip,
                                            double lambda_e, int n)
{
    switch (policy) {
    case GossipPolicy::DC_noRC: return freshness_dc_norc(source, lambda_e, n);
    case GossipPolicy::DC_RC: return freshness_dc_rc(source, lambda_e, n);
    case GossipPolicy::FC_noRC: return freshness_fc_norc(source, gossip, lambda_e, n);
    case GossipPolicy::FC_allRC: return freshness_fc_allrc(source, gossip, lambda_e, n);
    case GossipPolicy::FC_sRC: return std::nullopt;
    }
    return std::nullopt;
}

RecursionTrace renewal_freshness(const StaleRateFn& rate, int n, double lambda_e)
{
    require_inputs("renewal_freshness", lambda_e, n, {});
    RecursionTrace trace;
    trace.q.reserve(n);
    trace.tau.reserve(n > 0 ? n - 1 : 0);
    trace.absorption.reserve(n);

    double reach = 1.0;  // probability the tagged node is still stale at step k
    for (int k = 1; k <= n; ++k) {
        const int fresh = k - 1;
        const double u = rate(fresh);
        if (!(u >= 0.0) || !std::isfinite(u)) {
            throw std::domain_error("renewal_freshness: stale rate at fresh count " +
                                    std::to_string(fresh) + " is " + std::to_string(u));
        }
        const int stale = n - fresh;
        const double total = stale * u + lambda_e;
        const double q = u / total;
        trace.q.push_back(q);
        trace.absorption.push_back(lambda_e / total);
        trace.p += reach * q;
        if (k < n) {
            const double tau = (stale - 1) * u / total;
            trace.tau.push_back(tau);
            reach *= tau;
        }
    }
    return trace;
}

RecursionTrace renewal_freshness(GossipPolicy policy, double source, double gossip, int n,
                                 double lambda_e)
{
    return renewal_freshness(
        [=](int fresh) { return per_stale_rate(policy, source, gossip, n, fresh); }, n,
        lambda_e);
}

double flat_freshness(GossipPolicy policy, double source, double gossip, double lambda_e, int n)
{
    return renewal_freshness(policy, source, gossip, n, lambda_e).p;
}

ClusteredBreakdown clustered_freshness(const NetworkSpec& spec)
{
    require_valid(spec);
    const auto* c = std::get_if<ClusteredShape>(&spec.shape);
    if (c == nullptr) throw std::invalid_argument("clustered_freshness: spec is not clustered");
    const Rates& r = spec.rates;
    ClusteredBreakdown out;
    out.p_ch = flat_freshness(c->source_policy, r.lambda_s, 0.0, r.lambda_e, c->m);
    out.p_node_given_ch = flat_freshness(c->cluster_policy, r.lambda_c, r.lambda_g, r.lambda_e,
                                         c->k);
    out.p = out.p_ch * out.p_node_given_ch;
    return out;
}

ClusteredBreakdown clustered_freshness(int m, int k, GossipPolicy source_policy,
                                       GossipPolicy cluster_policy, const Rates& rates)
{
    return clustered_freshness(
        NetworkSpec::clustered(m, k, source_policy, cluster_policy, rates));
}

bool has_tabulated_form(GossipPolicy source_policy, GossipPolicy cluster_policy)
{
    using enum GossipPolicy;
    if (source_policy != DC_noRC && source_policy != DC_RC) return false;
    switch (cluster_policy) {
    case DC_noRC:
    case DC_RC:
    case FC_noRC: return true;
    case FC_allRC: return source_policy == DC_RC;
    case FC_sRC: return false;
    }
    return false;
}

std::optional<double> tabulated_clustered_freshness(GossipPolicy source_policy,
                                                    GossipPolicy cluster_policy, int m, int k,
                                                    const Rates& rates)
{
    if (!has_tabulated_form(source_policy, cluster_policy)) return std::nullopt;
    require_valid(NetworkSpec::clustered(m, k, source_policy, cluster_policy, rates));
    const auto& [le, ls, lc, lg] = rates;

    const double source_stage = source_policy == GossipPolicy::DC_RC
                                    ? freshness_dc_rc(ls, le, m)
                                    : freshness_dc_norc(ls, le, m);
    const auto cluster_stage = closed_form_freshness(cluster_policy, lc, lg, le, k);
    return source_stage * *cluster_stage;
}

std::vector<int> divisors(int n)
{
    if (n < 1) throw std::domain_error("divisors: n must be >= 1");
    std::vector<int> low, high;
    for (int d = 1; static_cast<long long>(d) * d <= n; ++d) {
        if (n % d != 0) continue;
        low.push_back(d);
        if (d != n / d) high.push_back(n / d);
    }
    low.insert(low.end(), high.rbegin(), high.rend());
    return low;
}

OptimalClusterSize optimal_cluster_size(int n, const Rates& rates, GossipPolicy source_policy,
                                        GossipPolicy cluster_policy)
{
    OptimalClusterSize out;
    for (int k : divisors(n)) {
        const int m = n / k;
        const double p = clustered_freshness(m, k, source_policy, cluster_policy, rates).p;
        out.profile.push_back({k, m, p});
        if (out.k_star == 0 || p > out.p_star) {
            out.k_star = k;
            out.m_star = m;
            out.p_star = p;
        }
    }
    return out;
}

}  // namespace rcgossip
