#include "rcgossip/core.hpp"

#include <cmath>
#include <stdexcept>

namespace rcgossip {

namespace {

constexpr std::string_view kPolicyNames[] = {"DC_noRC", "DC_RC", "FC_noRC", "FC_sRC",
                                             "FC_allRC"};

void check_rate(std::vector<Violation>& out, std::string_view name, double value)
{
    if (!std::isfinite(value) || value < 0.0) {
        out.push_back({std::string(name),
                       std::string(name) + " must be finite and >= 0, got " +
                           std::to_string(value)});
    }
}

}  // namespace

std::string_view to_string(GossipPolicy policy)
{
    return kPolicyNames[static_cast<int>(policy)];
}

std::optional<GossipPolicy> parse_policy(std::string_view name)
{
    for (GossipPolicy p : kAllPolicies) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

GossipPolicy policy_from_string(std::string_view name)
{
    if (auto p = parse_policy(name)) return *p;
    throw std::invalid_argument("unknown gossip policy '" + std::string(name) +
                                "' (expected DC_noRC, DC_RC, FC_noRC, FC_sRC or FC_allRC)");
}

double rate_of(const Rates& rates, RateField field)
{
    switch (field) {
    case RateField::lambda_s: return rates.lambda_s;
    case RateField::lambda_c: return rates.lambda_c;
    case RateField::lambda_g: return rates.lambda_g;
    }
    throw std::logic_error("bad RateField");
}

NetworkSpec NetworkSpec::flat(int n, GossipPolicy policy, Rates rates)
{
    return {FlatShape{n, policy}, rates};
}

NetworkSpec NetworkSpec::clustered(int m, int k, GossipPolicy source_policy,
                                   GossipPolicy cluster_policy, Rates rates)
{
    return {ClusteredShape{m * k, k, m, source_policy, cluster_policy}, rates};
}

int NetworkSpec::end_nodes() const
{
    return std::visit([](const auto& s) { return s.n; }, shape);
}

double per_stale_rate(GossipPolicy policy, double source, double gossip, int n, int fresh)
{
    if (n < 1) throw std::domain_error("per_stale_rate: n must be >= 1");
    if (fresh < 0 || fresh >= n) {
        throw std::domain_error("per_stale_rate: fresh count " + std::to_string(fresh) +
                                " outside [0, " + std::to_string(n - 1) + "]");
    }
    const double stale = n - fresh;
    const double traditional_gossip = n > 1 ? fresh * gossip / (n - 1) : 0.0;
    switch (policy) {
    case GossipPolicy::DC_noRC: return source / n;
    case GossipPolicy::DC_RC: return source / stale;
    case GossipPolicy::FC_noRC: return source / n + traditional_gossip;
    case GossipPolicy::FC_sRC: return source / stale + traditional_gossip;
    case GossipPolicy::FC_allRC: return (source + fresh * gossip) / stale;
    }
    throw std::logic_error("bad GossipPolicy");
}

std::vector<Violation> validate(const NetworkSpec& spec)
{
    std::vector<Violation> out;
    const Rates& r = spec.rates;
    check_rate(out, "lambda_e", r.lambda_e);
    check_rate(out, "lambda_s", r.lambda_s);
    check_rate(out, "lambda_c", r.lambda_c);
    check_rate(out, "lambda_g", r.lambda_g);
    if (std::isfinite(r.lambda_e) && r.lambda_e == 0.0) {
        out.push_back({"lambda_e", "lambda_e must be > 0 so renewal cycles terminate"});
    }

    if (const auto* flat = std::get_if<FlatShape>(&spec.shape)) {
        if (flat->n < 1) {
            out.push_back({"n", "flat network needs n >= 1, got " + std::to_string(flat->n)});
        }
        return out;
    }

    const auto& c = std::get<ClusteredShape>(spec.shape);
    if (c.k < 1) out.push_back({"k", "cluster size k must be >= 1, got " + std::to_string(c.k)});
    if (c.m < 1) out.push_back({"m", "cluster count m must be >= 1, got " + std::to_string(c.m)});
    if (static_cast<long long>(c.m) * c.k != c.n) {
        out.push_back({"m", "m·k ≠ n: " + std::to_string(c.m) + "·" + std::to_string(c.k) +
                                " = " + std::to_string(static_cast<long long>(c.m) * c.k) +
                                " but n = " + std::to_string(c.n)});
    }
    if (is_fully_connected(c.source_policy)) {
        out.push_back({"source_policy", "CHs form a DC network: source policy must be DC_noRC or "
                                        "DC_RC, got " +
                                            std::string(to_string(c.source_policy))});
    }
    return out;
}

void require_valid(const NetworkSpec& spec)
{
    const auto violations = validate(spec);
    if (violations.empty()) return;
    std::string msg = "invalid network spec:";
    for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
    throw std::invalid_argument(msg);
}

}  // namespace rcgossip
