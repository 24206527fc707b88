#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rcgossip {

/// The four Poisson intensities that drive a gossip network.
///
/// lambda_e is the source self-update rate; lambda_s the total source to
/// receiver rate; lambda_c the total rate of each clusterhead towards its
/// nodes; lambda_g the total gossip rate of each fresh node. Units are
/// arbitrary: every freshness value is invariant to a common rescaling.
struct Rates {
    double lambda_e = 1.0;
    double lambda_s = 1.0;
    double lambda_c = 1.0;
    double lambda_g = 1.0;

    Rates scaled(double factor) const
    {
        return {lambda_e * factor, lambda_s * factor, lambda_c * factor, lambda_g * factor};
    }

    friend bool operator==(const Rates&, const Rates&) = default;
};

enum class GossipPolicy { DC_noRC, DC_RC, FC_noRC, FC_sRC, FC_allRC };

inline constexpr GossipPolicy kAllPolicies[] = {
    GossipPolicy::DC_noRC, GossipPolicy::DC_RC, GossipPolicy::FC_noRC,
    GossipPolicy::FC_sRC, GossipPolicy::FC_allRC};

inline constexpr GossipPolicy kSourcePolicies[] = {GossipPolicy::DC_noRC, GossipPolicy::DC_RC};

std::string_view to_string(GossipPolicy policy);
std::optional<GossipPolicy> parse_policy(std::string_view name);

/// Throws std::invalid_argument listing the accepted names.
GossipPolicy policy_from_string(std::string_view name);

constexpr bool is_fully_connected(GossipPolicy policy)
{
    return policy == GossipPolicy::FC_noRC || policy == GossipPolicy::FC_sRC ||
           policy == GossipPolicy::FC_allRC;
}

/// Selects which field of Rates plays a given role in a flat network.
enum class RateField { lambda_s, lambda_c, lambda_g };

double rate_of(const Rates& rates, RateField field);

struct FlatShape {
    int n = 1;
    GossipPolicy policy = GossipPolicy::DC_noRC;
    RateField source_rate = RateField::lambda_s;
    RateField gossip_rate = RateField::lambda_g;
};

/// m clusterheads fed by the source, each serving k end-nodes.
struct ClusteredShape {
    int n = 1;
    int k = 1;
    int m = 1;
    GossipPolicy source_policy = GossipPolicy::DC_noRC;
    GossipPolicy cluster_policy = GossipPolicy::DC_noRC;
};

struct NetworkSpec {
    std::variant<FlatShape, ClusteredShape> shape;
    Rates rates;

    static NetworkSpec flat(int n, GossipPolicy policy, Rates rates);
    static NetworkSpec clustered(int m, int k, GossipPolicy source_policy,
                                 GossipPolicy cluster_policy, Rates rates);

    bool is_clustered() const { return std::holds_alternative<ClusteredShape>(shape); }
    int end_nodes() const;
};

/// Per-stale-node delivery intensity when exactly `fresh` of the `n`
/// receivers hold the sender's current version.
///
/// Every policy reduces to this one function by node symmetry:
///   DC_noRC   src/n
///   DC_RC     src/(n-j)
///   FC_noRC   src/n     + j*gossip/(n-1)
///   FC_sRC    src/(n-j) + j*gossip/(n-1)
///   FC_allRC  (src + j*gossip)/(n-j)
/// The traditional gossip term is zero when n == 1. DC policies ignore
/// `gossip`. Throws std::domain_error unless n >= 1 and 0 <= fresh < n.
double per_stale_rate(GossipPolicy policy, double source, double gossip, int n, int fresh);

struct Violation {
    std::string field;
    std::string message;
};

/// Every violated invariant of `spec`; empty means valid.
std::vector<Violation> validate(const NetworkSpec& spec);

/// Throws std::invalid_argument joining every violation message.
void require_valid(const NetworkSpec& spec);

}  // namespace rcgossip
