#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rcgossip/core.hpp"

namespace rcgossip {

// Closed forms. All require lambda_e > 0, nonnegative rates and n >= 1,
// and throw std::domain_error otherwise.

/// Disconnected network, traditional split: λs / (λs + n·λe).
double freshness_dc_norc(double lambda_s, double lambda_e, int n);

/// Disconnected network with rate-changing source:
/// (λs / (n·λe)) · [1 − (λs/(λs+λe))^n], and 0 when λs == 0.
double freshness_dc_rc(double lambda_s, double lambda_e, int n);

/// Fully connected network, rate-changing at source and gossipers:
/// (1/n) Σ_{k=1..n} Π_{j=1..k} (λs+(j−1)λg) / (λs+(j−1)λg+λe).
double freshness_fc_allrc(double lambda_s, double lambda_g, double lambda_e, int n);

/// Fully connected network with traditional splits, written as the
/// explicit capture-order sum with a_i = λs/n + (i−1)·λg/(n−1).
double freshness_fc_norc(double lambda_s, double lambda_g, double lambda_e, int n);

/// The closed form for `policy` when one exists (every policy but FC_sRC).
std::optional<double> closed_form_freshness(GossipPolicy policy, double source, double gossip,
                                            double lambda_e, int n);

/// Step-by-step outcome probabilities of one renewal cycle, seen from a
/// tagged node. Step k (1-based) starts with k−1 fresh nodes, the tagged
/// node still stale; its three outcomes are: the tagged node is updated
/// (q[k-1]), another stale node is updated (tau[k-1]), or the source
/// self-updates first (absorption[k-1]). tau has n−1 entries since at the
/// last step the tagged node is the only stale node left.
struct RecursionTrace {
    std::vector<double> q;
    std::vector<double> tau;
    std::vector<double> absorption;
    double p = 0.0;
};

/// Per-stale-node delivery intensity as a function of the fresh count.
using StaleRateFn = std::function<double(int fresh)>;

/// Exact freshness of a symmetric node under any per-stale-rate function:
/// p = Σ_k q_k Π_{j<k} τ_j. Throws std::domain_error naming the fresh count
/// at which `rate` returns a negative or non-finite value.
RecursionTrace renewal_freshness(const StaleRateFn& rate, int n, double lambda_e);

RecursionTrace renewal_freshness(GossipPolicy policy, double source, double gossip, int n,
                                 double lambda_e);

/// Flat-network freshness through the generic recursion.
double flat_freshness(GossipPolicy policy, double source, double gossip, double lambda_e, int n);

struct ClusteredBreakdown {
    double p_ch = 0.0;
    double p_node_given_ch = 0.0;
    double p = 0.0;
};

/// Two-stage composition: a CH among m under the source policy with λs,
/// times a node among k under the cluster policy with λc and λg.
/// Throws std::invalid_argument for an invalid clustered spec.
ClusteredBreakdown clustered_freshness(const NetworkSpec& spec);

ClusteredBreakdown clustered_freshness(int m, int k, GossipPolicy source_policy,
                                       GossipPolicy cluster_policy, const Rates& rates);

/// The tabulated end-node freshness for the seven clustered configurations
/// with published closed forms: the four DC×DC pairs and (DC_noRC, FC_noRC),
/// (DC_RC, FC_noRC), (DC_RC, FC_allRC). nullopt for any other pair.
std::optional<double> tabulated_clustered_freshness(GossipPolicy source_policy,
                                                    GossipPolicy cluster_policy, int m, int k,
                                                    const Rates& rates);

bool has_tabulated_form(GossipPolicy source_policy, GossipPolicy cluster_policy);

/// Ascending divisors of n (n >= 1).
std::vector<int> divisors(int n);

struct ClusterSizePoint {
    int k = 0;
    int m = 0;
    double p = 0.0;
};

struct OptimalClusterSize {
    int k_star = 0;
    int m_star = 0;
    double p_star = 0.0;
    std::vector<ClusterSizePoint> profile;  // ascending k
};

/// Scans every divisor k of n; the smallest k wins exact ties.
OptimalClusterSize optimal_cluster_size(int n, const Rates& rates, GossipPolicy source_policy,
                                        GossipPolicy cluster_policy);

}  // namespace rcgossip
